#pragma once

#include <stdexcept>
#include <string>

namespace hetlink {

// Error categories map onto CLI exit codes: Config/Contract -> 2,
// Numeric -> 3, everything else (data, format, shape, index) -> 4.
enum class ErrorKind {
  Config,
  Contract,
  Numeric,
  Data,
  Format,
  Shape,
  Index,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  int exit_code() const {
    switch (kind_) {
      case ErrorKind::Config:
      case ErrorKind::Contract:
        return 2;
      case ErrorKind::Numeric:
        return 3;
      default:
        return 4;
    }
  }

 private:
  ErrorKind kind_;
};

inline Error config_error(const std::string& msg) { return {ErrorKind::Config, msg}; }
inline Error contract_error(const std::string& msg) { return {ErrorKind::Contract, msg}; }
inline Error numeric_error(const std::string& msg) { return {ErrorKind::Numeric, msg}; }
inline Error data_error(const std::string& msg) { return {ErrorKind::Data, msg}; }
inline Error format_error(const std::string& msg) { return {ErrorKind::Format, msg}; }
inline Error shape_error(const std::string& msg) { return {ErrorKind::Shape, msg}; }
inline Error index_error(const std::string& msg) { return {ErrorKind::Index, msg}; }

}  // namespace hetlink
