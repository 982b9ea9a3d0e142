#include "hetlink/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace hetlink {

namespace {

constexpr char kMagic[4] = {'H', 'L', 'C', 'K'};
constexpr uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in, const char* what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw format_error(std::string("checkpoint: truncated while reading ") + what);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write " + path);
  out.write(kMagic, 4);
  put<uint32_t>(out, kVersion);
  put<uint8_t>(out, static_cast<uint8_t>(params.kind));
  put<uint8_t>(out, params.sim_weighted ? 1 : 0);
  put<double>(out, params.leaky_slope);
  put<uint64_t>(out, params.dims.d_in_drug);
  put<uint64_t>(out, params.dims.d_in_protein);
  put<uint64_t>(out, params.dims.d_h);
  put<uint64_t>(out, params.dims.m_hidden);
  put<uint64_t>(out, params.dims.class_count);
  const auto named = params.named();
  put<uint64_t>(out, named.size());
  for (const auto& [name, t] : named) {
    put<uint32_t>(out, static_cast<uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<uint32_t>(out, static_cast<uint32_t>(t.rank()));
    for (size_t d : t.shape()) put<uint64_t>(out, d);
    out.write(reinterpret_cast<const char*>(t.data().data()),
              static_cast<std::streamsize>(t.numel() * sizeof(double)));
  }
  if (!out) throw data_error("short write to " + path);
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw format_error(path + ": not a checkpoint file");
  }
  const auto version = get<uint32_t>(in, "version");
  if (version != kVersion) {
    throw format_error(path + ": unsupported checkpoint version " +
                       std::to_string(version));
  }
  const auto kind_raw = get<uint8_t>(in, "encoder kind");
  if (kind_raw > 1) throw format_error(path + ": bad encoder kind");
  const bool sim_weighted = get<uint8_t>(in, "sim flag") != 0;
  const double leaky_slope = get<double>(in, "slope");
  ModelDims dims;
  dims.d_in_drug = get<uint64_t>(in, "d_in_drug");
  dims.d_in_protein = get<uint64_t>(in, "d_in_protein");
  dims.d_h = get<uint64_t>(in, "d_h");
  dims.m_hidden = get<uint64_t>(in, "m");
  dims.class_count = get<uint64_t>(in, "class_count");

  ModelParams params = make_params(static_cast<EncoderKind>(kind_raw), dims);
  params.sim_weighted = sim_weighted;
  params.leaky_slope = leaky_slope;

  auto named = params.named();
  const auto count = get<uint64_t>(in, "tensor count");
  if (count != named.size()) {
    throw format_error(path + ": expected " + std::to_string(named.size()) +
                       " tensors, file has " + std::to_string(count));
  }
  for (auto& [name, t] : named) {
    const auto len = get<uint32_t>(in, "name length");
    std::string fname(len, '\0');
    in.read(fname.data(), len);
    if (!in || fname != name) {
      throw format_error(path + ": tensor '" + fname + "' where '" + name +
                         "' was expected");
    }
    const auto rank = get<uint32_t>(in, "rank");
    if (rank != t.rank()) throw format_error(path + ": rank mismatch for " + name);
    for (size_t d = 0; d < rank; ++d) {
      if (get<uint64_t>(in, "dim") != t.shape()[d]) {
        throw format_error(path + ": shape mismatch for " + name);
      }
    }
    in.read(reinterpret_cast<char*>(t.mut().data()),
            static_cast<std::streamsize>(t.numel() * sizeof(double)));
    if (!in) throw format_error(path + ": truncated tensor data for " + name);
  }
  return params;
}

}  // namespace hetlink
