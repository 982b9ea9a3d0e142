#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hetlink/error.hpp"
#include "hetlink/kernels.hpp"

namespace hetlink {

namespace detail {

struct TensorNode {
  std::vector<size_t> shape;
  std::vector<double> data;
  std::vector<double> grad;  // sized lazily by Tape::backward
  bool requires_grad = false;
  bool has_grad = false;
};

}  // namespace detail

// Toggles the NaN/Inf scan at op boundaries. On by default; the benchmark
// target switches it off.
void set_finite_checks(bool enabled);
bool finite_checks_enabled();

// Dense row-major tensor of doubles with value semantics over a shared node.
// Data is treated as immutable once it enters a taped computation; `mut()`
// exists for parameter initialization, optimizer updates and tests, all of
// which happen between tape lifetimes.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<size_t> shape, bool requires_grad = false);
  Tensor(std::vector<size_t> shape, std::vector<double> data, bool requires_grad = false);

  static Tensor scalar(double v);
  static Tensor zeros_like(const Tensor& t);

  bool defined() const { return node_ != nullptr; }
  const std::vector<size_t>& shape() const { return node_->shape; }
  size_t rank() const { return node_->shape.size(); }
  size_t dim(size_t i) const { return node_->shape[i]; }
  size_t numel() const { return node_->data.size(); }
  size_t rows() const;
  size_t cols() const;

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool rg) { node_->requires_grad = rg; }

  std::span<const double> data() const { return node_->data; }
  std::span<double> mut() { return node_->data; }
  double value() const;  // scalar tensors only
  double at(size_t i) const { return node_->data[i]; }
  double at(size_t i, size_t j) const { return node_->data[i * cols() + j]; }

  bool has_grad() const { return node_->has_grad; }
  std::span<const double> grad() const;

  std::shared_ptr<detail::TensorNode> node() const { return node_; }

 private:
  std::shared_ptr<detail::TensorNode> node_;
};

// Wengert-list tape: ops append themselves in execution order (inputs always
// precede their consumers), backward replays in exact reverse order.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  ~Tape();

  size_t size() const { return entries_.size(); }

  // Seeds d(loss)/d(loss) = 1 and pulls gradients back through every
  // recorded op. loss must be a scalar.
  void backward(const Tensor& loss);

  void record(std::function<void()> pull,
              std::initializer_list<std::shared_ptr<detail::TensorNode>> touched);

  static Tape* active();

  // RAII activation; ops record themselves only while a tape is active.
  class Scope {
   public:
    explicit Scope(Tape& t);
    ~Scope();
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    Tape* prev_;
  };

 private:
  struct Entry {
    std::function<void()> pull;
  };
  std::vector<Entry> entries_;
  std::vector<std::shared_ptr<detail::TensorNode>> touched_;
};

// --- ops -------------------------------------------------------------
// Each op validates shapes, runs its kernel, scans the result for NaN/Inf
// when finite checks are on, and records a pull closure on the active tape
// when the output requires grad.

Tensor matmul(const Tensor& a, const Tensor& b);
// mat[m x n] * vec[n] -> [m]
Tensor matvec(const Tensor& mat, const Tensor& vec);
Tensor add(const Tensor& a, const Tensor& b);
// mat[m x n] + row vector [n] broadcast over rows (bias add).
Tensor add_rowvec(const Tensor& mat, const Tensor& vec);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
Tensor relu(const Tensor& a);
Tensor leaky_relu(const Tensor& a, double slope = 0.01);
Tensor concat_cols(const Tensor& a, const Tensor& b);
// Same data, new shape; gradients pass through untouched.
Tensor reshape(const Tensor& a, std::vector<size_t> shape);
Tensor gather_rows(const Tensor& a, std::vector<size_t> idx);
Tensor mean_rows(const Tensor& a, std::vector<size_t> idx);
Tensor sum(const Tensor& a);
Tensor softmax_rows(const Tensor& a);
Tensor cross_entropy(const Tensor& logits, const std::vector<int>& labels);

// --- graph-structured ops ---------------------------------------------
// These take the relation CSR directly; adjacency is structural and never
// differentiated through.

// Weight-normalized neighbor mean; empty rows yield zero rows.
Tensor neighbor_mean(const Csr& g, const Tensor& m, bool use_weights);
// e[arc] = s_dst[row(arc)] + s_src[col(arc)]
Tensor edge_logits(const Csr& g, const Tensor& s_dst, const Tensor& s_src);
// Softmax over each row's arc segment.
Tensor segment_softmax(const Csr& g, const Tensor& e);
// out[v] = sum over arcs of row v of alpha[arc] * m[col(arc)]
Tensor edge_weighted_sum(const Csr& g, const Tensor& m, const Tensor& alpha);

}  // namespace hetlink
