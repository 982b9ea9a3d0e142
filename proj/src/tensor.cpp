#include "hetlink/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hetlink {

namespace {

std::atomic<bool> g_finite_checks{true};
thread_local Tape* g_active_tape = nullptr;

std::string shape_str(const std::vector<size_t>& s) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
  os << "]";
  return os.str();
}

size_t shape_numel(const std::vector<size_t>& s) {
  size_t n = 1;
  for (size_t d : s) n *= d;
  return n;
}

void check_finite(const Tensor& t, const char* op) {
  if (!g_finite_checks.load(std::memory_order_relaxed)) return;
  for (double v : t.data()) {
    if (!std::isfinite(v)) {
      throw numeric_error(std::string(op) + ": non-finite value in tensor " +
                          shape_str(t.shape()));
    }
  }
}

void require_rank2(const Tensor& t, const char* op) {
  if (t.rank() != 2) {
    throw shape_error(std::string(op) + ": expected rank-2 tensor, got " +
                      shape_str(t.shape()));
  }
}

bool want_record(const Tensor& out) {
  return Tape::active() != nullptr && out.requires_grad();
}

}  // namespace

void set_finite_checks(bool enabled) { g_finite_checks.store(enabled); }
bool finite_checks_enabled() { return g_finite_checks.load(); }

// --- Tensor ------------------------------------------------------------

Tensor::Tensor(std::vector<size_t> shape, bool requires_grad)
    : node_(std::make_shared<detail::TensorNode>()) {
  node_->shape = std::move(shape);
  node_->data.assign(shape_numel(node_->shape), 0.0);
  node_->requires_grad = requires_grad;
}

Tensor::Tensor(std::vector<size_t> shape, std::vector<double> data, bool requires_grad)
    : node_(std::make_shared<detail::TensorNode>()) {
  if (shape_numel(shape) != data.size()) {
    throw shape_error("tensor: shape " + shape_str(shape) + " does not match " +
                      std::to_string(data.size()) + " values");
  }
  node_->shape = std::move(shape);
  node_->data = std::move(data);
  node_->requires_grad = requires_grad;
  check_finite(*this, "tensor");
}

Tensor Tensor::scalar(double v) { return Tensor({1}, {v}); }

Tensor Tensor::zeros_like(const Tensor& t) { return Tensor(t.shape()); }

size_t Tensor::rows() const {
  require_rank2(*this, "rows");
  return node_->shape[0];
}

size_t Tensor::cols() const {
  require_rank2(*this, "cols");
  return node_->shape[1];
}

double Tensor::value() const {
  if (numel() != 1) {
    throw contract_error("value: tensor " + shape_str(shape()) + " is not a scalar");
  }
  return node_->data[0];
}

std::span<const double> Tensor::grad() const {
  if (!node_->has_grad) {
    throw contract_error("grad: no gradient recorded for this tensor");
  }
  return node_->grad;
}

// --- Tape --------------------------------------------------------------

Tape::~Tape() = default;

Tape* Tape::active() { return g_active_tape; }

Tape::Scope::Scope(Tape& t) : prev_(g_active_tape) { g_active_tape = &t; }
Tape::Scope::~Scope() { g_active_tape = prev_; }

void Tape::record(std::function<void()> pull,
                  std::initializer_list<std::shared_ptr<detail::TensorNode>> touched) {
  entries_.push_back({std::move(pull)});
  for (const auto& n : touched) touched_.push_back(n);
}

void Tape::backward(const Tensor& loss) {
  if (loss.numel() != 1) {
    throw contract_error("backward: loss must be a scalar, got shape of " +
                         std::to_string(loss.numel()) + " elements");
  }
  for (const auto& n : touched_) {
    if (n->requires_grad) {
      n->grad.assign(n->data.size(), 0.0);
      n->has_grad = true;
    }
  }
  auto ln = loss.node();
  if (!ln->requires_grad) return;  // nothing was recorded against loss
  if (!ln->has_grad) {
    ln->grad.assign(1, 0.0);
    ln->has_grad = true;
  }
  ln->grad[0] = 1.0;
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) it->pull();
}

// --- dense ops ----------------------------------------------------------

namespace {

using NodePtr = std::shared_ptr<detail::TensorNode>;

Tensor make_out(std::vector<size_t> shape, bool rg) { return Tensor(std::move(shape), rg); }

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul");
  require_rank2(b, "matmul");
  const size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    throw shape_error("matmul: inner dimensions disagree, " + shape_str(a.shape()) +
                      " vs " + shape_str(b.shape()));
  }
  Tensor out = make_out({m, n}, a.requires_grad() || b.requires_grad());
  kern::matmul_nn(m, k, n, a.data().data(), b.data().data(), out.mut().data());
  check_finite(out, "matmul");
  if (want_record(out)) {
    Tape::active()->record(
        [an = a.node(), bn = b.node(), on = out.node(), m, k, n]() {
          if (an->requires_grad) {
            std::vector<double> tmp(m * k);
            kern::matmul_nt(m, n, k, on->grad.data(), bn->data.data(), tmp.data());
            for (size_t i = 0; i < tmp.size(); ++i) an->grad[i] += tmp[i];
          }
          if (bn->requires_grad) {
            std::vector<double> tmp(k * n);
            kern::matmul_tn(k, m, n, an->data.data(), on->grad.data(), tmp.data());
            for (size_t i = 0; i < tmp.size(); ++i) bn->grad[i] += tmp[i];
          }
        },
        {a.node(), b.node(), out.node()});
  }
  return out;
}

Tensor matvec(const Tensor& mat, const Tensor& vec) {
  require_rank2(mat, "matvec");
  if (vec.rank() != 1 || vec.dim(0) != mat.dim(1)) {
    throw shape_error("matvec: vector " + shape_str(vec.shape()) +
                      " does not match matrix " + shape_str(mat.shape()));
  }
  const size_t m = mat.dim(0), n = mat.dim(1);
  Tensor out = make_out({m}, mat.requires_grad() || vec.requires_grad());
  auto o = out.mut();
  for (size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (size_t j = 0; j < n; ++j) acc += mat.at(i, j) * vec.at(j);
    o[i] = acc;
  }
  check_finite(out, "matvec");
  if (want_record(out)) {
    Tape::active()->record(
        [mn = mat.node(), vn = vec.node(), on = out.node(), m, n]() {
          if (mn->requires_grad)
            for (size_t i = 0; i < m; ++i)
              for (size_t j = 0; j < n; ++j)
                mn->grad[i * n + j] += on->grad[i] * vn->data[j];
          if (vn->requires_grad)
            for (size_t i = 0; i < m; ++i)
              for (size_t j = 0; j < n; ++j)
                vn->grad[j] += on->grad[i] * mn->data[i * n + j];
        },
        {mat.node(), vec.node(), out.node()});
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw shape_error("add: shape mismatch " + shape_str(a.shape()) + " vs " +
                      shape_str(b.shape()));
  }
  Tensor out = make_out(a.shape(), a.requires_grad() || b.requires_grad());
  auto o = out.mut();
  for (size_t i = 0; i < o.size(); ++i) o[i] = a.at(i) + b.at(i);
  check_finite(out, "add");
  if (want_record(out)) {
    Tape::active()->record(
        [an = a.node(), bn = b.node(), on = out.node()]() {
          if (an->requires_grad)
            for (size_t i = 0; i < on->grad.size(); ++i) an->grad[i] += on->grad[i];
          if (bn->requires_grad)
            for (size_t i = 0; i < on->grad.size(); ++i) bn->grad[i] += on->grad[i];
        },
        {a.node(), b.node(), out.node()});
  }
  return out;
}

Tensor add_rowvec(const Tensor& mat, const Tensor& vec) {
  require_rank2(mat, "add_rowvec");
  if (vec.rank() != 1 || vec.dim(0) != mat.dim(1)) {
    throw shape_error("add_rowvec: vector " + shape_str(vec.shape()) +
                      " does not match matrix " + shape_str(mat.shape()));
  }
  const size_t m = mat.dim(0), n = mat.dim(1);
  Tensor out = make_out({m, n}, mat.requires_grad() || vec.requires_grad());
  auto o = out.mut();
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < n; ++j) o[i * n + j] = mat.at(i, j) + vec.at(j);
  check_finite(out, "add_rowvec");
  if (want_record(out)) {
    Tape::active()->record(
        [mn = mat.node(), vn = vec.node(), on = out.node(), m, n]() {
          if (mn->requires_grad)
            for (size_t i = 0; i < m * n; ++i) mn->grad[i] += on->grad[i];
          if (vn->requires_grad)
            for (size_t i = 0; i < m; ++i)
              for (size_t j = 0; j < n; ++j) vn->grad[j] += on->grad[i * n + j];
        },
        {mat.node(), vec.node(), out.node()});
  }
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw shape_error("mul: shape mismatch " + shape_str(a.shape()) + " vs " +
                      shape_str(b.shape()));
  }
  Tensor out = make_out(a.shape(), a.requires_grad() || b.requires_grad());
  auto o = out.mut();
  for (size_t i = 0; i < o.size(); ++i) o[i] = a.at(i) * b.at(i);
  check_finite(out, "mul");
  if (want_record(out)) {
    Tape::active()->record(
        [an = a.node(), bn = b.node(), on = out.node()]() {
          if (an->requires_grad)
            for (size_t i = 0; i < on->grad.size(); ++i)
              an->grad[i] += on->grad[i] * bn->data[i];
          if (bn->requires_grad)
            for (size_t i = 0; i < on->grad.size(); ++i)
              bn->grad[i] += on->grad[i] * an->data[i];
        },
        {a.node(), b.node(), out.node()});
  }
  return out;
}

Tensor scale(const Tensor& a, double c) {
  Tensor out = make_out(a.shape(), a.requires_grad());
  auto o = out.mut();
  for (size_t i = 0; i < o.size(); ++i) o[i] = a.at(i) * c;
  check_finite(out, "scale");
  if (want_record(out)) {
    Tape::active()->record(
        [an = a.node(), on = out.node(), c]() {
          for (size_t i = 0; i < on->grad.size(); ++i) an->grad[i] += c * on->grad[i];
        },
        {a.node(), out.node()});
  }
  return out;
}

Tensor relu(const Tensor& a) {
  Tensor out = make_out(a.shape(), a.requires_grad());
  auto o = out.mut();
  for (size_t i = 0; i < o.size(); ++i) o[i] = a.at(i) > 0.0 ? a.at(i) : 0.0;
  check_finite(out, "relu");
  if (want_record(out)) {
    Tape::active()->record(
        [an = a.node(), on = out.node()]() {
          // subgradient at 0 is 0
          for (size_t i = 0; i < on->grad.size(); ++i)
            if (an->data[i] > 0.0) an->grad[i] += on->grad[i];
        },
        {a.node(), out.node()});
  }
  return out;
}

Tensor leaky_relu(const Tensor& a, double slope) {
  Tensor out = make_out(a.shape(), a.requires_grad());
  auto o = out.mut();
  for (size_t i = 0; i < o.size(); ++i) o[i] = a.at(i) > 0.0 ? a.at(i) : slope * a.at(i);
  check_finite(out, "leaky_relu");
  if (want_record(out)) {
    Tape::active()->record(
        [an = a.node(), on = out.node(), slope]() {
          for (size_t i = 0; i < on->grad.size(); ++i)
            an->grad[i] += (an->data[i] > 0.0 ? 1.0 : slope) * on->grad[i];
        },
        {a.node(), out.node()});
  }
  return out;
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  require_rank2(a, "concat_cols");
  require_rank2(b, "concat_cols");
  if (a.dim(0) != b.dim(0)) {
    throw shape_error("concat_cols: row counts differ, " + shape_str(a.shape()) +
                      " vs " + shape_str(b.shape()));
  }
  const size_t m = a.dim(0), p = a.dim(1), q = b.dim(1);
  Tensor out = make_out({m, p + q}, a.requires_grad() || b.requires_grad());
  auto o = out.mut();
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < p; ++j) o[i * (p + q) + j] = a.at(i, j);
    for (size_t j = 0; j < q; ++j) o[i * (p + q) + p + j] = b.at(i, j);
  }
  if (want_record(out)) {
    Tape::active()->record(
        [an = a.node(), bn = b.node(), on = out.node(), m, p, q]() {
          for (size_t i = 0; i < m; ++i) {
            if (an->requires_grad)
              for (size_t j = 0; j < p; ++j)
                an->grad[i * p + j] += on->grad[i * (p + q) + j];
            if (bn->requires_grad)
              for (size_t j = 0; j < q; ++j)
                bn->grad[i * q + j] += on->grad[i * (p + q) + p + j];
          }
        },
        {a.node(), b.node(), out.node()});
  }
  return out;
}

Tensor reshape(const Tensor& a, std::vector<size_t> shape) {
  if (shape_numel(shape) != a.numel()) {
    throw shape_error("reshape: cannot view " + shape_str(a.shape()) + " as " +
                      shape_str(shape));
  }
  Tensor out(std::move(shape),
             std::vector<double>(a.data().begin(), a.data().end()), false);
  out.set_requires_grad(a.requires_grad());
  if (want_record(out)) {
    Tape::active()->record(
        [an = a.node(), on = out.node()]() {
          for (size_t i = 0; i < on->grad.size(); ++i) an->grad[i] += on->grad[i];
        },
        {a.node(), out.node()});
  }
  return out;
}

Tensor gather_rows(const Tensor& a, std::vector<size_t> idx) {
  require_rank2(a, "gather_rows");
  const size_t n = a.dim(0), d = a.dim(1);
  for (size_t i : idx) {
    if (i >= n) throw index_error("gather_rows: row " + std::to_string(i) + " out of range");
  }
  Tensor out = make_out({idx.size(), d}, a.requires_grad());
  auto o = out.mut();
  for (size_t r = 0; r < idx.size(); ++r)
    for (size_t j = 0; j < d; ++j) o[r * d + j] = a.at(idx[r], j);
  if (want_record(out)) {
    Tape::active()->record(
        [an = a.node(), on = out.node(), idx = std::move(idx), d]() {
          for (size_t r = 0; r < idx.size(); ++r)
            for (size_t j = 0; j < d; ++j)
              an->grad[idx[r] * d + j] += on->grad[r * d + j];
        },
        {a.node(), out.node()});
  }
  return out;
}

Tensor mean_rows(const Tensor& a, std::vector<size_t> idx) {
  require_rank2(a, "mean_rows");
  if (idx.empty()) throw contract_error("mean_rows: empty row set");
  const size_t n = a.dim(0), d = a.dim(1);
  for (size_t i : idx) {
    if (i >= n) throw index_error("mean_rows: row " + std::to_string(i) + " out of range");
  }
  Tensor out = make_out({d}, a.requires_grad());
  auto o = out.mut();
  for (size_t r : idx)
    for (size_t j = 0; j < d; ++j) o[j] += a.at(r, j);
  const double inv = 1.0 / static_cast<double>(idx.size());
  for (size_t j = 0; j < d; ++j) o[j] *= inv;
  check_finite(out, "mean_rows");
  if (want_record(out)) {
    Tape::active()->record(
        [an = a.node(), on = out.node(), idx = std::move(idx), d, inv]() {
          for (size_t r : idx)
            for (size_t j = 0; j < d; ++j) an->grad[r * d + j] += inv * on->grad[j];
        },
        {a.node(), out.node()});
  }
  return out;
}

Tensor sum(const Tensor& a) {
  Tensor out = make_out({1}, a.requires_grad());
  double acc = 0.0;
  for (double v : a.data()) acc += v;
  out.mut()[0] = acc;
  check_finite(out, "sum");
  if (want_record(out)) {
    Tape::active()->record(
        [an = a.node(), on = out.node()]() {
          for (size_t i = 0; i < an->grad.size(); ++i) an->grad[i] += on->grad[0];
        },
        {a.node(), out.node()});
  }
  return out;
}

Tensor softmax_rows(const Tensor& a) {
  require_rank2(a, "softmax_rows");
  check_finite(a, "softmax_rows(input)");
  const size_t m = a.dim(0), n = a.dim(1);
  Tensor out = make_out({m, n}, a.requires_grad());
  kern::softmax_rows(m, n, a.data().data(), out.mut().data());
  if (want_record(out)) {
    Tape::active()->record(
        [an = a.node(), on = out.node(), m, n]() {
          for (size_t i = 0; i < m; ++i) {
            double dot = 0.0;
            for (size_t j = 0; j < n; ++j)
              dot += on->grad[i * n + j] * on->data[i * n + j];
            for (size_t j = 0; j < n; ++j)
              an->grad[i * n + j] +=
                  on->data[i * n + j] * (on->grad[i * n + j] - dot);
          }
        },
        {a.node(), out.node()});
  }
  return out;
}

Tensor cross_entropy(const Tensor& logits, const std::vector<int>& labels) {
  require_rank2(logits, "cross_entropy");
  const size_t m = logits.dim(0), c = logits.dim(1);
  if (labels.size() != m) {
    throw shape_error("cross_entropy: " + std::to_string(labels.size()) +
                      " labels for " + std::to_string(m) + " rows");
  }
  for (int l : labels) {
    if (l < 0 || static_cast<size_t>(l) >= c) {
      throw index_error("cross_entropy: label " + std::to_string(l) +
                        " out of range [0, " + std::to_string(c) + ")");
    }
  }
  // softmax probabilities are kept for the backward pass
  auto probs = std::make_shared<std::vector<double>>(m * c);
  kern::softmax_rows(m, c, logits.data().data(), probs->data());
  double loss = 0.0;
  for (size_t i = 0; i < m; ++i) {
    // recompute the stable log-prob directly from logits
    const double* row = logits.data().data() + i * c;
    double mx = row[0];
    for (size_t j = 1; j < c; ++j) mx = std::max(mx, row[j]);
    double z = 0.0;
    for (size_t j = 0; j < c; ++j) z += std::exp(row[j] - mx);
    loss += std::log(z) + mx - row[labels[i]];
  }
  loss /= static_cast<double>(m);
  Tensor out({1}, {loss}, false);
  out.set_requires_grad(logits.requires_grad());
  check_finite(out, "cross_entropy");
  if (want_record(out)) {
    Tape::active()->record(
        [ln = logits.node(), on = out.node(), probs, labels, m, c]() {
          const double g = on->grad[0] / static_cast<double>(m);
          for (size_t i = 0; i < m; ++i) {
            for (size_t j = 0; j < c; ++j) {
              const double onehot = static_cast<size_t>(labels[i]) == j ? 1.0 : 0.0;
              ln->grad[i * c + j] += g * ((*probs)[i * c + j] - onehot);
            }
          }
        },
        {logits.node(), out.node()});
  }
  return out;
}

// --- graph-structured ops -----------------------------------------------

Tensor neighbor_mean(const Csr& g, const Tensor& m, bool use_weights) {
  require_rank2(m, "neighbor_mean");
  const size_t rows = g.rows(), d = m.dim(1);
  if (!g.cols.empty()) {
    const size_t mx = *std::max_element(g.cols.begin(), g.cols.end());
    if (mx >= m.dim(0)) throw index_error("neighbor_mean: csr column exceeds feature rows");
  }
  // a weightless alias drops SIM weights when weighting is disabled
  const Csr* gp = &g;
  Csr unweighted;
  if (!use_weights && !g.weights.empty()) {
    unweighted.offsets = g.offsets;
    unweighted.cols = g.cols;
    unweighted.t_offsets = g.t_offsets;
    unweighted.t_rows = g.t_rows;
    unweighted.t_arc = g.t_arc;
    gp = &unweighted;
  }
  auto norms = std::make_shared<std::vector<double>>(rows);
  kern::row_weight_sums(*gp, norms->data());
  Tensor out = make_out({rows, d}, m.requires_grad());
  kern::neighbor_mean(*gp, d, m.data().data(), norms->data(), out.mut().data());
  check_finite(out, "neighbor_mean");
  if (want_record(out)) {
    // the alias shares g's index arrays; copy what the closure needs
    auto gcopy = std::make_shared<Csr>(*gp);
    Tape::active()->record(
        [mn = m.node(), on = out.node(), gcopy, norms, d]() {
          kern::neighbor_mean_grad(*gcopy, d, on->grad.data(), norms->data(),
                                   mn->grad.data());
        },
        {m.node(), out.node()});
  }
  return out;
}

Tensor edge_logits(const Csr& g, const Tensor& s_dst, const Tensor& s_src) {
  if (s_dst.rank() != 1 || s_dst.dim(0) != g.rows()) {
    throw shape_error("edge_logits: s_dst " + shape_str(s_dst.shape()) +
                      " does not match csr rows");
  }
  if (s_src.rank() != 1 || s_src.dim(0) + 1 != g.t_offsets.size()) {
    throw shape_error("edge_logits: s_src " + shape_str(s_src.shape()) +
                      " does not match csr columns");
  }
  Tensor out = make_out({g.arcs()}, s_dst.requires_grad() || s_src.requires_grad());
  kern::edge_logit_sum(g, s_dst.data().data(), s_src.data().data(), out.mut().data());
  check_finite(out, "edge_logits");
  if (want_record(out)) {
    auto gcopy = std::make_shared<Csr>(g);
    Tape::active()->record(
        [dn = s_dst.node(), sn = s_src.node(), on = out.node(), gcopy]() {
          std::vector<double> gd(dn->data.size(), 0.0), gs(sn->data.size(), 0.0);
          kern::edge_logit_sum_grad(*gcopy, on->grad.data(), gd.data(), gs.data());
          if (dn->requires_grad)
            for (size_t i = 0; i < gd.size(); ++i) dn->grad[i] += gd[i];
          if (sn->requires_grad)
            for (size_t i = 0; i < gs.size(); ++i) sn->grad[i] += gs[i];
        },
        {s_dst.node(), s_src.node(), out.node()});
  }
  return out;
}

Tensor segment_softmax(const Csr& g, const Tensor& e) {
  if (e.rank() != 1 || e.dim(0) != g.arcs()) {
    throw shape_error("segment_softmax: values " + shape_str(e.shape()) +
                      " do not match csr arcs");
  }
  check_finite(e, "segment_softmax(input)");
  Tensor out = make_out({g.arcs()}, e.requires_grad());
  kern::segment_softmax(g, e.data().data(), out.mut().data());
  if (want_record(out)) {
    auto gcopy = std::make_shared<Csr>(g);
    Tape::active()->record(
        [en = e.node(), on = out.node(), gcopy]() {
          std::vector<double> ge(en->data.size(), 0.0);
          kern::segment_softmax_grad(*gcopy, on->data.data(), on->grad.data(), ge.data());
          for (size_t i = 0; i < ge.size(); ++i) en->grad[i] += ge[i];
        },
        {e.node(), out.node()});
  }
  return out;
}

Tensor edge_weighted_sum(const Csr& g, const Tensor& m, const Tensor& alpha) {
  require_rank2(m, "edge_weighted_sum");
  if (alpha.rank() != 1 || alpha.dim(0) != g.arcs()) {
    throw shape_error("edge_weighted_sum: alpha " + shape_str(alpha.shape()) +
                      " does not match csr arcs");
  }
  const size_t rows = g.rows(), d = m.dim(1);
  Tensor out = make_out({rows, d}, m.requires_grad() || alpha.requires_grad());
  kern::edge_weighted_sum(g, d, alpha.data().data(), m.data().data(), out.mut().data());
  check_finite(out, "edge_weighted_sum");
  if (want_record(out)) {
    auto gcopy = std::make_shared<Csr>(g);
    Tape::active()->record(
        [mn = m.node(), an = alpha.node(), on = out.node(), gcopy, d]() {
          if (an->requires_grad) {
            std::vector<double> ga(an->data.size(), 0.0);
            kern::edge_weighted_sum_grad_alpha(*gcopy, d, on->grad.data(),
                                               mn->data.data(), ga.data());
            for (size_t i = 0; i < ga.size(); ++i) an->grad[i] += ga[i];
          }
          if (mn->requires_grad) {
            kern::edge_weighted_sum_grad_m(*gcopy, d, on->grad.data(),
                                           an->data.data(), mn->grad.data());
          }
        },
        {m.node(), alpha.node(), out.node()});
  }
  return out;
}

}  // namespace hetlink
