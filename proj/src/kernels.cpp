#include "hetlink/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace hetlink {

void Csr::finalize(size_t n_cols) {
  t_offsets.assign(n_cols + 1, 0);
  t_rows.assign(cols.size(), 0);
  t_arc.assign(cols.size(), 0);
  for (size_t c : cols) ++t_offsets[c + 1];
  for (size_t i = 0; i < n_cols; ++i) t_offsets[i + 1] += t_offsets[i];
  std::vector<size_t> cursor(t_offsets.begin(), t_offsets.end() - 1);
  for (size_t v = 0; v + 1 < offsets.size(); ++v) {
    for (size_t k = offsets[v]; k < offsets[v + 1]; ++k) {
      const size_t slot = cursor[cols[k]]++;
      t_rows[slot] = v;
      t_arc[slot] = k;
    }
  }
}

namespace kern {

void matmul_nn(size_t m, size_t k, size_t n, const double* a, const double* b, double* c) {
#pragma omp parallel for schedule(static)
  for (ptrdiff_t i = 0; i < static_cast<ptrdiff_t>(m); ++i) {
    double* ci = c + i * n;
    std::fill(ci, ci + n, 0.0);
    const double* ai = a + i * k;
    for (size_t p = 0; p < k; ++p) {
      const double av = ai[p];
      const double* bp = b + p * n;
      for (size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

void matmul_nt(size_t m, size_t k, size_t n, const double* a, const double* b, double* c) {
#pragma omp parallel for schedule(static)
  for (ptrdiff_t i = 0; i < static_cast<ptrdiff_t>(m); ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * n;
    for (size_t j = 0; j < n; ++j) {
      const double* bj = b + j * k;
      double acc = 0.0;
      for (size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
      ci[j] = acc;
    }
  }
}

void matmul_tn(size_t m, size_t k, size_t n, const double* a, const double* b, double* c) {
#pragma omp parallel for schedule(static)
  for (ptrdiff_t i = 0; i < static_cast<ptrdiff_t>(m); ++i) {
    double* ci = c + i * n;
    std::fill(ci, ci + n, 0.0);
    for (size_t p = 0; p < k; ++p) {
      const double av = a[p * m + i];
      const double* bp = b + p * n;
      for (size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

void softmax_rows(size_t m, size_t n, const double* x, double* y) {
#pragma omp parallel for schedule(static)
  for (ptrdiff_t i = 0; i < static_cast<ptrdiff_t>(m); ++i) {
    const double* xi = x + i * n;
    double* yi = y + i * n;
    double mx = xi[0];
    for (size_t j = 1; j < n; ++j) mx = std::max(mx, xi[j]);
    double z = 0.0;
    for (size_t j = 0; j < n; ++j) {
      yi[j] = std::exp(xi[j] - mx);
      z += yi[j];
    }
    for (size_t j = 0; j < n; ++j) yi[j] /= z;
  }
}

void row_weight_sums(const Csr& g, double* norms) {
  const size_t rows = g.rows();
#pragma omp parallel for schedule(static)
  for (ptrdiff_t v = 0; v < static_cast<ptrdiff_t>(rows); ++v) {
    double s = 0.0;
    if (g.weights.empty()) {
      s = static_cast<double>(g.offsets[v + 1] - g.offsets[v]);
    } else {
      for (size_t k = g.offsets[v]; k < g.offsets[v + 1]; ++k) s += g.weights[k];
    }
    norms[v] = s;
  }
}

void neighbor_mean(const Csr& g, size_t d, const double* m,
                   const double* norms, double* out) {
  const size_t rows = g.rows();
#pragma omp parallel for schedule(static)
  for (ptrdiff_t v = 0; v < static_cast<ptrdiff_t>(rows); ++v) {
    double* ov = out + v * d;
    std::fill(ov, ov + d, 0.0);
    if (norms[v] == 0.0) continue;
    for (size_t k = g.offsets[v]; k < g.offsets[v + 1]; ++k) {
      const double w = (g.weights.empty() ? 1.0 : g.weights[k]) / norms[v];
      const double* mu = m + g.cols[k] * d;
      for (size_t j = 0; j < d; ++j) ov[j] += w * mu[j];
    }
  }
}

void neighbor_mean_grad(const Csr& g, size_t d, const double* grad_out,
                        const double* norms, double* grad_m) {
  const size_t n_cols = g.t_offsets.size() - 1;
#pragma omp parallel for schedule(static)
  for (ptrdiff_t u = 0; u < static_cast<ptrdiff_t>(n_cols); ++u) {
    double* gu = grad_m + u * d;
    for (size_t t = g.t_offsets[u]; t < g.t_offsets[u + 1]; ++t) {
      const size_t v = g.t_rows[t];
      if (norms[v] == 0.0) continue;
      const double w = (g.weights.empty() ? 1.0 : g.weights[g.t_arc[t]]) / norms[v];
      const double* gv = grad_out + v * d;
      for (size_t j = 0; j < d; ++j) gu[j] += w * gv[j];
    }
  }
}

void segment_softmax(const Csr& g, const double* e, double* alpha) {
  const size_t rows = g.rows();
#pragma omp parallel for schedule(static)
  for (ptrdiff_t v = 0; v < static_cast<ptrdiff_t>(rows); ++v) {
    const size_t lo = g.offsets[v], hi = g.offsets[v + 1];
    if (lo == hi) continue;
    double mx = e[lo];
    for (size_t k = lo + 1; k < hi; ++k) mx = std::max(mx, e[k]);
    double z = 0.0;
    for (size_t k = lo; k < hi; ++k) {
      alpha[k] = std::exp(e[k] - mx);
      z += alpha[k];
    }
    for (size_t k = lo; k < hi; ++k) alpha[k] /= z;
  }
}

void segment_softmax_grad(const Csr& g, const double* alpha,
                          const double* grad_alpha, double* grad_e) {
  const size_t rows = g.rows();
#pragma omp parallel for schedule(static)
  for (ptrdiff_t v = 0; v < static_cast<ptrdiff_t>(rows); ++v) {
    const size_t lo = g.offsets[v], hi = g.offsets[v + 1];
    double dot = 0.0;
    for (size_t k = lo; k < hi; ++k) dot += grad_alpha[k] * alpha[k];
    for (size_t k = lo; k < hi; ++k) grad_e[k] = alpha[k] * (grad_alpha[k] - dot);
  }
}

void edge_weighted_sum(const Csr& g, size_t d, const double* alpha,
                       const double* m, double* out) {
  const size_t rows = g.rows();
#pragma omp parallel for schedule(static)
  for (ptrdiff_t v = 0; v < static_cast<ptrdiff_t>(rows); ++v) {
    double* ov = out + v * d;
    std::fill(ov, ov + d, 0.0);
    for (size_t k = g.offsets[v]; k < g.offsets[v + 1]; ++k) {
      const double w = alpha[k];
      const double* mu = m + g.cols[k] * d;
      for (size_t j = 0; j < d; ++j) ov[j] += w * mu[j];
    }
  }
}

void edge_weighted_sum_grad_alpha(const Csr& g, size_t d, const double* grad_out,
                                  const double* m, double* grad_alpha) {
  const size_t rows = g.rows();
#pragma omp parallel for schedule(static)
  for (ptrdiff_t v = 0; v < static_cast<ptrdiff_t>(rows); ++v) {
    const double* gv = grad_out + v * d;
    for (size_t k = g.offsets[v]; k < g.offsets[v + 1]; ++k) {
      const double* mu = m + g.cols[k] * d;
      double acc = 0.0;
      for (size_t j = 0; j < d; ++j) acc += gv[j] * mu[j];
      grad_alpha[k] = acc;
    }
  }
}

void edge_weighted_sum_grad_m(const Csr& g, size_t d, const double* grad_out,
                              const double* alpha, double* grad_m) {
  const size_t n_cols = g.t_offsets.size() - 1;
#pragma omp parallel for schedule(static)
  for (ptrdiff_t u = 0; u < static_cast<ptrdiff_t>(n_cols); ++u) {
    double* gu = grad_m + u * d;
    for (size_t t = g.t_offsets[u]; t < g.t_offsets[u + 1]; ++t) {
      const double w = alpha[g.t_arc[t]];
      const double* gv = grad_out + g.t_rows[t] * d;
      for (size_t j = 0; j < d; ++j) gu[j] += w * gv[j];
    }
  }
}

void edge_logit_sum(const Csr& g, const double* s_dst, const double* s_src, double* e) {
  const size_t rows = g.rows();
#pragma omp parallel for schedule(static)
  for (ptrdiff_t v = 0; v < static_cast<ptrdiff_t>(rows); ++v) {
    for (size_t k = g.offsets[v]; k < g.offsets[v + 1]; ++k) {
      e[k] = s_dst[v] + s_src[g.cols[k]];
    }
  }
}

void edge_logit_sum_grad(const Csr& g, const double* grad_e,
                         double* grad_dst, double* grad_src) {
  const size_t rows = g.rows();
  const size_t n_cols = g.t_offsets.size() - 1;
#pragma omp parallel for schedule(static)
  for (ptrdiff_t v = 0; v < static_cast<ptrdiff_t>(rows); ++v) {
    double s = 0.0;
    for (size_t k = g.offsets[v]; k < g.offsets[v + 1]; ++k) s += grad_e[k];
    grad_dst[v] += s;
  }
#pragma omp parallel for schedule(static)
  for (ptrdiff_t u = 0; u < static_cast<ptrdiff_t>(n_cols); ++u) {
    double s = 0.0;
    for (size_t t = g.t_offsets[u]; t < g.t_offsets[u + 1]; ++t) s += grad_e[g.t_arc[t]];
    grad_src[u] += s;
  }
}

void tanimoto_all_pairs(size_t n, size_t words, const uint64_t* fps, double* sims) {
#pragma omp parallel for schedule(static)
  for (ptrdiff_t i = 0; i < static_cast<ptrdiff_t>(n); ++i) {
    const uint64_t* fi = fps + i * words;
    sims[i * n + i] = 1.0;
    for (size_t j = i + 1; j < n; ++j) {
      const uint64_t* fj = fps + j * words;
      uint64_t inter = 0, uni = 0;
      for (size_t w = 0; w < words; ++w) {
        inter += std::popcount(fi[w] & fj[w]);
        uni += std::popcount(fi[w] | fj[w]);
      }
      const double s = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
      sims[i * n + j] = s;
      sims[j * n + i] = s;
    }
  }
}

namespace ref {

void matmul_nn(size_t m, size_t k, size_t n, const double* a, const double* b, double* c) {
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (size_t p = 0; p < k; ++p) acc += a[i * k + p] * b[p * n + j];
      c[i * n + j] = acc;
    }
  }
}

void matmul_nt(size_t m, size_t k, size_t n, const double* a, const double* b, double* c) {
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (size_t p = 0; p < k; ++p) acc += a[i * k + p] * b[j * k + p];
      c[i * n + j] = acc;
    }
  }
}

void matmul_tn(size_t m, size_t k, size_t n, const double* a, const double* b, double* c) {
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (size_t p = 0; p < k; ++p) acc += a[p * m + i] * b[p * n + j];
      c[i * n + j] = acc;
    }
  }
}

void softmax_rows(size_t m, size_t n, const double* x, double* y) {
  for (size_t i = 0; i < m; ++i) {
    const double* xi = x + i * n;
    double* yi = y + i * n;
    double mx = xi[0];
    for (size_t j = 1; j < n; ++j) mx = std::max(mx, xi[j]);
    double z = 0.0;
    for (size_t j = 0; j < n; ++j) {
      yi[j] = std::exp(xi[j] - mx);
      z += yi[j];
    }
    for (size_t j = 0; j < n; ++j) yi[j] /= z;
  }
}

void neighbor_mean(const Csr& g, size_t d, const double* m,
                   const double* norms, double* out) {
  for (size_t v = 0; v < g.rows(); ++v) {
    double* ov = out + v * d;
    std::fill(ov, ov + d, 0.0);
    if (norms[v] == 0.0) continue;
    for (size_t k = g.offsets[v]; k < g.offsets[v + 1]; ++k) {
      const double w = (g.weights.empty() ? 1.0 : g.weights[k]) / norms[v];
      const double* mu = m + g.cols[k] * d;
      for (size_t j = 0; j < d; ++j) ov[j] += w * mu[j];
    }
  }
}

void segment_softmax(const Csr& g, const double* e, double* alpha) {
  for (size_t v = 0; v < g.rows(); ++v) {
    const size_t lo = g.offsets[v], hi = g.offsets[v + 1];
    if (lo == hi) continue;
    double mx = e[lo];
    for (size_t k = lo + 1; k < hi; ++k) mx = std::max(mx, e[k]);
    double z = 0.0;
    for (size_t k = lo; k < hi; ++k) {
      alpha[k] = std::exp(e[k] - mx);
      z += alpha[k];
    }
    for (size_t k = lo; k < hi; ++k) alpha[k] /= z;
  }
}

void edge_weighted_sum(const Csr& g, size_t d, const double* alpha,
                       const double* m, double* out) {
  for (size_t v = 0; v < g.rows(); ++v) {
    double* ov = out + v * d;
    std::fill(ov, ov + d, 0.0);
    for (size_t k = g.offsets[v]; k < g.offsets[v + 1]; ++k) {
      for (size_t j = 0; j < d; ++j) ov[j] += alpha[k] * m[g.cols[k] * d + j];
    }
  }
}

void tanimoto_all_pairs(size_t n, size_t words, const uint64_t* fps, double* sims) {
  for (size_t i = 0; i < n; ++i) {
    sims[i * n + i] = 1.0;
    for (size_t j = i + 1; j < n; ++j) {
      uint64_t inter = 0, uni = 0;
      for (size_t w = 0; w < words; ++w) {
        inter += std::popcount(fps[i * words + w] & fps[j * words + w]);
        uni += std::popcount(fps[i * words + w] | fps[j * words + w]);
      }
      const double s = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
      sims[i * n + j] = s;
      sims[j * n + i] = s;
    }
  }
}

}  // namespace ref
}  // namespace kern
}  // namespace hetlink
