#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

// Data-parallel inner loops shared by the tensor engine, the encoder layers
// and the fingerprint similarity pass. Every kernel is parallelized over
// output rows/segments only, so results are bit-identical to the serial
// reference in kern::ref for any thread count. The reference versions stay
// around as test oracles and as the baseline for the benchmark target.

namespace hetlink {

// Compressed sparse rows of one relation, oriented so that row v lists the
// neighbors messages are gathered FROM when aggregating INTO v.
struct Csr {
  std::vector<size_t> offsets;  // size rows+1
  std::vector<size_t> cols;
  std::vector<double> weights;  // empty, or one weight per arc

  // Transpose with arc back-references; filled by finalize().
  std::vector<size_t> t_offsets;  // size n_cols+1
  std::vector<size_t> t_rows;     // original row of each transposed arc
  std::vector<size_t> t_arc;      // original arc position

  size_t rows() const { return offsets.empty() ? 0 : offsets.size() - 1; }
  size_t arcs() const { return cols.size(); }

  void finalize(size_t n_cols);
};

namespace kern {

// C[m x n] = A[m x k] * B[k x n]
void matmul_nn(size_t m, size_t k, size_t n, const double* a, const double* b, double* c);
// C[m x n] = A[m x k] * B[n x k]^T
void matmul_nt(size_t m, size_t k, size_t n, const double* a, const double* b, double* c);
// C[m x n] = A[k x m]^T * B[k x n]
void matmul_tn(size_t m, size_t k, size_t n, const double* a, const double* b, double* c);

// Row-wise softmax with per-row max shift.
void softmax_rows(size_t m, size_t n, const double* x, double* y);

// out[v] = sum_{arcs k of row v} w_k * m[col_k] / norm_v, zero row when the
// neighborhood is empty. norms must hold the per-row weight sums.
void neighbor_mean(const Csr& g, size_t d, const double* m,
                   const double* norms, double* out);
// grad_m[u] += sum over incoming arcs (w/norm_row) * grad_out[row]
void neighbor_mean_grad(const Csr& g, size_t d, const double* grad_out,
                        const double* norms, double* grad_m);
void row_weight_sums(const Csr& g, double* norms);

// Softmax within each CSR row segment of e.
void segment_softmax(const Csr& g, const double* e, double* alpha);
void segment_softmax_grad(const Csr& g, const double* alpha,
                          const double* grad_alpha, double* grad_e);

// out[v] = sum_{arcs k of row v} alpha_k * m[col_k]
void edge_weighted_sum(const Csr& g, size_t d, const double* alpha,
                       const double* m, double* out);
void edge_weighted_sum_grad_alpha(const Csr& g, size_t d, const double* grad_out,
                                  const double* m, double* grad_alpha);
void edge_weighted_sum_grad_m(const Csr& g, size_t d, const double* grad_out,
                              const double* alpha, double* grad_m);

// e[arc] = s_dst[row(arc)] + s_src[col(arc)]
void edge_logit_sum(const Csr& g, const double* s_dst, const double* s_src, double* e);
void edge_logit_sum_grad(const Csr& g, const double* grad_e,
                         double* grad_dst, double* grad_src);

// Tanimoto over packed bit rows: fps is n rows of `words` uint64 each.
// sims[i*n+j] receives |a&b| / |a|b|, 0 for two empty fingerprints.
void tanimoto_all_pairs(size_t n, size_t words, const uint64_t* fps, double* sims);

namespace ref {

// Serial references, same contracts as above.
void matmul_nn(size_t m, size_t k, size_t n, const double* a, const double* b, double* c);
void matmul_nt(size_t m, size_t k, size_t n, const double* a, const double* b, double* c);
void matmul_tn(size_t m, size_t k, size_t n, const double* a, const double* b, double* c);
void softmax_rows(size_t m, size_t n, const double* x, double* y);
void neighbor_mean(const Csr& g, size_t d, const double* m,
                   const double* norms, double* out);
void segment_softmax(const Csr& g, const double* e, double* alpha);
void edge_weighted_sum(const Csr& g, size_t d, const double* alpha,
                       const double* m, double* out);
void tanimoto_all_pairs(size_t n, size_t words, const uint64_t* fps, double* sims);

}  // namespace ref

}  // namespace kern
}  // namespace hetlink
