#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hetlink/graph.hpp"
#include "hetlink/tensor.hpp"

namespace hetlink {

// Dense per-node embedding matrix; row i belongs to dense node index i.
struct NodeFeatures {
  NodeType type = NodeType::Drug;
  Tensor matrix;  // [n x d]

  size_t dim() const { return matrix.cols(); }
};

// Rows whose IDs are not in the table are skipped (drug and protein features
// may share one file); every table ID must be covered. Dimension is inferred
// from the first matching row and enforced thereafter.
NodeFeatures load_features(const std::string& path, const NodeTable& table,
                           bool allow_zero_rows = false);

struct Fingerprint {
  std::string id;
  size_t nbits = 0;
  std::vector<uint64_t> words;

  static Fingerprint from_bitstring(std::string id, const std::string& bits);
  bool bit(size_t i) const { return (words[i / 64] >> (i % 64)) & 1u; }
  size_t popcount() const;
};

std::vector<Fingerprint> load_fingerprints(const std::string& path);

// |a & b| / |a | b|; two all-zero fingerprints score 0.
double tanimoto(const Fingerprint& a, const Fingerprint& b);

struct SimEdge {
  size_t i, j;  // indices into the input list, i < j
  double weight;
};

// Every unordered pair with similarity strictly above tau, ordered by (i, j).
std::vector<SimEdge> build_similarity_edges(const std::vector<Fingerprint>& fps,
                                            double tau);

// Cosine-over-embeddings alternative; rows index the feature matrix.
std::vector<SimEdge> build_similarity_edges_cosine(const Tensor& features, double tau);

}  // namespace hetlink
