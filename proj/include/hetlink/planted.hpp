#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hetlink/features.hpp"
#include "hetlink/graph.hpp"

namespace hetlink {

// Synthetic dataset with recoverable structure: drugs fall into clusters,
// the class of a pair is a fixed function of the two clusters (residue 0
// means no edge), features are cluster centroids plus Gaussian noise, and
// DPI/PPI wiring follows the clusters so protein paths carry class signal.
struct PlantedSpec {
  size_t n_drugs = 60;
  size_t n_proteins = 40;
  size_t class_count = 3;
  size_t clusters_per_class = 2;  // total clusters = clusters_per_class * (C+1)
  size_t feature_dim = 16;
  double noise = 0.05;
  uint64_t seed = 1;
  size_t fingerprint_bits = 128;

  size_t clusters() const { return clusters_per_class * (class_count + 1); }
};

struct PlantedData {
  PlantedSpec spec;
  NodeTable drugs;
  NodeTable proteins;
  std::vector<EdgeInput> edges;
  std::vector<std::vector<double>> drug_features;
  std::vector<std::vector<double>> protein_features;
  std::vector<Fingerprint> fingerprints;
  std::vector<size_t> drug_cluster;
  std::vector<size_t> protein_cluster;

  // Planted class of a drug pair, 0 when the pair has no edge.
  int pair_class(size_t u, size_t v) const;
};

PlantedData generate_planted(const PlantedSpec& spec);

// Writes nodes.tsv, edges.tsv, features.tsv, fingerprints.tsv and truth.tsv
// into the directory; byte-identical output for identical specs.
void write_planted(const PlantedData& data, const std::string& dir);

}  // namespace hetlink
