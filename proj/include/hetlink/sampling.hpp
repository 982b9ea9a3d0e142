#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hetlink/graph.hpp"

namespace hetlink {

enum class Partition { Train, Test };

struct LabeledEdge {
  size_t u, v;  // u < v
  int label;    // 0 = no interaction
};

// Labeled unordered drug pairs for supervision; never a graph structure.
struct LabeledEdgeSet {
  Partition tag = Partition::Train;
  std::vector<LabeledEdge> edges;

  std::vector<std::pair<size_t, size_t>> pairs() const;
  bool contains(size_t u, size_t v) const;
};

// Stratified per class: classes with support >= 2 contribute
// round(support * test_fraction) test pairs, clamped to [1, support-1];
// singleton classes go entirely to train with a warning on stderr.
std::pair<LabeledEdgeSet, LabeledEdgeSet> split_edges(const HeteroGraph& g,
                                                      double test_fraction,
                                                      uint64_t seed);

struct NegativeRegime {
  enum class Kind { None, Fraction, All };
  Kind kind = Kind::None;
  double rho = 0.0;

  static NegativeRegime none() { return {Kind::None, 0.0}; }
  static NegativeRegime fraction(double rho) { return {Kind::Fraction, rho}; }
  static NegativeRegime all() { return {Kind::All, 0.0}; }

  // "none" | "frac:0.1" | "all"
  static NegativeRegime parse(const std::string& s);
  std::string str() const;
};

// Appends class-0 pairs drawn from unordered drug pairs that are not DDI
// edges anywhere (train or test), not in `base`, and not in `exclude`.
// Fraction rho yields floor(|base| * rho / (1 - rho)) negatives so that
// negatives / (positives + negatives) == rho up to rounding; All enumerates
// the entire non-edge pool.
LabeledEdgeSet sample_negatives(const HeteroGraph& g, const LabeledEdgeSet& base,
                                const NegativeRegime& regime, uint64_t seed,
                                const LabeledEdgeSet* exclude = nullptr);

}  // namespace hetlink
