#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hetlink/error.hpp"
#include "hetlink/kernels.hpp"

namespace hetlink {

enum class NodeType { Drug = 0, Protein = 1 };
enum class Rel { DDI = 0, DPI = 1, PPI = 2, SIM = 3 };

const char* node_type_name(NodeType t);
const char* rel_name(Rel r);
std::optional<NodeType> parse_node_type(const std::string& s);
std::optional<Rel> parse_rel(const std::string& s);

NodeType rel_src_type(Rel r);
NodeType rel_dst_type(Rel r);

// External string IDs mapped to dense 0..n-1 indices, one table per type.
struct NodeTable {
  NodeType type = NodeType::Drug;
  std::vector<std::string> ids;
  std::unordered_map<std::string, size_t> index;

  static NodeTable build(NodeType type, std::vector<std::string> ids);

  size_t size() const { return ids.size(); }
  std::optional<size_t> find(const std::string& id) const;
  size_t require(const std::string& id) const;
};

// One edge row as it appears in edges.tsv, before resolution.
struct EdgeInput {
  std::string src;
  std::string dst;
  Rel rel = Rel::DDI;
  std::optional<int> label;      // DDI: class in 1..C
  std::optional<double> weight;  // SIM: similarity weight
};

// Canonical unordered positive pair.
struct DdiPair {
  size_t u, v;  // u < v
  int label;
};

inline uint64_t pair_key(size_t u, size_t v) {
  if (u > v) std::swap(u, v);
  return (static_cast<uint64_t>(u) << 32) | static_cast<uint64_t>(v);
}

// Immutable typed graph: per-relation CSR with both arcs of every undirected
// edge. DPI is kept as two row orientations so either side can aggregate.
class HeteroGraph {
 public:
  static HeteroGraph build(NodeTable drugs, NodeTable proteins,
                           const std::vector<EdgeInput>& edges);

  const NodeTable& nodes(NodeType t) const {
    return t == NodeType::Drug ? drugs_ : proteins_;
  }
  size_t count(NodeType t) const { return nodes(t).size(); }

  // Adjacency oriented with `rows_side` as the aggregation target. Fires the
  // view probe; encoder layers reach arcs only through here.
  const Csr& view(Rel r, NodeType rows_side) const;
  const Csr& view(Rel r) const { return view(r, rel_src_type(r)); }

  // Per-arc DDI class labels, aligned with view(DDI).
  std::span<const int> ddi_arc_labels() const { return ddi_labels_; }

  struct Neighbor {
    size_t index;
    double weight;
  };
  // Ascending neighbor indices; O(1) slice lookup into the CSR.
  std::vector<Neighbor> neighbors(Rel r, NodeType rows_side, size_t node) const;
  std::vector<Neighbor> neighbors(Rel r, size_t node) const {
    return neighbors(r, rel_src_type(r), node);
  }

  const std::vector<DdiPair>& ddi_pairs() const { return ddi_pairs_; }
  bool has_ddi(size_t u, size_t v) const {
    return ddi_pair_set_.count(pair_key(u, v)) > 0;
  }

  // Copy of this graph with the given unordered drug pairs dropped from the
  // DDI relation (both arcs); used to keep test edges out of message passing.
  HeteroGraph without_ddi(const std::vector<std::pair<size_t, size_t>>& pairs) const;

  // Round-trip edge dump: one row per unordered pair, external IDs.
  std::vector<EdgeInput> edge_dump() const;

  struct Stats {
    size_t drugs = 0, proteins = 0;
    size_t ddi_pairs = 0, dpi_edges = 0, ppi_edges = 0, sim_edges = 0;
    size_t ordered_drug_pairs = 0;    // n*(n-1), the all-ordered-pairs convention
    size_t unordered_drug_pairs = 0;  // n*(n-1)/2, the convention used here
    size_t non_edge_pairs = 0;        // unordered pairs with no DDI edge
  };
  Stats stats() const;

  // Test instrumentation: observes every view() access on this graph.
  using ViewProbe = std::function<void(Rel, NodeType)>;
  void set_view_probe(ViewProbe probe) const { probe_ = std::move(probe); }

 private:
  NodeTable drugs_, proteins_;
  Csr ddi_, sim_, ppi_, dpi_drug_rows_, dpi_protein_rows_;
  std::vector<int> ddi_labels_;
  std::vector<DdiPair> ddi_pairs_;
  std::unordered_set<uint64_t> ddi_pair_set_;
  mutable ViewProbe probe_;
};

}  // namespace hetlink
