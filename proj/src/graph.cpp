#include "hetlink/graph.hpp"

#include <algorithm>
#include <map>

namespace hetlink {

const char* node_type_name(NodeType t) {
  return t == NodeType::Drug ? "drug" : "protein";
}

const char* rel_name(Rel r) {
  switch (r) {
    case Rel::DDI: return "ddi";
    case Rel::DPI: return "dpi";
    case Rel::PPI: return "ppi";
    case Rel::SIM: return "sim";
  }
  return "?";
}

std::optional<NodeType> parse_node_type(const std::string& s) {
  if (s == "drug") return NodeType::Drug;
  if (s == "protein") return NodeType::Protein;
  return std::nullopt;
}

std::optional<Rel> parse_rel(const std::string& s) {
  if (s == "ddi") return Rel::DDI;
  if (s == "dpi") return Rel::DPI;
  if (s == "ppi") return Rel::PPI;
  if (s == "sim") return Rel::SIM;
  return std::nullopt;
}

NodeType rel_src_type(Rel r) {
  return r == Rel::PPI ? NodeType::Protein : NodeType::Drug;
}

NodeType rel_dst_type(Rel r) {
  return (r == Rel::DDI || r == Rel::SIM) ? NodeType::Drug : NodeType::Protein;
}

NodeTable NodeTable::build(NodeType type, std::vector<std::string> ids) {
  NodeTable t;
  t.type = type;
  t.ids = std::move(ids);
  t.index.reserve(t.ids.size());
  for (size_t i = 0; i < t.ids.size(); ++i) {
    if (!t.index.emplace(t.ids[i], i).second) {
      throw data_error(std::string("duplicate ") + node_type_name(type) +
                       " id: " + t.ids[i]);
    }
  }
  return t;
}

std::optional<size_t> NodeTable::find(const std::string& id) const {
  auto it = index.find(id);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

size_t NodeTable::require(const std::string& id) const {
  auto it = index.find(id);
  if (it == index.end()) {
    throw data_error(std::string("unknown ") + node_type_name(type) + " id: " + id);
  }
  return it->second;
}

namespace {

struct Arc {
  size_t row, col;
  double weight;
  int label;
};

// Sorted symmetric arc list -> CSR with ascending neighbor order per row.
Csr arcs_to_csr(size_t n_rows, size_t n_cols, std::vector<Arc>& arcs,
                bool with_weights, std::vector<int>* labels_out) {
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  Csr g;
  g.offsets.assign(n_rows + 1, 0);
  g.cols.reserve(arcs.size());
  if (with_weights) g.weights.reserve(arcs.size());
  if (labels_out) labels_out->reserve(arcs.size());
  for (const Arc& a : arcs) ++g.offsets[a.row + 1];
  for (size_t i = 0; i < n_rows; ++i) g.offsets[i + 1] += g.offsets[i];
  for (const Arc& a : arcs) {
    g.cols.push_back(a.col);
    if (with_weights) g.weights.push_back(a.weight);
    if (labels_out) labels_out->push_back(a.label);
  }
  g.finalize(n_cols);
  return g;
}

}  // namespace

HeteroGraph HeteroGraph::build(NodeTable drugs, NodeTable proteins,
                               const std::vector<EdgeInput>& edges) {
  if (drugs.type != NodeType::Drug || proteins.type != NodeType::Protein) {
    throw contract_error("build: node tables passed in wrong order");
  }
  HeteroGraph g;
  g.drugs_ = std::move(drugs);
  g.proteins_ = std::move(proteins);

  struct PairInfo {
    int label = 0;
    double weight = 0.0;
  };
  // keyed (u, v) with u < v inside each relation; map keeps dedup deterministic
  std::map<std::pair<size_t, size_t>, PairInfo> uniq[4];

  for (const EdgeInput& e : edges) {
    const NodeTable& st = g.nodes(rel_src_type(e.rel));
    const NodeTable& dt = g.nodes(rel_dst_type(e.rel));
    // resolution against the declared endpoint types doubles as the schema
    // check: a DDI row naming a protein fails drug resolution
    auto si = st.find(e.src);
    auto di = dt.find(e.dst);
    if (!si || !di) {
      const std::string& missing = !si ? e.src : e.dst;
      const NodeTable& other = g.nodes(!si ? rel_dst_type(e.rel) : rel_src_type(e.rel));
      if (other.find(missing)) {
        throw data_error(std::string(rel_name(e.rel)) + " edge " + e.src + " -- " +
                         e.dst + ": " + missing + " is not a " +
                         node_type_name((!si ? st : dt).type));
      }
      throw data_error(std::string(rel_name(e.rel)) + " edge references unknown id: " +
                       missing);
    }
    size_t u = *si, v = *di;
    if (rel_src_type(e.rel) == rel_dst_type(e.rel)) {
      if (u == v) {
        throw data_error(std::string(rel_name(e.rel)) + " self-loop on " + e.src);
      }
      if (u > v) std::swap(u, v);
    }
    PairInfo info;
    if (e.rel == Rel::DDI) {
      if (!e.label) throw data_error("ddi edge " + e.src + " -- " + e.dst + " has no class label");
      if (*e.label < 1) {
        throw data_error("ddi edge " + e.src + " -- " + e.dst + ": label " +
                         std::to_string(*e.label) + " outside 1..C (0 is reserved)");
      }
      info.label = *e.label;
    } else if (e.rel == Rel::SIM) {
      if (!e.weight) throw data_error("sim edge " + e.src + " -- " + e.dst + " has no weight");
      info.weight = *e.weight;
    }
    auto [it, inserted] = uniq[static_cast<int>(e.rel)].emplace(std::make_pair(u, v), info);
    if (!inserted) {
      if (e.rel == Rel::DDI && it->second.label != info.label) {
        throw data_error("conflicting labels for duplicate ddi edge " + e.src +
                         " -- " + e.dst);
      }
      if (e.rel == Rel::SIM && it->second.weight != info.weight) {
        throw data_error("conflicting weights for duplicate sim edge " + e.src +
                         " -- " + e.dst);
      }
      // exact duplicate collapses silently
    }
  }

  const size_t nd = g.drugs_.size(), np = g.proteins_.size();

  auto build_sym = [](size_t n, const std::map<std::pair<size_t, size_t>, PairInfo>& m,
                      bool with_weights, std::vector<int>* labels) {
    std::vector<Arc> arcs;
    arcs.reserve(m.size() * 2);
    for (const auto& [pr, info] : m) {
      arcs.push_back({pr.first, pr.second, info.weight, info.label});
      arcs.push_back({pr.second, pr.first, info.weight, info.label});
    }
    return arcs_to_csr(n, n, arcs, with_weights, labels);
  };

  g.ddi_ = build_sym(nd, uniq[static_cast<int>(Rel::DDI)], false, &g.ddi_labels_);
  g.sim_ = build_sym(nd, uniq[static_cast<int>(Rel::SIM)], true, nullptr);
  g.ppi_ = build_sym(np, uniq[static_cast<int>(Rel::PPI)], false, nullptr);

  {
    const auto& dpi = uniq[static_cast<int>(Rel::DPI)];
    std::vector<Arc> dp, pd;
    dp.reserve(dpi.size());
    pd.reserve(dpi.size());
    for (const auto& [pr, info] : dpi) {
      dp.push_back({pr.first, pr.second, 0.0, 0});
      pd.push_back({pr.second, pr.first, 0.0, 0});
    }
    g.dpi_drug_rows_ = arcs_to_csr(nd, np, dp, false, nullptr);
    g.dpi_protein_rows_ = arcs_to_csr(np, nd, pd, false, nullptr);
  }

  for (const auto& [pr, info] : uniq[static_cast<int>(Rel::DDI)]) {
    g.ddi_pairs_.push_back({pr.first, pr.second, info.label});
    g.ddi_pair_set_.insert(pair_key(pr.first, pr.second));
  }
  return g;
}

const Csr& HeteroGraph::view(Rel r, NodeType rows_side) const {
  if (probe_) probe_(r, rows_side);
  switch (r) {
    case Rel::DDI:
      if (rows_side != NodeType::Drug) throw index_error("ddi has no protein side");
      return ddi_;
    case Rel::SIM:
      if (rows_side != NodeType::Drug) throw index_error("sim has no protein side");
      return sim_;
    case Rel::PPI:
      if (rows_side != NodeType::Protein) throw index_error("ppi has no drug side");
      return ppi_;
    case Rel::DPI:
      return rows_side == NodeType::Drug ? dpi_drug_rows_ : dpi_protein_rows_;
  }
  throw index_error("bad relation");
}

std::vector<HeteroGraph::Neighbor> HeteroGraph::neighbors(Rel r, NodeType rows_side,
                                                          size_t node) const {
  const Csr& g = view(r, rows_side);
  if (node >= g.rows()) {
    throw index_error(std::string(rel_name(r)) + ": node " + std::to_string(node) +
                      " out of range");
  }
  std::vector<Neighbor> out;
  out.reserve(g.offsets[node + 1] - g.offsets[node]);
  for (size_t k = g.offsets[node]; k < g.offsets[node + 1]; ++k) {
    out.push_back({g.cols[k], g.weights.empty() ? 1.0 : g.weights[k]});
  }
  return out;
}

HeteroGraph HeteroGraph::without_ddi(
    const std::vector<std::pair<size_t, size_t>>& pairs) const {
  std::unordered_set<uint64_t> drop;
  drop.reserve(pairs.size());
  for (auto [u, v] : pairs) drop.insert(pair_key(u, v));

  HeteroGraph g;
  g.drugs_ = drugs_;
  g.proteins_ = proteins_;
  g.sim_ = sim_;
  g.ppi_ = ppi_;
  g.dpi_drug_rows_ = dpi_drug_rows_;
  g.dpi_protein_rows_ = dpi_protein_rows_;

  std::vector<Arc> arcs;
  arcs.reserve(ddi_.arcs());
  for (size_t v = 0; v < ddi_.rows(); ++v) {
    for (size_t k = ddi_.offsets[v]; k < ddi_.offsets[v + 1]; ++k) {
      const size_t u = ddi_.cols[k];
      if (drop.count(pair_key(v, u))) continue;
      arcs.push_back({v, u, 0.0, ddi_labels_[k]});
    }
  }
  g.ddi_ = arcs_to_csr(drugs_.size(), drugs_.size(), arcs, false, &g.ddi_labels_);
  for (const DdiPair& p : ddi_pairs_) {
    if (drop.count(pair_key(p.u, p.v))) continue;
    g.ddi_pairs_.push_back(p);
    g.ddi_pair_set_.insert(pair_key(p.u, p.v));
  }
  return g;
}

std::vector<EdgeInput> HeteroGraph::edge_dump() const {
  std::vector<EdgeInput> out;
  for (const DdiPair& p : ddi_pairs_) {
    out.push_back({drugs_.ids[p.u], drugs_.ids[p.v], Rel::DDI, p.label, std::nullopt});
  }
  for (size_t v = 0; v < dpi_drug_rows_.rows(); ++v) {
    for (size_t k = dpi_drug_rows_.offsets[v]; k < dpi_drug_rows_.offsets[v + 1]; ++k) {
      out.push_back({drugs_.ids[v], proteins_.ids[dpi_drug_rows_.cols[k]], Rel::DPI,
                     std::nullopt, std::nullopt});
    }
  }
  for (size_t v = 0; v < ppi_.rows(); ++v) {
    for (size_t k = ppi_.offsets[v]; k < ppi_.offsets[v + 1]; ++k) {
      if (ppi_.cols[k] < v) continue;  // emit each unordered pair once
      out.push_back({proteins_.ids[v], proteins_.ids[ppi_.cols[k]], Rel::PPI,
                     std::nullopt, std::nullopt});
    }
  }
  for (size_t v = 0; v < sim_.rows(); ++v) {
    for (size_t k = sim_.offsets[v]; k < sim_.offsets[v + 1]; ++k) {
      if (sim_.cols[k] < v) continue;
      out.push_back({drugs_.ids[v], drugs_.ids[sim_.cols[k]], Rel::SIM, std::nullopt,
                     sim_.weights[k]});
    }
  }
  return out;
}

HeteroGraph::Stats HeteroGraph::stats() const {
  Stats s;
  s.drugs = drugs_.size();
  s.proteins = proteins_.size();
  s.ddi_pairs = ddi_pairs_.size();
  s.dpi_edges = dpi_drug_rows_.arcs();
  s.ppi_edges = ppi_.arcs() / 2;
  s.sim_edges = sim_.arcs() / 2;
  s.ordered_drug_pairs = s.drugs * (s.drugs - (s.drugs ? 1 : 0));
  s.unordered_drug_pairs = s.ordered_drug_pairs / 2;
  s.non_edge_pairs = s.unordered_drug_pairs - s.ddi_pairs;
  return s;
}

}  // namespace hetlink
