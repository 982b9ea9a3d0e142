#include "hetlink/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_set>

#include "hetlink/rng.hpp"

namespace hetlink {

std::vector<std::pair<size_t, size_t>> LabeledEdgeSet::pairs() const {
  std::vector<std::pair<size_t, size_t>> out;
  out.reserve(edges.size());
  for (const LabeledEdge& e : edges) out.emplace_back(e.u, e.v);
  return out;
}

bool LabeledEdgeSet::contains(size_t u, size_t v) const {
  const uint64_t key = pair_key(u, v);
  for (const LabeledEdge& e : edges) {
    if (pair_key(e.u, e.v) == key) return true;
  }
  return false;
}

std::pair<LabeledEdgeSet, LabeledEdgeSet> split_edges(const HeteroGraph& g,
                                                      double test_fraction,
                                                      uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw config_error("split_edges: test_fraction must lie in (0, 1)");
  }
  // group pair indices per class; map iteration keeps class order stable
  std::map<int, std::vector<size_t>> by_class;
  const auto& pairs = g.ddi_pairs();
  for (size_t i = 0; i < pairs.size(); ++i) by_class[pairs[i].label].push_back(i);

  LabeledEdgeSet train{Partition::Train, {}};
  LabeledEdgeSet test{Partition::Test, {}};
  Rng rng(seed);
  for (auto& [label, idx] : by_class) {
    if (idx.size() < 2) {
      std::fprintf(stderr,
                   "warning: ddi class %d has support %zu; kept entirely in train\n",
                   label, idx.size());
      for (size_t i : idx) train.edges.push_back({pairs[i].u, pairs[i].v, label});
      continue;
    }
    rng.shuffle(idx);
    size_t n_test = static_cast<size_t>(
        std::floor(static_cast<double>(idx.size()) * test_fraction + 0.5));
    n_test = std::max<size_t>(n_test, 1);
    n_test = std::min(n_test, idx.size() - 1);
    for (size_t k = 0; k < idx.size(); ++k) {
      auto& dst = k < n_test ? test : train;
      dst.edges.push_back({pairs[idx[k]].u, pairs[idx[k]].v, label});
    }
  }
  auto by_pair = [](const LabeledEdge& a, const LabeledEdge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  };
  std::sort(train.edges.begin(), train.edges.end(), by_pair);
  std::sort(test.edges.begin(), test.edges.end(), by_pair);
  return {std::move(train), std::move(test)};
}

NegativeRegime NegativeRegime::parse(const std::string& s) {
  if (s == "none") return none();
  if (s == "all") return all();
  if (s.rfind("frac:", 0) == 0) {
    double rho = 0.0;
    try {
      rho = std::stod(s.substr(5));
    } catch (const std::exception&) {
      throw config_error("negative regime: cannot parse ratio in '" + s + "'");
    }
    if (!(rho > 0.0 && rho < 1.0)) {
      throw config_error("negative regime: ratio must lie in (0, 1), got " + s);
    }
    return fraction(rho);
  }
  throw config_error("negative regime: expected none | frac:<rho> | all, got '" + s + "'");
}

std::string NegativeRegime::str() const {
  switch (kind) {
    case Kind::None: return "none";
    case Kind::All: return "all";
    case Kind::Fraction: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "frac:%g", rho);
      return buf;
    }
  }
  return "none";
}

LabeledEdgeSet sample_negatives(const HeteroGraph& g, const LabeledEdgeSet& base,
                                const NegativeRegime& regime, uint64_t seed,
                                const LabeledEdgeSet* exclude) {
  if (regime.kind == NegativeRegime::Kind::None) return base;
  if (regime.kind == NegativeRegime::Kind::Fraction &&
      !(regime.rho > 0.0 && regime.rho < 1.0)) {
    throw config_error("sample_negatives: fraction must lie in (0, 1)");
  }

  const size_t n = g.count(NodeType::Drug);
  std::unordered_set<uint64_t> taken;
  taken.reserve(base.edges.size() + (exclude ? exclude->edges.size() : 0));
  for (const LabeledEdge& e : base.edges) taken.insert(pair_key(e.u, e.v));
  if (exclude) {
    for (const LabeledEdge& e : exclude->edges) taken.insert(pair_key(e.u, e.v));
  }
  auto is_free = [&](size_t u, size_t v) {
    return !g.has_ddi(u, v) && !taken.count(pair_key(u, v));
  };

  LabeledEdgeSet out = base;

  if (regime.kind == NegativeRegime::Kind::All) {
    for (size_t u = 0; u < n; ++u) {
      for (size_t v = u + 1; v < n; ++v) {
        if (is_free(u, v)) out.edges.push_back({u, v, 0});
      }
    }
    return out;
  }

  const size_t want = static_cast<size_t>(std::floor(
      static_cast<double>(base.edges.size()) * regime.rho / (1.0 - regime.rho)));
  if (want == 0) return out;

  // exact pool size up front so exhaustion is an error, not a hang
  size_t pool = 0;
  {
    std::unordered_set<uint64_t> known = taken;
    for (const DdiPair& p : g.ddi_pairs()) known.insert(pair_key(p.u, p.v));
    const size_t total = n >= 2 ? n * (n - 1) / 2 : 0;
    pool = total - known.size();
  }
  if (want > pool) {
    throw data_error("sample_negatives: requested " + std::to_string(want) +
                     " negatives but only " + std::to_string(pool) +
                     " non-edge pairs remain");
  }

  Rng rng(seed);
  size_t emitted = 0;
  size_t attempts = 0;
  const size_t max_attempts = 64 * want + 4096;
  while (emitted < want && attempts < max_attempts) {
    ++attempts;
    const size_t u = static_cast<size_t>(rng.bounded(n));
    const size_t v = static_cast<size_t>(rng.bounded(n));
    if (u == v || !is_free(u, v)) continue;
    taken.insert(pair_key(u, v));
    out.edges.push_back({std::min(u, v), std::max(u, v), 0});
    ++emitted;
  }
  if (emitted < want) {
    // pool nearly exhausted; finish deterministically by enumeration
    std::vector<std::pair<size_t, size_t>> rest;
    for (size_t u = 0; u < n && rest.size() < pool; ++u) {
      for (size_t v = u + 1; v < n; ++v) {
        if (is_free(u, v)) rest.emplace_back(u, v);
      }
    }
    rng.shuffle(rest);
    for (size_t i = 0; emitted < want; ++i, ++emitted) {
      out.edges.push_back({rest[i].first, rest[i].second, 0});
    }
  }
  return out;
}

}  // namespace hetlink
