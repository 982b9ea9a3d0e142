#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "hetlink/graph.hpp"
#include "hetlink/io.hpp"
#include "hetlink/rng.hpp"
#include "support/run.hpp"

using namespace hetlink;

namespace {

NodeTable drugs(std::vector<std::string> ids) {
  return NodeTable::build(NodeType::Drug, std::move(ids));
}

NodeTable proteins(std::vector<std::string> ids) {
  return NodeTable::build(NodeType::Protein, std::move(ids));
}

}  // namespace

TEST_CASE("node tables reject duplicate ids and resolve indices") {
  CHECK_THROWS_AS(drugs({"a", "a"}), Error);
  NodeTable t = drugs({"a", "b", "c"});
  CHECK(t.require("b") == 1);
  CHECK_THROWS_AS(t.require("zz"), Error);
}

TEST_CASE("one ddi edge symmetrizes into two labeled arcs") {
  HeteroGraph g = HeteroGraph::build(drugs({"A", "B"}), proteins({}),
                                     {{"A", "B", Rel::DDI, 3, std::nullopt}});
  const Csr& ddi = g.view(Rel::DDI);
  REQUIRE(ddi.arcs() == 2);
  CHECK(ddi.cols[ddi.offsets[0]] == 1);  // A -> B
  CHECK(ddi.cols[ddi.offsets[1]] == 0);  // B -> A
  CHECK(g.ddi_arc_labels()[0] == 3);
  CHECK(g.ddi_arc_labels()[1] == 3);
  CHECK(g.has_ddi(0, 1));
  CHECK(g.has_ddi(1, 0));
  CHECK_FALSE(g.has_ddi(0, 0));
}

TEST_CASE("empty edge list leaves all relations empty") {
  HeteroGraph g = HeteroGraph::build(drugs({"A", "B"}), proteins({"P"}), {});
  CHECK(g.view(Rel::DDI).arcs() == 0);
  CHECK(g.view(Rel::SIM).arcs() == 0);
  CHECK(g.view(Rel::PPI).arcs() == 0);
  CHECK(g.view(Rel::DPI, NodeType::Drug).arcs() == 0);
  CHECK(g.view(Rel::DPI, NodeType::Protein).arcs() == 0);
}

TEST_CASE("per-relation arc counts after symmetrization") {
  // 3 drugs + 2 proteins, 1 DDI + 2 DPI + 1 PPI -> hand-enumerated arcs
  std::vector<EdgeInput> edges = {
      {"d1", "d2", Rel::DDI, 1, std::nullopt},
      {"d1", "p1", Rel::DPI, std::nullopt, std::nullopt},
      {"d3", "p2", Rel::DPI, std::nullopt, std::nullopt},
      {"p1", "p2", Rel::PPI, std::nullopt, std::nullopt},
  };
  HeteroGraph g =
      HeteroGraph::build(drugs({"d1", "d2", "d3"}), proteins({"p1", "p2"}), edges);
  CHECK(g.view(Rel::DDI).arcs() == 2);
  CHECK(g.view(Rel::DPI, NodeType::Drug).arcs() + g.view(Rel::DPI, NodeType::Protein).arcs() == 4);
  CHECK(g.view(Rel::PPI).arcs() == 2);
}

TEST_CASE("build rejects bad inputs") {
  // unknown id
  CHECK_THROWS_AS(HeteroGraph::build(drugs({"A"}), proteins({}),
                                     {{"A", "X", Rel::DDI, 1, std::nullopt}}),
                  Error);
  // type mismatch: ddi touching a protein
  CHECK_THROWS_AS(HeteroGraph::build(drugs({"A"}), proteins({"P"}),
                                     {{"A", "P", Rel::DDI, 1, std::nullopt}}),
                  Error);
  // conflicting duplicate label
  CHECK_THROWS_AS(HeteroGraph::build(drugs({"A", "B"}), proteins({}),
                                     {{"A", "B", Rel::DDI, 1, std::nullopt},
                                      {"B", "A", Rel::DDI, 2, std::nullopt}}),
                  Error);
  // exact duplicate collapses
  HeteroGraph g = HeteroGraph::build(drugs({"A", "B"}), proteins({}),
                                     {{"A", "B", Rel::DDI, 1, std::nullopt},
                                      {"B", "A", Rel::DDI, 1, std::nullopt}});
  CHECK(g.view(Rel::DDI).arcs() == 2);
  // label 0 is reserved
  CHECK_THROWS_AS(HeteroGraph::build(drugs({"A", "B"}), proteins({}),
                                     {{"A", "B", Rel::DDI, 0, std::nullopt}}),
                  Error);
  // self loop
  CHECK_THROWS_AS(HeteroGraph::build(drugs({"A", "B"}), proteins({}),
                                     {{"A", "A", Rel::DDI, 1, std::nullopt}}),
                  Error);
}

TEST_CASE("neighbors: isolated node, ordering, oracle") {
  std::vector<EdgeInput> edges = {
      {"d1", "d3", Rel::DDI, 1, std::nullopt},
      {"d1", "d2", Rel::DDI, 1, std::nullopt},
      {"d1", "d4", Rel::DDI, 2, std::nullopt},
  };
  HeteroGraph g =
      HeteroGraph::build(drugs({"d1", "d2", "d3", "d4", "d5"}), proteins({}), edges);
  CHECK(g.neighbors(Rel::DDI, 4).empty());  // isolated
  auto n1 = g.neighbors(Rel::DDI, 0);
  REQUIRE(n1.size() == 3);
  CHECK(n1[0].index == 1);  // ascending
  CHECK(n1[1].index == 2);
  CHECK(n1[2].index == 3);
  CHECK_THROWS_AS(g.neighbors(Rel::DDI, 99), Error);

  // random graph vs adjacency-list reference
  Rng rng(17);
  const size_t n = 30;
  std::vector<std::string> ids;
  for (size_t i = 0; i < n; ++i) ids.push_back("d" + std::to_string(i));
  std::map<size_t, std::set<size_t>> adj;
  std::vector<EdgeInput> random_edges;
  for (size_t k = 0; k < 120; ++k) {
    const size_t u = rng.bounded(n), v = rng.bounded(n);
    if (u == v) continue;
    if (adj[std::min(u, v)].insert(std::max(u, v)).second) {
      random_edges.push_back({ids[u], ids[v], Rel::DDI, 1, std::nullopt});
    }
  }
  HeteroGraph rg = HeteroGraph::build(drugs(ids), proteins({}), random_edges);
  for (size_t v = 0; v < n; ++v) {
    std::set<size_t> expect;
    for (const auto& [a, bs] : adj) {
      for (size_t b : bs) {
        if (a == v) expect.insert(b);
        if (b == v) expect.insert(a);
      }
    }
    std::set<size_t> got;
    for (const auto& nb : rg.neighbors(Rel::DDI, v)) got.insert(nb.index);
    CHECK(got == expect);
  }
}

TEST_CASE("undirected relations have even, exactly symmetric adjacency") {
  Rng rng(23);
  const size_t n = 20;
  std::vector<std::string> ids;
  for (size_t i = 0; i < n; ++i) ids.push_back("d" + std::to_string(i));
  std::vector<EdgeInput> edges;
  std::set<std::pair<size_t, size_t>> seen;
  for (size_t k = 0; k < 60; ++k) {
    size_t u = rng.bounded(n), v = rng.bounded(n);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (!seen.insert({u, v}).second) continue;
    edges.push_back({ids[u], ids[v], Rel::SIM, std::nullopt, rng.uniform(0.5, 1.0)});
  }
  HeteroGraph g = HeteroGraph::build(drugs(ids), proteins({}), edges);
  const Csr& sim = g.view(Rel::SIM);
  CHECK(sim.arcs() % 2 == 0);
  for (size_t v = 0; v < n; ++v) {
    for (size_t k = sim.offsets[v]; k < sim.offsets[v + 1]; ++k) {
      const size_t u = sim.cols[k];
      // mirrored arc exists with identical weight
      bool found = false;
      for (size_t j = sim.offsets[u]; j < sim.offsets[u + 1]; ++j) {
        if (sim.cols[j] == v) {
          found = true;
          CHECK(sim.weights[j] == sim.weights[k]);
        }
      }
      CHECK(found);
    }
  }
}

TEST_CASE("edge dump rebuild is idempotent on CSR arrays") {
  Rng rng(29);
  const size_t n = 15, np = 8;
  std::vector<std::string> dids, pids;
  for (size_t i = 0; i < n; ++i) dids.push_back("d" + std::to_string(i));
  for (size_t i = 0; i < np; ++i) pids.push_back("p" + std::to_string(i));
  std::vector<EdgeInput> edges;
  std::set<std::pair<size_t, size_t>> seen;
  for (size_t k = 0; k < 40; ++k) {
    size_t u = rng.bounded(n), v = rng.bounded(n);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (!seen.insert({u, v}).second) continue;
    edges.push_back({dids[u], dids[v], Rel::DDI, static_cast<int>(rng.bounded(3)) + 1,
                     std::nullopt});
  }
  for (size_t k = 0; k < 20; ++k) {
    edges.push_back({dids[rng.bounded(n)], pids[rng.bounded(np)], Rel::DPI,
                     std::nullopt, std::nullopt});
  }
  edges.push_back({pids[0], pids[1], Rel::PPI, std::nullopt, std::nullopt});
  edges.push_back({dids[0], dids[1], Rel::SIM, std::nullopt, 0.9});

  HeteroGraph g1 = HeteroGraph::build(drugs(dids), proteins(pids), edges);
  HeteroGraph g2 = HeteroGraph::build(drugs(dids), proteins(pids), g1.edge_dump());
  for (Rel r : {Rel::DDI, Rel::SIM}) {
    CHECK(g1.view(r).offsets == g2.view(r).offsets);
    CHECK(g1.view(r).cols == g2.view(r).cols);
    CHECK(g1.view(r).weights == g2.view(r).weights);
  }
  CHECK(g1.view(Rel::PPI).cols == g2.view(Rel::PPI).cols);
  CHECK(g1.view(Rel::DPI, NodeType::Drug).cols == g2.view(Rel::DPI, NodeType::Drug).cols);
  CHECK(g1.view(Rel::DPI, NodeType::Protein).offsets ==
        g2.view(Rel::DPI, NodeType::Protein).offsets);
  const auto d1 = std::vector<int>(g1.ddi_arc_labels().begin(), g1.ddi_arc_labels().end());
  const auto d2 = std::vector<int>(g2.ddi_arc_labels().begin(), g2.ddi_arc_labels().end());
  CHECK(d1 == d2);
}

TEST_CASE("without_ddi removes exactly the requested pairs") {
  std::vector<EdgeInput> edges = {
      {"a", "b", Rel::DDI, 1, std::nullopt},
      {"a", "c", Rel::DDI, 2, std::nullopt},
      {"b", "c", Rel::DDI, 1, std::nullopt},
  };
  HeteroGraph g = HeteroGraph::build(drugs({"a", "b", "c"}), proteins({}), edges);
  HeteroGraph h = g.without_ddi({{0, 1}});
  CHECK(h.ddi_pairs().size() == 2);
  CHECK_FALSE(h.has_ddi(0, 1));
  CHECK(h.has_ddi(0, 2));
  CHECK(h.has_ddi(1, 2));
  CHECK(h.view(Rel::DDI).arcs() == 4);
  // original untouched
  CHECK(g.ddi_pairs().size() == 3);
}

TEST_CASE("view probe observes accesses") {
  HeteroGraph g = HeteroGraph::build(drugs({"a", "b"}), proteins({}),
                                     {{"a", "b", Rel::DDI, 1, std::nullopt}});
  int hits = 0;
  g.set_view_probe([&](Rel r, NodeType) {
    if (r == Rel::DDI) ++hits;
  });
  g.view(Rel::DDI);
  g.view(Rel::SIM);
  g.view(Rel::DDI);
  CHECK(hits == 2);
}

TEST_CASE("stats reports both pair conventions") {
  HeteroGraph g = HeteroGraph::build(drugs({"a", "b", "c"}), proteins({}),
                                     {{"a", "b", Rel::DDI, 1, std::nullopt}});
  const auto s = g.stats();
  CHECK(s.ordered_drug_pairs == 6);
  CHECK(s.unordered_drug_pairs == 3);
  CHECK(s.ddi_pairs == 1);
  CHECK(s.non_edge_pairs == 2);
}

TEST_CASE("nodes and edges round-trip through tsv files") {
  hetlink::testsupport::TempDir tmp("graphio");
  NodeTable d = drugs({"a", "b"});
  NodeTable p = proteins({"x"});
  io::write_nodes(tmp.sub("nodes.tsv"), d, p);
  auto [d2, p2] = io::load_nodes(tmp.sub("nodes.tsv"));
  CHECK(d2.ids == d.ids);
  CHECK(p2.ids == p.ids);

  std::vector<EdgeInput> edges = {{"a", "b", Rel::DDI, 4, std::nullopt},
                                  {"a", "x", Rel::DPI, std::nullopt, std::nullopt},
                                  {"a", "b", Rel::SIM, std::nullopt, 0.75}};
  io::write_edges(tmp.sub("edges.tsv"), edges);
  auto loaded = io::load_edges(tmp.sub("edges.tsv"));
  REQUIRE(loaded.size() == 3);
  CHECK(loaded[0].label == 4);
  CHECK(loaded[1].rel == Rel::DPI);
  CHECK(loaded[2].weight == 0.75);
}
