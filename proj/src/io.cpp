#include "hetlink/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hetlink::io {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write " + path);
  out << content;
  if (!out) throw data_error("short write to " + path);
}

std::vector<std::vector<std::string>> read_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      const size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::string format_double(double v) {
  char buf[32];
  // %.17g always round-trips; trim to the shortest representation that does
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  return buf;
}

std::pair<NodeTable, NodeTable> load_nodes(const std::string& path) {
  std::vector<std::string> drugs, proteins;
  for (const auto& row : read_tsv(path)) {
    if (row.size() != 2) {
      throw format_error(path + ": expected 2 fields per node row, got " +
                         std::to_string(row.size()));
    }
    auto t = parse_node_type(row[1]);
    if (!t) throw format_error(path + ": unknown node type '" + row[1] + "'");
    (*t == NodeType::Drug ? drugs : proteins).push_back(row[0]);
  }
  return {NodeTable::build(NodeType::Drug, std::move(drugs)),
          NodeTable::build(NodeType::Protein, std::move(proteins))};
}

void write_nodes(const std::string& path, const NodeTable& drugs,
                 const NodeTable& proteins) {
  std::ostringstream out;
  for (const auto& id : drugs.ids) out << id << "\tdrug\n";
  for (const auto& id : proteins.ids) out << id << "\tprotein\n";
  write_file(path, out.str());
}

std::vector<EdgeInput> load_edges(const std::string& path) {
  std::vector<EdgeInput> edges;
  for (const auto& row : read_tsv(path)) {
    if (row.size() != 3 && row.size() != 4) {
      throw format_error(path + ": expected 3-4 fields per edge row");
    }
    auto rel = parse_rel(row[2]);
    if (!rel) throw format_error(path + ": unknown relation '" + row[2] + "'");
    EdgeInput e{row[0], row[1], *rel, std::nullopt, std::nullopt};
    const std::string value = row.size() == 4 ? row[3] : "";
    if (*rel == Rel::DDI) {
      int label = 0;
      auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), label);
      if (ec != std::errc() || p != value.data() + value.size()) {
        throw format_error(path + ": ddi row " + row[0] + " -- " + row[1] +
                           " needs an integer class label, got '" + value + "'");
      }
      e.label = label;
    } else if (*rel == Rel::SIM) {
      try {
        size_t used = 0;
        e.weight = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        throw format_error(path + ": sim row " + row[0] + " -- " + row[1] +
                           " needs a float weight, got '" + value + "'");
      }
    } else if (!value.empty()) {
      throw format_error(path + ": " + row[2] + " row " + row[0] + " -- " + row[1] +
                         " must have an empty value field");
    }
    edges.push_back(std::move(e));
  }
  return edges;
}

void write_edges(const std::string& path, const std::vector<EdgeInput>& edges) {
  std::ostringstream out;
  for (const EdgeInput& e : edges) {
    out << e.src << '\t' << e.dst << '\t' << rel_name(e.rel) << '\t';
    if (e.label) out << *e.label;
    if (e.weight) out << format_double(*e.weight);
    out << '\n';
  }
  write_file(path, out.str());
}

void write_split(const std::string& path, const HeteroGraph& g,
                 const LabeledEdgeSet& train, const LabeledEdgeSet& test) {
  const auto& ids = g.nodes(NodeType::Drug).ids;
  std::ostringstream out;
  auto emit = [&](const LabeledEdgeSet& s, const char* part) {
    for (const LabeledEdge& e : s.edges) {
      out << ids[e.u] << '\t' << ids[e.v] << '\t' << e.label << '\t' << part << '\n';
    }
  };
  emit(train, "train");
  emit(test, "test");
  write_file(path, out.str());
}

std::pair<LabeledEdgeSet, LabeledEdgeSet> load_split(const std::string& path,
                                                     const HeteroGraph& g) {
  LabeledEdgeSet train{Partition::Train, {}};
  LabeledEdgeSet test{Partition::Test, {}};
  const auto& table = g.nodes(NodeType::Drug);
  for (const auto& row : read_tsv(path)) {
    if (row.size() != 4) throw format_error(path + ": expected 4 fields per split row");
    size_t u = table.require(row[0]);
    size_t v = table.require(row[1]);
    if (u == v) throw data_error(path + ": self pair " + row[0]);
    if (u > v) std::swap(u, v);
    int label = 0;
    auto [p, ec] = std::from_chars(row[2].data(), row[2].data() + row[2].size(), label);
    if (ec != std::errc() || label < 0) {
      throw format_error(path + ": bad label '" + row[2] + "'");
    }
    if (row[3] == "train") {
      train.edges.push_back({u, v, label});
    } else if (row[3] == "test") {
      test.edges.push_back({u, v, label});
    } else {
      throw format_error(path + ": partition must be train|test, got '" + row[3] + "'");
    }
  }
  return {std::move(train), std::move(test)};
}

}  // namespace hetlink::io
