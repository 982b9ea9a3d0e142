#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hetlink/graph.hpp"
#include "hetlink/sampling.hpp"

// File formats. All inputs are UTF-8 TSV; lines starting with '#' and blank
// lines are ignored.
//   nodes.tsv         external_id <TAB> drug|protein
//   edges.tsv         src <TAB> dst <TAB> ddi|dpi|ppi|sim <TAB> value
//                     (value: class label for ddi, weight for sim, empty otherwise)
//   split.tsv         src <TAB> dst <TAB> label <TAB> train|test
//   features.tsv      external_id <TAB> v1 v2 ... vd   (space-separated)
//   fingerprints.tsv  external_id <TAB> 0/1 bitstring
//   grouping.tsv      fine_class <TAB> group_id

namespace hetlink::io {

// Split into fields by '\t'; comment and blank lines removed.
std::vector<std::vector<std::string>> read_tsv(const std::string& path);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

std::pair<NodeTable, NodeTable> load_nodes(const std::string& path);
void write_nodes(const std::string& path, const NodeTable& drugs,
                 const NodeTable& proteins);

std::vector<EdgeInput> load_edges(const std::string& path);
void write_edges(const std::string& path, const std::vector<EdgeInput>& edges);

void write_split(const std::string& path, const HeteroGraph& g,
                 const LabeledEdgeSet& train, const LabeledEdgeSet& test);
std::pair<LabeledEdgeSet, LabeledEdgeSet> load_split(const std::string& path,
                                                     const HeteroGraph& g);

// Shortest round-trip decimal for doubles; used by every writer so that
// identical values always serialize to identical bytes.
std::string format_double(double v);

}  // namespace hetlink::io
