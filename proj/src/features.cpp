#include "hetlink/features.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <unordered_map>

#include "hetlink/io.hpp"

namespace hetlink {

NodeFeatures load_features(const std::string& path, const NodeTable& table,
                           bool allow_zero_rows) {
  std::unordered_map<size_t, std::vector<double>> rows;
  size_t dim = 0;
  for (const auto& row : io::read_tsv(path)) {
    if (row.size() != 2) {
      throw format_error(path + ": expected id<TAB>values per feature row");
    }
    auto idx = table.find(row[0]);
    if (!idx) continue;  // row belongs to the other node type
    std::vector<double> vals;
    const char* p = row[1].c_str();
    char* end = nullptr;
    while (*p) {
      const double v = std::strtod(p, &end);
      if (end == p) {
        throw format_error(path + ": bad float in features of " + row[0]);
      }
      vals.push_back(v);
      p = end;
      while (*p == ' ') ++p;
    }
    if (vals.empty()) throw format_error(path + ": empty feature row for " + row[0]);
    if (dim == 0) {
      dim = vals.size();
    } else if (vals.size() != dim) {
      throw format_error(path + ": ragged feature dimensions, " + row[0] + " has " +
                         std::to_string(vals.size()) + " values, expected " +
                         std::to_string(dim));
    }
    if (!rows.emplace(*idx, std::move(vals)).second) {
      throw data_error(path + ": duplicate feature row for " + row[0]);
    }
  }

  std::string missing;
  size_t n_missing = 0;
  for (size_t i = 0; i < table.size(); ++i) {
    if (rows.count(i)) continue;
    ++n_missing;
    if (n_missing <= 8) {
      if (!missing.empty()) missing += ", ";
      missing += table.ids[i];
    }
  }
  if (n_missing > 0) {
    if (n_missing > 8) missing += ", ...";
    throw data_error(path + ": no feature rows for " + std::to_string(n_missing) +
                     " " + node_type_name(table.type) + " node(s): " + missing);
  }

  std::vector<double> data(table.size() * dim);
  for (size_t i = 0; i < table.size(); ++i) {
    const auto& vals = rows.at(i);
    bool all_zero = true;
    for (size_t j = 0; j < dim; ++j) {
      data[i * dim + j] = vals[j];
      if (vals[j] != 0.0) all_zero = false;
    }
    if (all_zero && !allow_zero_rows) {
      throw data_error(path + ": all-zero feature row for " + table.ids[i]);
    }
  }
  NodeFeatures f;
  f.type = table.type;
  f.matrix = Tensor({table.size(), dim}, std::move(data));
  return f;
}

Fingerprint Fingerprint::from_bitstring(std::string id, const std::string& bits) {
  Fingerprint fp;
  fp.id = std::move(id);
  fp.nbits = bits.size();
  fp.words.assign((bits.size() + 63) / 64, 0);
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      fp.words[i / 64] |= uint64_t{1} << (i % 64);
    } else if (bits[i] != '0') {
      throw format_error("fingerprint " + fp.id + ": bitstring may only contain 0/1");
    }
  }
  return fp;
}

size_t Fingerprint::popcount() const {
  size_t n = 0;
  for (uint64_t w : words) n += std::popcount(w);
  return n;
}

std::vector<Fingerprint> load_fingerprints(const std::string& path) {
  std::vector<Fingerprint> fps;
  for (const auto& row : io::read_tsv(path)) {
    if (row.size() != 2) {
      throw format_error(path + ": expected id<TAB>bitstring per fingerprint row");
    }
    Fingerprint fp = Fingerprint::from_bitstring(row[0], row[1]);
    if (!fps.empty() && fp.nbits != fps.front().nbits) {
      throw format_error(path + ": fingerprint length of " + fp.id + " (" +
                         std::to_string(fp.nbits) + ") differs from " +
                         std::to_string(fps.front().nbits));
    }
    fps.push_back(std::move(fp));
  }
  return fps;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.nbits != b.nbits) {
    throw format_error("tanimoto: fingerprint lengths differ, " +
                       std::to_string(a.nbits) + " vs " + std::to_string(b.nbits));
  }
  uint64_t inter = 0, uni = 0;
  for (size_t w = 0; w < a.words.size(); ++w) {
    inter += std::popcount(a.words[w] & b.words[w]);
    uni += std::popcount(a.words[w] | b.words[w]);
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

void check_tau(double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw config_error("similarity threshold must lie in (0, 1]");
  }
}

template <typename SimFn>
std::vector<SimEdge> threshold_pairs(size_t n, double tau, SimFn&& sim) {
  // parallel over the first index; per-slot buffers keep (i, j) order
  std::vector<std::vector<SimEdge>> per_row(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (ptrdiff_t i = 0; i < static_cast<ptrdiff_t>(n); ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double s = sim(static_cast<size_t>(i), j);
      if (s > tau) per_row[i].push_back({static_cast<size_t>(i), j, s});
    }
  }
  std::vector<SimEdge> out;
  for (auto& row : per_row) out.insert(out.end(), row.begin(), row.end());
  return out;
}

}  // namespace

std::vector<SimEdge> build_similarity_edges(const std::vector<Fingerprint>& fps,
                                            double tau) {
  check_tau(tau);
  return threshold_pairs(fps.size(), tau,
                         [&](size_t i, size_t j) { return tanimoto(fps[i], fps[j]); });
}

std::vector<SimEdge> build_similarity_edges_cosine(const Tensor& features, double tau) {
  check_tau(tau);
  const size_t n = features.rows(), d = features.cols();
  std::vector<double> norms(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (size_t j = 0; j < d; ++j) s += features.at(i, j) * features.at(i, j);
    norms[i] = std::sqrt(s);
  }
  return threshold_pairs(n, tau, [&](size_t i, size_t j) {
    if (norms[i] == 0.0 || norms[j] == 0.0) return 0.0;
    double dot = 0.0;
    for (size_t k = 0; k < d; ++k) dot += features.at(i, k) * features.at(j, k);
    return dot / (norms[i] * norms[j]);
  });
}

}  // namespace hetlink
