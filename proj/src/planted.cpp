#include "hetlink/planted.hpp"

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "hetlink/io.hpp"
#include "hetlink/rng.hpp"

namespace hetlink {

namespace {

std::string padded_id(char prefix, size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%04zu", prefix, i);
  return buf;
}

}  // namespace

int PlantedData::pair_class(size_t u, size_t v) const {
  const size_t residues = spec.class_count + 1;
  return static_cast<int>((drug_cluster[u] + drug_cluster[v]) % residues);
}

PlantedData generate_planted(const PlantedSpec& spec) {
  if (spec.class_count == 0) throw config_error("planted: class_count must be >= 1");
  if (spec.clusters_per_class == 0) {
    throw config_error("planted: clusters_per_class must be >= 1");
  }
  if (spec.feature_dim == 0) throw config_error("planted: feature_dim must be >= 1");
  if (spec.noise < 0.0) throw config_error("planted: noise must be >= 0");
  const size_t k = spec.clusters();
  if (k > spec.n_drugs) {
    throw config_error("planted: " + std::to_string(k) + " clusters need at least " +
                       std::to_string(k) + " drugs, have " +
                       std::to_string(spec.n_drugs));
  }
  if (spec.n_proteins == 0) throw config_error("planted: needs at least one protein");

  PlantedData d;
  d.spec = spec;

  std::vector<std::string> drug_ids, protein_ids;
  for (size_t i = 0; i < spec.n_drugs; ++i) drug_ids.push_back(padded_id('D', i));
  for (size_t i = 0; i < spec.n_proteins; ++i) protein_ids.push_back(padded_id('P', i));
  d.drugs = NodeTable::build(NodeType::Drug, std::move(drug_ids));
  d.proteins = NodeTable::build(NodeType::Protein, std::move(protein_ids));

  d.drug_cluster.resize(spec.n_drugs);
  for (size_t i = 0; i < spec.n_drugs; ++i) d.drug_cluster[i] = i % k;
  d.protein_cluster.resize(spec.n_proteins);
  for (size_t i = 0; i < spec.n_proteins; ++i) d.protein_cluster[i] = i % k;

  Rng rng(spec.seed);
  Rng centroid_rng = rng.fork(1);
  std::vector<std::vector<double>> drug_centroids(k), protein_centroids(k);
  for (size_t c = 0; c < k; ++c) {
    drug_centroids[c].resize(spec.feature_dim);
    for (double& v : drug_centroids[c]) v = centroid_rng.normal();
  }
  for (size_t c = 0; c < k; ++c) {
    protein_centroids[c].resize(spec.feature_dim);
    for (double& v : protein_centroids[c]) v = centroid_rng.normal();
  }

  Rng noise_rng = rng.fork(2);
  d.drug_features.resize(spec.n_drugs);
  for (size_t i = 0; i < spec.n_drugs; ++i) {
    d.drug_features[i] = drug_centroids[d.drug_cluster[i]];
    for (double& v : d.drug_features[i]) v += spec.noise * noise_rng.normal();
  }
  d.protein_features.resize(spec.n_proteins);
  for (size_t i = 0; i < spec.n_proteins; ++i) {
    d.protein_features[i] = protein_centroids[d.protein_cluster[i]];
    for (double& v : d.protein_features[i]) v += spec.noise * noise_rng.normal();
  }

  // DDI: pair class from cluster residues, residue 0 stays a non-edge
  for (size_t u = 0; u < spec.n_drugs; ++u) {
    for (size_t v = u + 1; v < spec.n_drugs; ++v) {
      const int label = d.pair_class(u, v);
      if (label == 0) continue;
      d.edges.push_back({d.drugs.ids[u], d.drugs.ids[v], Rel::DDI, label, std::nullopt});
    }
  }
  // DPI: drugs bind the proteins of their own cluster
  for (size_t u = 0; u < spec.n_drugs; ++u) {
    for (size_t p = 0; p < spec.n_proteins; ++p) {
      if (d.protein_cluster[p] != d.drug_cluster[u]) continue;
      d.edges.push_back(
          {d.drugs.ids[u], d.proteins.ids[p], Rel::DPI, std::nullopt, std::nullopt});
    }
  }
  // PPI: cluster pairs with residue 1 interact
  for (size_t p = 0; p < spec.n_proteins; ++p) {
    for (size_t q = p + 1; q < spec.n_proteins; ++q) {
      if ((d.protein_cluster[p] + d.protein_cluster[q]) % (spec.class_count + 1) != 1) {
        continue;
      }
      d.edges.push_back(
          {d.proteins.ids[p], d.proteins.ids[q], Rel::PPI, std::nullopt, std::nullopt});
    }
  }

  // fingerprints: per-cluster base pattern with per-drug noise flips
  Rng fp_rng = rng.fork(3);
  std::vector<std::vector<bool>> base(k, std::vector<bool>(spec.fingerprint_bits));
  for (size_t c = 0; c < k; ++c) {
    for (size_t b = 0; b < spec.fingerprint_bits; ++b) base[c][b] = fp_rng.bernoulli(0.5);
  }
  for (size_t i = 0; i < spec.n_drugs; ++i) {
    std::string bits(spec.fingerprint_bits, '0');
    const auto& pattern = base[d.drug_cluster[i]];
    for (size_t b = 0; b < spec.fingerprint_bits; ++b) {
      bool bit = pattern[b];
      if (fp_rng.bernoulli(spec.noise)) bit = !bit;
      bits[b] = bit ? '1' : '0';
    }
    d.fingerprints.push_back(Fingerprint::from_bitstring(d.drugs.ids[i], bits));
  }
  return d;
}

void write_planted(const PlantedData& d, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto path = [&](const char* name) { return dir + "/" + name; };

  io::write_nodes(path("nodes.tsv"), d.drugs, d.proteins);
  io::write_edges(path("edges.tsv"), d.edges);

  std::ostringstream feats;
  auto emit_features = [&](const NodeTable& table,
                           const std::vector<std::vector<double>>& rows) {
    for (size_t i = 0; i < table.size(); ++i) {
      feats << table.ids[i] << '\t';
      for (size_t j = 0; j < rows[i].size(); ++j) {
        feats << (j ? " " : "") << io::format_double(rows[i][j]);
      }
      feats << '\n';
    }
  };
  emit_features(d.drugs, d.drug_features);
  emit_features(d.proteins, d.protein_features);
  io::write_file(path("features.tsv"), feats.str());

  std::ostringstream fps;
  for (const Fingerprint& fp : d.fingerprints) {
    fps << fp.id << '\t';
    for (size_t b = 0; b < fp.nbits; ++b) fps << (fp.bit(b) ? '1' : '0');
    fps << '\n';
  }
  io::write_file(path("fingerprints.tsv"), fps.str());

  std::ostringstream truth;
  truth << "# src\tdst\tclass (0 = no interaction)\n";
  for (size_t u = 0; u < d.spec.n_drugs; ++u) {
    for (size_t v = u + 1; v < d.spec.n_drugs; ++v) {
      truth << d.drugs.ids[u] << '\t' << d.drugs.ids[v] << '\t' << d.pair_class(u, v)
            << '\n';
    }
  }
  io::write_file(path("truth.tsv"), truth.str());
}

}  // namespace hetlink
