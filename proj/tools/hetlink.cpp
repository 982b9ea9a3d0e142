// Command-line surface for the heterogeneous-graph DDI link-prediction
// pipeline: synthetic data generation, similarity edges, training,
// evaluation, report rendering and single-pair prediction.

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hetlink/checkpoint.hpp"
#include "hetlink/digest.hpp"
#include "hetlink/features.hpp"
#include "hetlink/graph.hpp"
#include "hetlink/io.hpp"
#include "hetlink/layers.hpp"
#include "hetlink/metrics.hpp"
#include "hetlink/planted.hpp"
#include "hetlink/sampling.hpp"
#include "hetlink/svg.hpp"
#include "hetlink/tensor.hpp"
#include "hetlink/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hetlink;

namespace {

constexpr const char* kVersion = "hetlink 0.1.0";

// Exactly one live process per run directory.
class DirLock {
 public:
  explicit DirLock(const std::string& dir) : path_(dir + "/.lock") {
    fs::create_directories(dir);
    if (fs::exists(path_)) {
      throw config_error("run directory " + dir +
                         " is locked by another invocation (stale? remove " + path_ + ")");
    }
    std::ofstream out(path_);
    out << "pid " << ::getpid() << "\n";
  }
  ~DirLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }

 private:
  std::string path_;
};

json manifest_base(const std::string& command, uint64_t seed) {
  json m;
  m["command"] = command;
  m["artifact"] = kVersion;
  m["seed"] = seed;
  char buf[32];
  const std::time_t now = std::time(nullptr);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  m["created"] = buf;  // excluded from determinism audits
  return m;
}

void add_digests(json& m, const char* key, const std::vector<std::string>& paths) {
  json d = json::object();
  for (const std::string& p : paths) d[p] = sha256_file(p);
  m[key] = d;
}

void write_manifest(const std::string& dir, const json& m) {
  io::write_file(dir + "/manifest.json", m.dump(2) + "\n");
}

struct Dataset {
  HeteroGraph graph;
  TypedFeatures features;
};

Dataset load_dataset(const std::string& dir) {
  auto [drugs, proteins] = io::load_nodes(dir + "/nodes.tsv");
  auto edges = io::load_edges(dir + "/edges.tsv");
  Dataset d{HeteroGraph::build(std::move(drugs), std::move(proteins), edges), {}};
  const std::string feat_path = dir + "/features.tsv";
  NodeFeatures df = load_features(feat_path, d.graph.nodes(NodeType::Drug));
  NodeFeatures pf = load_features(feat_path, d.graph.nodes(NodeType::Protein));
  d.features = {df.matrix, pf.matrix};
  return d;
}

std::vector<std::string> dataset_inputs(const std::string& dir) {
  return {dir + "/nodes.tsv", dir + "/edges.tsv", dir + "/features.tsv"};
}

void print_graph_stats(const HeteroGraph& g) {
  const auto s = g.stats();
  std::cout << "graph: " << s.drugs << " drugs, " << s.proteins << " proteins\n"
            << "edges: ddi " << s.ddi_pairs << " pairs, dpi " << s.dpi_edges
            << ", ppi " << s.ppi_edges << ", sim " << s.sim_edges << "\n"
            << "drug pairs: " << s.unordered_drug_pairs << " unordered ("
            << s.ordered_drug_pairs << " ordered), " << s.non_edge_pairs
            << " non-edges\n";
}

json report_json(const EvalResult& eval, const std::optional<ClassGrouping>& grouping) {
  json j = json::parse(report_to_json(eval.report));
  if (grouping) {
    const ConfusionMatrix grouped_cm = group_confusion(eval.cm, *grouping);
    j["grouped"] = json::parse(report_to_json(weighted_metrics(grouped_cm)));
  }
  return j;
}

void write_eval_outputs(const std::string& dir, const EvalResult& eval,
                        const std::optional<ClassGrouping>& grouping) {
  write_confusion_tsv(dir + "/confusion.tsv", eval.cm);
  io::write_file(dir + "/report.json", report_json(eval, grouping).dump(2) + "\n");
}

// --- subcommands -------------------------------------------------------

int cmd_synth(const PlantedSpec& spec, const std::string& out_dir) {
  DirLock lock(out_dir);
  PlantedData data = generate_planted(spec);
  write_planted(data, out_dir);

  json m = manifest_base("synth", spec.seed);
  m["config"] = {{"drugs", spec.n_drugs},
                 {"proteins", spec.n_proteins},
                 {"classes", spec.class_count},
                 {"clusters_per_class", spec.clusters_per_class},
                 {"dim", spec.feature_dim},
                 {"noise", spec.noise},
                 {"fingerprint_bits", spec.fingerprint_bits}};
  add_digests(m, "outputs",
              {out_dir + "/nodes.tsv", out_dir + "/edges.tsv", out_dir + "/features.tsv",
               out_dir + "/fingerprints.tsv", out_dir + "/truth.tsv"});
  write_manifest(out_dir, m);

  std::cout << "wrote planted dataset to " << out_dir << " (" << spec.n_drugs
            << " drugs, " << spec.n_proteins << " proteins, C=" << spec.class_count
            << ")\n";
  return 0;
}

int cmd_sim(const std::string& fp_path, const std::string& features_path, bool cosine,
            double tau, const std::string& out_path) {
  std::vector<std::string> ids;
  std::vector<SimEdge> edges;
  if (cosine) {
    if (features_path.empty()) {
      throw config_error("sim: --cosine needs --features");
    }
    std::vector<std::vector<double>> rows;
    for (const auto& row : io::read_tsv(features_path)) {
      if (row.size() != 2) throw format_error(features_path + ": bad feature row");
      ids.push_back(row[0]);
      std::vector<double> vals;
      std::istringstream ss(row[1]);
      double v;
      while (ss >> v) vals.push_back(v);
      if (!rows.empty() && vals.size() != rows.front().size()) {
        throw format_error(features_path + ": ragged feature dimensions at " + row[0]);
      }
      rows.push_back(std::move(vals));
    }
    std::vector<double> flat;
    const size_t d = rows.empty() ? 0 : rows.front().size();
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    Tensor matrix({rows.size(), d}, std::move(flat));
    edges = build_similarity_edges_cosine(matrix, tau);
  } else {
    auto fps = load_fingerprints(fp_path);
    for (const auto& fp : fps) ids.push_back(fp.id);
    edges = build_similarity_edges(fps, tau);
  }

  std::ostringstream out;
  for (const SimEdge& e : edges) {
    out << ids[e.i] << '\t' << ids[e.j] << "\tsim\t" << io::format_double(e.weight)
        << '\n';
  }
  io::write_file(out_path, out.str());
  std::cout << edges.size() << " sim edges above tau=" << tau << " -> " << out_path
            << "\n";
  return 0;
}

int cmd_train(TrainConfig cfg, const std::string& data_dir, const std::string& out_dir,
              const std::string& config_path) {
  DirLock lock(out_dir);
  Dataset data = load_dataset(data_dir);
  print_graph_stats(data.graph);

  std::optional<ClassGrouping> grouping;
  if (!cfg.class_grouping_path.empty()) grouping = load_grouping(cfg.class_grouping_path);

  TrainResult result = train(data.graph, data.features, cfg);

  io::write_file(out_dir + "/config.json", cfg.to_json());
  io::write_file(out_dir + "/history.tsv", result.history.to_tsv());
  save_checkpoint(out_dir + "/checkpoint.bin", result.params);
  io::write_split(out_dir + "/split.tsv", data.graph, result.train_positives,
                  result.test_set);
  write_eval_outputs(out_dir, result.final_eval, grouping);

  json m = manifest_base("train", cfg.seed);
  m["config"] = json::parse(cfg.to_json());
  const auto st = data.graph.stats();
  m["graph_stats"] = {{"drugs", st.drugs},
                      {"proteins", st.proteins},
                      {"ddi_pairs", st.ddi_pairs},
                      {"ordered_drug_pairs", st.ordered_drug_pairs},
                      {"unordered_drug_pairs", st.unordered_drug_pairs},
                      {"non_edge_pairs", st.non_edge_pairs}};
  std::vector<std::string> inputs = dataset_inputs(data_dir);
  if (!config_path.empty()) inputs.push_back(config_path);
  add_digests(m, "inputs", inputs);
  add_digests(m, "outputs",
              {out_dir + "/config.json", out_dir + "/history.tsv",
               out_dir + "/checkpoint.bin", out_dir + "/split.tsv",
               out_dir + "/confusion.tsv", out_dir + "/report.json"});
  write_manifest(out_dir, m);

  const EpochRecord& last = result.history.records.back();
  std::cout << "trained " << encoder_kind_name(cfg.encoder_kind) << " for "
            << cfg.epochs << " epochs; final loss " << last.loss << ", weighted F1 "
            << last.f1 << "\nrun directory: " << out_dir << "\n";
  return 0;
}

int cmd_eval(const std::string& ckpt_path, const std::string& data_dir,
             const std::string& split_path, const std::string& out_dir,
             const std::string& regime_str, bool exclude_class0,
             const std::string& grouping_path, uint64_t seed) {
  DirLock lock(out_dir);
  Dataset data = load_dataset(data_dir);
  ModelParams params = load_checkpoint(ckpt_path);
  auto [train_set, test_set] = io::load_split(split_path, data.graph);

  if (!regime_str.empty()) {
    // resample negatives: keep the split's positives, replace class-0 rows
    LabeledEdgeSet positives{Partition::Test, {}};
    for (const LabeledEdge& e : test_set.edges) {
      if (e.label != 0) positives.edges.push_back(e);
    }
    const NegativeRegime regime = NegativeRegime::parse(regime_str);
    test_set = sample_negatives(data.graph, positives, regime, seed, &train_set);
  }
  if (exclude_class0) {
    LabeledEdgeSet filtered{Partition::Test, {}};
    for (const LabeledEdge& e : test_set.edges) {
      if (e.label != 0) filtered.edges.push_back(e);
    }
    test_set = std::move(filtered);
  }
  if (test_set.edges.empty()) {
    throw data_error("eval: test set is empty after filtering");
  }

  std::optional<ClassGrouping> grouping;
  if (!grouping_path.empty()) grouping = load_grouping(grouping_path);

  EvalResult eval = evaluate(params, data.graph, data.features, test_set);
  write_eval_outputs(out_dir, eval, grouping);

  json m = manifest_base("eval", seed);
  m["config"] = {{"checkpoint", ckpt_path},
                 {"split", split_path},
                 {"neg_regime", regime_str.empty() ? "from-split" : regime_str},
                 {"exclude_class0", exclude_class0}};
  std::vector<std::string> inputs = dataset_inputs(data_dir);
  inputs.push_back(ckpt_path);
  inputs.push_back(split_path);
  add_digests(m, "inputs", inputs);
  add_digests(m, "outputs", {out_dir + "/confusion.tsv", out_dir + "/report.json"});
  write_manifest(out_dir, m);

  std::cout << "evaluated " << test_set.edges.size() << " pairs; weighted F1 "
            << eval.report.weighted_f1 << ", micro accuracy "
            << eval.report.micro_accuracy << "\n";
  return 0;
}

int cmd_report(const std::string& run_dir) {
  const ConfusionMatrix cm = load_confusion_tsv(run_dir + "/confusion.tsv");
  const MetricReport rep = weighted_metrics(cm);

  io::write_file(run_dir + "/confusion.svg", confusion_heatmap_svg(cm));

  std::ostringstream s;
  s << "confusion matrix: " << cm.classes << " classes, " << rep.total << " pairs\n\n";
  s << "class  support  weight    accuracy  precision recall    f1\n";
  for (size_t i = 0; i < rep.per_class.size(); ++i) {
    const ClassMetrics& m = rep.per_class[i];
    char line[160];
    std::snprintf(line, sizeof line, "%-6zu %-8lld %-9.4f %-9.4f %-9.4f %-9.4f %-9.4f\n",
                  i, static_cast<long long>(m.support), m.weight, m.accuracy,
                  m.precision, m.recall, m.f1);
    s << line;
  }
  char agg[256];
  std::snprintf(agg, sizeof agg,
                "\nweighted: accuracy %.4f, precision %.4f, recall %.4f, f1 %.4f\n"
                "micro accuracy: %.4f\n",
                rep.weighted_accuracy, rep.weighted_precision, rep.weighted_recall,
                rep.weighted_f1, rep.micro_accuracy);
  s << agg;
  io::write_file(run_dir + "/summary.txt", s.str());

  std::cout << s.str();
  std::cout << "wrote " << run_dir << "/confusion.svg and summary.txt\n";
  return 0;
}

int cmd_predict(const std::string& ckpt_path, const std::string& data_dir,
                const std::string& drug_a, const std::string& drug_b) {
  Dataset data = load_dataset(data_dir);
  ModelParams params = load_checkpoint(ckpt_path);
  const std::vector<double> probs =
      predict_edge(params, data.graph, data.features, drug_a, drug_b);
  for (size_t c = 0; c < probs.size(); ++c) {
    std::cout << c << '\t' << io::format_double(probs[c]) << '\n';
  }
  return 0;
}

void apply_thread_cap() {
#ifdef _OPENMP
  if (const char* env = std::getenv("HETLINK_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
#endif
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap();

  CLI::App app{std::string(kVersion) +
               " - drug-drug interaction link prediction on heterogeneous graphs"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a planted synthetic dataset");
  PlantedSpec spec;
  std::string synth_out;
  synth->add_option("--out", synth_out, "output dataset directory")->required();
  synth->add_option("--seed", spec.seed, "generator seed");
  synth->add_option("--drugs", spec.n_drugs, "number of drugs");
  synth->add_option("--proteins", spec.n_proteins, "number of proteins");
  synth->add_option("--classes", spec.class_count, "number of interaction classes C");
  synth->add_option("--clusters-per-class", spec.clusters_per_class,
                    "drug clusters per class residue");
  synth->add_option("--dim", spec.feature_dim, "feature dimension");
  synth->add_option("--noise", spec.noise, "feature noise level");
  synth->add_option("--fp-bits", spec.fingerprint_bits, "fingerprint length");

  // sim
  auto* sim = app.add_subcommand("sim", "build thresholded similarity edges");
  std::string sim_fp, sim_features, sim_out;
  double tau = 0.7;
  bool cosine = false;
  sim->add_option("--fingerprints", sim_fp, "fingerprints.tsv path");
  sim->add_option("--features", sim_features, "features.tsv path (cosine mode)");
  sim->add_option("--tau", tau, "similarity threshold (strictly above)");
  sim->add_flag("--cosine", cosine, "cosine over embeddings instead of tanimoto");
  sim->add_option("--out", sim_out, "output edge file")->required();

  // train
  auto* tr = app.add_subcommand("train", "train a model and write a run directory");
  std::string train_config, train_data, train_out, train_encoder;
  uint64_t train_seed = 0;
  size_t train_epochs = 0;
  tr->add_option("--config", train_config, "TrainConfig JSON path")->required();
  tr->add_option("--data", train_data, "dataset directory")->required();
  tr->add_option("--out", train_out, "run directory")->required();
  tr->add_option("--encoder", train_encoder, "override encoder kind (hgcn|hgat)");
  tr->add_option("--seed", train_seed, "override seed");
  tr->add_option("--epochs", train_epochs, "override epoch count");

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on a split");
  std::string eval_ckpt, eval_data, eval_split, eval_out, eval_regime, eval_grouping;
  bool exclude_class0 = false;
  uint64_t eval_seed = 1;
  ev->add_option("--checkpoint", eval_ckpt, "checkpoint.bin path")->required();
  ev->add_option("--data", eval_data, "dataset directory")->required();
  ev->add_option("--split", eval_split, "split.tsv path")->required();
  ev->add_option("--out", eval_out, "output directory")->required();
  ev->add_option("--neg-regime", eval_regime,
                 "resample test negatives: none | frac:<rho> | all");
  ev->add_flag("--exclude-class0", exclude_class0,
               "drop class-0 pairs (pure edge classification)");
  ev->add_option("--grouping", eval_grouping, "fine-to-group TSV for grouped metrics");
  ev->add_option("--seed", eval_seed, "seed for negative resampling");

  // report
  auto* rep = app.add_subcommand("report", "render confusion.svg and summary.txt");
  std::string report_run;
  rep->add_option("--run", report_run, "run directory with confusion.tsv")->required();

  // predict
  auto* pred = app.add_subcommand("predict", "class distribution for one drug pair");
  std::string pred_ckpt, pred_data, pred_a, pred_b;
  pred->add_option("--checkpoint", pred_ckpt, "checkpoint.bin path")->required();
  pred->add_option("--data", pred_data, "dataset directory")->required();
  pred->add_option("--a", pred_a, "first drug id")->required();
  pred->add_option("--b", pred_b, "second drug id")->required();

  try {
    app.parse(argc, argv);

    if (synth->parsed()) return cmd_synth(spec, synth_out);
    if (sim->parsed()) {
      if (!cosine && sim_fp.empty()) {
        throw config_error("sim: --fingerprints is required unless --cosine is set");
      }
      return cmd_sim(sim_fp, sim_features, cosine, tau, sim_out);
    }
    if (tr->parsed()) {
      TrainConfig cfg = TrainConfig::from_json(io::read_file(train_config));
      if (!train_encoder.empty()) {
        auto k = parse_encoder_kind(train_encoder);
        if (!k) throw config_error("train: encoder must be hgcn or hgat");
        cfg.encoder_kind = *k;
      }
      if (tr->count("--seed") > 0) cfg.seed = train_seed;
      if (tr->count("--epochs") > 0) cfg.epochs = train_epochs;
      cfg.validate();
      return cmd_train(cfg, train_data, train_out, train_config);
    }
    if (ev->parsed()) {
      return cmd_eval(eval_ckpt, eval_data, eval_split, eval_out, eval_regime,
                      exclude_class0, eval_grouping, eval_seed);
    }
    if (rep->parsed()) return cmd_report(report_run);
    if (pred->parsed()) return cmd_predict(pred_ckpt, pred_data, pred_a, pred_b);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // stable usage-error contract
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
