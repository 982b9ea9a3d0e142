#include "hetlink/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hetlink/io.hpp"
#include "hetlink/rng.hpp"

namespace hetlink {

using nlohmann::json;

void TrainConfig::validate() const {
  if (epochs < 1) throw config_error("config: epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw config_error("config: learning_rate must be positive");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw config_error("config: test_fraction must lie in (0, 1)");
  }
  if (train_negative_ratio < 0.0 || train_negative_ratio >= 1.0) {
    throw config_error("config: train_negative_ratio must lie in [0, 1)");
  }
  if (d_h == 0 || m == 0) throw config_error("config: d_h and m must be positive");
}

std::string TrainConfig::to_json() const {
  json j;
  j["encoder_kind"] = encoder_kind_name(encoder_kind);
  j["epochs"] = epochs;
  j["learning_rate"] = learning_rate;
  j["seed"] = seed;
  j["test_fraction"] = test_fraction;
  j["train_negative_ratio"] = train_negative_ratio;
  j["test_negative_regime"] = test_negative_regime.str();
  j["d_h"] = d_h;
  j["m"] = m;
  j["class_count"] = class_count;
  j["class_grouping_path"] = class_grouping_path;
  j["sim_weighted"] = sim_weighted;
  return j.dump(2) + "\n";
}

TrainConfig TrainConfig::from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config: invalid JSON: ") + e.what());
  }
  TrainConfig cfg;
  try {
    if (j.contains("encoder_kind")) {
      auto k = parse_encoder_kind(j["encoder_kind"].get<std::string>());
      if (!k) throw config_error("config: encoder_kind must be hgcn or hgat");
      cfg.encoder_kind = *k;
    }
    if (j.contains("epochs")) cfg.epochs = j["epochs"].get<size_t>();
    if (j.contains("learning_rate")) cfg.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("test_fraction")) cfg.test_fraction = j["test_fraction"].get<double>();
    if (j.contains("train_negative_ratio")) {
      cfg.train_negative_ratio = j["train_negative_ratio"].get<double>();
    }
    if (j.contains("test_negative_regime")) {
      cfg.test_negative_regime =
          NegativeRegime::parse(j["test_negative_regime"].get<std::string>());
    }
    if (j.contains("d_h")) cfg.d_h = j["d_h"].get<size_t>();
    if (j.contains("m")) cfg.m = j["m"].get<size_t>();
    if (j.contains("class_count")) cfg.class_count = j["class_count"].get<size_t>();
    if (j.contains("class_grouping_path") && !j["class_grouping_path"].is_null()) {
      cfg.class_grouping_path = j["class_grouping_path"].get<std::string>();
    }
    if (j.contains("sim_weighted")) cfg.sim_weighted = j["sim_weighted"].get<bool>();
  } catch (const json::exception& e) {
    throw config_error(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string TrainHistory::to_tsv() const {
  std::ostringstream out;
  out << "# epoch\tloss\tf1\tprecision\trecall\taccuracy\n";
  for (const EpochRecord& r : records) {
    out << r.epoch << '\t' << io::format_double(r.loss) << '\t'
        << io::format_double(r.f1) << '\t' << io::format_double(r.precision) << '\t'
        << io::format_double(r.recall) << '\t' << io::format_double(r.accuracy)
        << '\n';
  }
  return out.str();
}

ModelParams init_params(EncoderKind kind, const ModelDims& dims, uint64_t seed) {
  ModelParams p = make_params(kind, dims);
  Rng rng(seed);
  for (auto& [name, t] : p.named()) {
    if (name.find("bias") != std::string::npos || name.find(".b") != std::string::npos) {
      continue;  // biases stay zero
    }
    size_t fan_in, fan_out;
    if (t.rank() == 2) {
      fan_in = t.dim(0);
      fan_out = t.dim(1);
    } else {
      // attention vectors score a single logit
      fan_in = t.dim(0);
      fan_out = 1;
    }
    const double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : t.mut()) v = rng.uniform(-s, s);
  }
  return p;
}

void AdamOptimizer::step(const std::vector<std::pair<std::string, Tensor>>& params) {
  if (m_.empty()) {
    m_.resize(params.size());
    v_.resize(params.size());
    for (size_t i = 0; i < params.size(); ++i) {
      m_[i].assign(params[i].second.numel(), 0.0);
      v_[i].assign(params[i].second.numel(), 0.0);
    }
  }
  if (m_.size() != params.size()) {
    throw contract_error("optimizer: parameter count changed between steps");
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (size_t i = 0; i < params.size(); ++i) {
    Tensor t = params[i].second;
    auto data = t.mut();
    // a parameter untouched this step (e.g. a relation with no arcs) sees a
    // zero gradient
    const bool has = t.has_grad();
    for (size_t k = 0; k < data.size(); ++k) {
      const double g = has ? t.grad()[k] : 0.0;
      m_[i][k] = beta1_ * m_[i][k] + (1.0 - beta1_) * g;
      v_[i][k] = beta2_ * v_[i][k] + (1.0 - beta2_) * g * g;
      const double mhat = m_[i][k] / bc1;
      const double vhat = v_[i][k] / bc2;
      data[k] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

namespace {

struct PairBatch {
  std::vector<size_t> us, vs;
  std::vector<int> labels;
};

PairBatch to_batch(const LabeledEdgeSet& set) {
  PairBatch b;
  b.us.reserve(set.edges.size());
  b.vs.reserve(set.edges.size());
  b.labels.reserve(set.edges.size());
  for (const LabeledEdge& e : set.edges) {
    b.us.push_back(e.u);
    b.vs.push_back(e.v);
    b.labels.push_back(e.label);
  }
  return b;
}

Tensor forward_logits(const HeteroGraph& g, const TypedFeatures& features,
                      const ModelParams& params, const PairBatch& batch) {
  TypedFeatures h = encode(g, features, params);
  Tensor hu = gather_rows(h.drug, batch.us);
  Tensor hv = gather_rows(h.drug, batch.vs);
  return decode_pair_batch(hu, hv, params);
}

std::vector<int> argmax_rows(const Tensor& logits) {
  std::vector<int> out(logits.rows());
  const size_t c = logits.cols();
  for (size_t i = 0; i < logits.rows(); ++i) {
    size_t best = 0;
    for (size_t j = 1; j < c; ++j) {
      if (logits.at(i, j) > logits.at(i, best)) best = j;
    }
    out[i] = static_cast<int>(best);
  }
  return out;
}

EvalResult eval_on_message_graph(const ModelParams& params, const HeteroGraph& g_msg,
                                 const TypedFeatures& features,
                                 const LabeledEdgeSet& test) {
  const PairBatch batch = to_batch(test);
  Tensor logits = forward_logits(g_msg, features, params, batch);
  const std::vector<int> preds = argmax_rows(logits);
  EvalResult r;
  r.cm = confusion_matrix(preds, batch.labels, params.dims.class_count);
  r.report = weighted_metrics(r.cm);
  return r;
}

size_t max_ddi_label(const HeteroGraph& g) {
  size_t mx = 0;
  for (const DdiPair& p : g.ddi_pairs()) mx = std::max(mx, static_cast<size_t>(p.label));
  return mx;
}

}  // namespace

EvalResult evaluate(const ModelParams& params, const HeteroGraph& g,
                    const TypedFeatures& features, const LabeledEdgeSet& test) {
  if (test.edges.empty()) throw contract_error("evaluate: empty test set");
  HeteroGraph g_msg = g.without_ddi(test.pairs());
  return eval_on_message_graph(params, g_msg, features, test);
}

TrainResult train(const HeteroGraph& g, const TypedFeatures& features,
                  const TrainConfig& cfg) {
  cfg.validate();
  const size_t observed_c = max_ddi_label(g);
  if (observed_c == 0) throw data_error("train: graph has no ddi edges");
  size_t class_count = cfg.class_count ? cfg.class_count : observed_c;
  if (observed_c > class_count) {
    throw data_error("train: ddi label " + std::to_string(observed_c) +
                     " exceeds class_count " + std::to_string(class_count));
  }

  auto [train_pos, test_pos] = split_edges(g, cfg.test_fraction, cfg.seed);
  Rng seeds(cfg.seed);
  const uint64_t test_neg_seed = seeds.fork(0xe57).next();
  LabeledEdgeSet test_set =
      sample_negatives(g, test_pos, cfg.test_negative_regime, test_neg_seed);

  // message passing must never see a held-out edge
  HeteroGraph g_msg = g.without_ddi(test_pos.pairs());

  ModelDims dims;
  dims.d_in_drug = features.drug.cols();
  dims.d_in_protein = features.protein.cols();
  dims.d_h = cfg.d_h;
  dims.m_hidden = cfg.m;
  dims.class_count = class_count;
  ModelParams params = init_params(cfg.encoder_kind, dims, seeds.fork(0x1417).next());
  params.sim_weighted = cfg.sim_weighted;
  auto named = params.named();

  AdamOptimizer opt(cfg.learning_rate);
  TrainResult result;
  const NegativeRegime train_regime =
      cfg.train_negative_ratio > 0.0
          ? NegativeRegime::fraction(cfg.train_negative_ratio)
          : NegativeRegime::none();

  // train negatives avoid the fixed test negatives, except under regime All
  // where the test set owns the entire non-edge pool
  const LabeledEdgeSet* train_exclude =
      cfg.test_negative_regime.kind == NegativeRegime::Kind::All ? nullptr : &test_set;

  for (size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    LabeledEdgeSet train_set = sample_negatives(
        g, train_pos, train_regime, seeds.fork(epoch).next(), train_exclude);
    const PairBatch batch = to_batch(train_set);

    try {
      double loss_value = 0.0;
      {
        Tape tape;
        Tape::Scope scope(tape);
        Tensor logits = forward_logits(g_msg, features, params, batch);
        Tensor loss = cross_entropy(logits, batch.labels);
        loss_value = loss.value();
        if (!std::isfinite(loss_value)) {
          throw numeric_error("non-finite loss");
        }
        tape.backward(loss);
      }
      opt.step(named);

      EvalResult eval = eval_on_message_graph(params, g_msg, features, test_set);
      result.history.records.push_back({epoch, loss_value, eval.report.weighted_f1,
                                        eval.report.weighted_precision,
                                        eval.report.weighted_recall,
                                        eval.report.weighted_accuracy});
      if (epoch == cfg.epochs) result.final_eval = std::move(eval);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Numeric) {
        throw numeric_error("training diverged at epoch " + std::to_string(epoch) +
                            ": " + e.what());
      }
      throw;
    }
  }

  result.params = std::move(params);
  result.train_positives = std::move(train_pos);
  result.test_set = std::move(test_set);
  return result;
}

}  // namespace hetlink
