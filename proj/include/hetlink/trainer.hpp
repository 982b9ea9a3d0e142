#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hetlink/features.hpp"
#include "hetlink/graph.hpp"
#include "hetlink/layers.hpp"
#include "hetlink/metrics.hpp"
#include "hetlink/sampling.hpp"

namespace hetlink {

struct TrainConfig {
  EncoderKind encoder_kind = EncoderKind::HGCN;
  size_t epochs = 200;
  double learning_rate = 1e-3;
  uint64_t seed = 1;
  double test_fraction = 0.2;
  double train_negative_ratio = 0.1;  // negatives as fraction of the train set
  NegativeRegime test_negative_regime = NegativeRegime::fraction(0.1);
  size_t d_h = 64;
  size_t m = 128;
  size_t class_count = 0;              // C; 0 means infer from the data
  std::string class_grouping_path;     // optional fine -> group map
  bool sim_weighted = true;

  void validate() const;
  std::string to_json() const;
  static TrainConfig from_json(const std::string& json_text);
};

struct EpochRecord {
  size_t epoch = 0;
  double loss = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double accuracy = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> records;

  std::string to_tsv() const;
};

struct EvalResult {
  ConfusionMatrix cm{0};
  MetricReport report;
};

struct TrainResult {
  ModelParams params;
  TrainHistory history;
  LabeledEdgeSet train_positives;
  LabeledEdgeSet test_set;  // positives plus the fixed test negatives
  EvalResult final_eval;
};

// Glorot-uniform weights (sqrt(6/(fan_in+fan_out)) bound), zero biases;
// deterministic per seed.
ModelParams init_params(EncoderKind kind, const ModelDims& dims, uint64_t seed);

// Adam with bias correction; beta1 0.9, beta2 0.999, eps 1e-8.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(double lr) : lr_(lr) {}

  void step(const std::vector<std::pair<std::string, Tensor>>& params);

 private:
  double lr_;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  size_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

// Full-batch training over the split's train pairs, with train negatives
// resampled every epoch and message passing restricted to a graph that has
// the test DDI edges removed. Evaluates on the held-out set every epoch.
TrainResult train(const HeteroGraph& g, const TypedFeatures& features,
                  const TrainConfig& cfg);

// Argmax evaluation on a labeled pair set; message passing never sees the
// pairs under evaluation.
EvalResult evaluate(const ModelParams& params, const HeteroGraph& g,
                    const TypedFeatures& features, const LabeledEdgeSet& test);

}  // namespace hetlink
