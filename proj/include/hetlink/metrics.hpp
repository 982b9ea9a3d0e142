#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hetlink/error.hpp"

namespace hetlink {

// (C+1) x (C+1) counts; rows are true classes, columns are predictions.
struct ConfusionMatrix {
  size_t classes = 0;  // C+1 including class 0
  std::vector<int64_t> counts;

  explicit ConfusionMatrix(size_t classes = 0)
      : classes(classes), counts(classes * classes, 0) {}

  int64_t& at(size_t true_class, size_t pred_class) {
    return counts[true_class * classes + pred_class];
  }
  int64_t at(size_t true_class, size_t pred_class) const {
    return counts[true_class * classes + pred_class];
  }
  int64_t total() const;
  int64_t row_sum(size_t i) const;  // support of class i
  int64_t col_sum(size_t i) const;
  int64_t trace() const;
};

ConfusionMatrix confusion_matrix(std::span<const int> preds,
                                 std::span<const int> labels, size_t class_count);

struct ClassMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int64_t support = 0;
  double weight = 0.0;
};

// One-vs-rest counts for class i out of the matrix; precision/recall/F1 fall
// back to 0 when their denominator is empty.
ClassMetrics per_class_metrics(const ConfusionMatrix& cm, size_t i);

struct MetricReport {
  std::vector<ClassMetrics> per_class;
  double weighted_accuracy = 0.0;  // support-weighted one-vs-rest accuracies
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;        // support-weighted per-class F1 values
  double micro_accuracy = 0.0;     // trace / total, reported alongside
  int64_t total = 0;
};

MetricReport weighted_metrics(const ConfusionMatrix& cm);

// Total map fine class -> group; class 0 always maps to 0.
struct ClassGrouping {
  std::map<int, int> fine_to_group;

  int apply(int fine) const;
  int group_count() const;  // largest group id
};

ClassGrouping load_grouping(const std::string& path);

std::vector<int> group_classes(std::span<const int> labels, const ClassGrouping& g);

// Matrix-level aggregation; commutes with grouping labels before counting.
ConfusionMatrix group_confusion(const ConfusionMatrix& cm, const ClassGrouping& g);

void write_confusion_tsv(const std::string& path, const ConfusionMatrix& cm);
ConfusionMatrix load_confusion_tsv(const std::string& path);

std::string report_to_json(const MetricReport& report);

}  // namespace hetlink
