#include "hetlink/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>

#include "hetlink/io.hpp"

namespace hetlink {

int64_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), int64_t{0});
}

int64_t ConfusionMatrix::row_sum(size_t i) const {
  int64_t s = 0;
  for (size_t j = 0; j < classes; ++j) s += at(i, j);
  return s;
}

int64_t ConfusionMatrix::col_sum(size_t i) const {
  int64_t s = 0;
  for (size_t j = 0; j < classes; ++j) s += at(j, i);
  return s;
}

int64_t ConfusionMatrix::trace() const {
  int64_t s = 0;
  for (size_t i = 0; i < classes; ++i) s += at(i, i);
  return s;
}

ConfusionMatrix confusion_matrix(std::span<const int> preds,
                                 std::span<const int> labels, size_t class_count) {
  if (preds.size() != labels.size()) {
    throw contract_error("confusion_matrix: " + std::to_string(preds.size()) +
                         " predictions vs " + std::to_string(labels.size()) +
                         " labels");
  }
  ConfusionMatrix cm(class_count + 1);
  for (size_t i = 0; i < preds.size(); ++i) {
    if (labels[i] < 0 || static_cast<size_t>(labels[i]) > class_count ||
        preds[i] < 0 || static_cast<size_t>(preds[i]) > class_count) {
      throw contract_error("confusion_matrix: class index out of 0.." +
                           std::to_string(class_count));
    }
    ++cm.at(static_cast<size_t>(labels[i]), static_cast<size_t>(preds[i]));
  }
  return cm;
}

ClassMetrics per_class_metrics(const ConfusionMatrix& cm, size_t i) {
  if (i >= cm.classes) throw contract_error("per_class_metrics: class out of range");
  const double tp = static_cast<double>(cm.at(i, i));
  const double fp = static_cast<double>(cm.col_sum(i)) - tp;
  const double fn = static_cast<double>(cm.row_sum(i)) - tp;
  const double tn = static_cast<double>(cm.total()) - tp - fp - fn;
  ClassMetrics m;
  m.support = cm.row_sum(i);
  const double denom = tp + tn + fp + fn;
  m.accuracy = denom > 0.0 ? (tp + tn) / denom : 1.0;
  m.precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
  m.recall = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

MetricReport weighted_metrics(const ConfusionMatrix& cm) {
  MetricReport r;
  r.total = cm.total();
  if (r.total == 0) throw contract_error("weighted_metrics: empty confusion matrix");
  for (size_t i = 0; i < cm.classes; ++i) {
    ClassMetrics m = per_class_metrics(cm, i);
    m.weight = static_cast<double>(m.support) / static_cast<double>(r.total);
    r.per_class.push_back(m);
    r.weighted_accuracy += m.weight * m.accuracy;
    r.weighted_precision += m.weight * m.precision;
    r.weighted_recall += m.weight * m.recall;
    r.weighted_f1 += m.weight * m.f1;
  }
  r.micro_accuracy = static_cast<double>(cm.trace()) / static_cast<double>(r.total);
  return r;
}

int ClassGrouping::apply(int fine) const {
  if (fine == 0) return 0;
  auto it = fine_to_group.find(fine);
  if (it == fine_to_group.end()) {
    throw data_error("grouping: fine class " + std::to_string(fine) +
                     " missing from the map");
  }
  return it->second;
}

int ClassGrouping::group_count() const {
  int mx = 0;
  for (const auto& [fine, group] : fine_to_group) mx = std::max(mx, group);
  return mx;
}

ClassGrouping load_grouping(const std::string& path) {
  ClassGrouping g;
  for (const auto& row : io::read_tsv(path)) {
    if (row.size() != 2) throw format_error(path + ": expected fine<TAB>group rows");
    int fine = 0, group = 0;
    auto r1 = std::from_chars(row[0].data(), row[0].data() + row[0].size(), fine);
    auto r2 = std::from_chars(row[1].data(), row[1].data() + row[1].size(), group);
    if (r1.ec != std::errc() || r2.ec != std::errc() || fine < 1 || group < 1) {
      throw format_error(path + ": bad grouping row '" + row[0] + "\t" + row[1] + "'");
    }
    if (!g.fine_to_group.emplace(fine, group).second) {
      throw data_error(path + ": fine class " + row[0] + " mapped twice");
    }
  }
  return g;
}

std::vector<int> group_classes(std::span<const int> labels, const ClassGrouping& g) {
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) out.push_back(g.apply(l));
  return out;
}

ConfusionMatrix group_confusion(const ConfusionMatrix& cm, const ClassGrouping& g) {
  const size_t groups = static_cast<size_t>(g.group_count());
  ConfusionMatrix out(groups + 1);
  for (size_t i = 0; i < cm.classes; ++i) {
    for (size_t j = 0; j < cm.classes; ++j) {
      if (cm.at(i, j) == 0) continue;
      const int gi = g.apply(static_cast<int>(i));
      const int gj = g.apply(static_cast<int>(j));
      out.at(static_cast<size_t>(gi), static_cast<size_t>(gj)) += cm.at(i, j);
    }
  }
  return out;
}

void write_confusion_tsv(const std::string& path, const ConfusionMatrix& cm) {
  std::ostringstream out;
  out << "# rows: true class, columns: predicted class\n";
  for (size_t j = 0; j < cm.classes; ++j) out << (j ? "\t" : "") << j;
  out << '\n';
  for (size_t i = 0; i < cm.classes; ++i) {
    for (size_t j = 0; j < cm.classes; ++j) out << (j ? "\t" : "") << cm.at(i, j);
    out << '\n';
  }
  io::write_file(path, out.str());
}

ConfusionMatrix load_confusion_tsv(const std::string& path) {
  const auto rows = io::read_tsv(path);
  if (rows.size() < 2) throw format_error(path + ": confusion file too short");
  const size_t classes = rows[0].size();
  if (rows.size() != classes + 1) {
    throw format_error(path + ": expected " + std::to_string(classes) +
                       " matrix rows after the header");
  }
  ConfusionMatrix cm(classes);
  for (size_t i = 0; i < classes; ++i) {
    const auto& row = rows[i + 1];
    if (row.size() != classes) throw format_error(path + ": ragged confusion row");
    for (size_t j = 0; j < classes; ++j) {
      int64_t v = 0;
      auto r = std::from_chars(row[j].data(), row[j].data() + row[j].size(), v);
      if (r.ec != std::errc() || v < 0) {
        throw format_error(path + ": bad count '" + row[j] + "'");
      }
      cm.at(i, j) = v;
    }
  }
  return cm;
}

std::string report_to_json(const MetricReport& report) {
  std::ostringstream out;
  auto num = [](double v) { return io::format_double(v); };
  out << "{\n  \"total\": " << report.total << ",\n  \"per_class\": [\n";
  for (size_t i = 0; i < report.per_class.size(); ++i) {
    const ClassMetrics& m = report.per_class[i];
    out << "    {\"class\": " << i << ", \"support\": " << m.support
        << ", \"weight\": " << num(m.weight) << ", \"accuracy\": " << num(m.accuracy)
        << ", \"precision\": " << num(m.precision) << ", \"recall\": " << num(m.recall)
        << ", \"f1\": " << num(m.f1) << "}" << (i + 1 < report.per_class.size() ? "," : "")
        << "\n";
  }
  out << "  ],\n";
  out << "  \"weighted\": {\"accuracy\": " << num(report.weighted_accuracy)
      << ", \"precision\": " << num(report.weighted_precision)
      << ", \"recall\": " << num(report.weighted_recall)
      << ", \"f1\": " << num(report.weighted_f1) << "},\n";
  out << "  \"micro_accuracy\": " << num(report.micro_accuracy) << "\n}\n";
  return out.str();
}

}  // namespace hetlink
