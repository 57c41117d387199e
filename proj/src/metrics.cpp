#include "relplane/metrics.hpp"

#include <cmath>
#include <sstream>

#include "relplane/errors.hpp"

namespace relplane {

const char* kMacroConventionNote =
    "macro precision/recall/f1 are unweighted means of per-label values over "
    "non-null labels";

namespace {

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

double f1_of(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

void check_triple(double p, double r, double f1) {
  if (p < 0.0 || p > 1.0 || r < 0.0 || r > 1.0 || f1 < 0.0 || f1 > 1.0)
    throw ValidationError("report: metric outside [0, 1]");
  if (std::abs(f1 - f1_of(p, r)) > 1e-9)
    throw ValidationError("report: f1 inconsistent with precision/recall");
}

}  // namespace

void EvalReport::validate() const {
  if (metric == MetricKind::Micro) {
    check_triple(precision, recall, f1);
  } else {
    // macro: the harmonic relation holds per label, not for the means
    if (precision < 0.0 || precision > 1.0 || recall < 0.0 || recall > 1.0 ||
        f1 < 0.0 || f1 > 1.0)
      throw ValidationError("report: metric outside [0, 1]");
    for (const auto& [label, c] : per_label) {
      double p = safe_div(c.tp, c.tp + c.fp);
      double r = safe_div(c.tp, c.tp + c.fn);
      check_triple(p, r, f1_of(p, r));
    }
  }
}

EvalReport compute_metrics(const std::vector<int>& gold,
                           const std::vector<int>& pred, const LabelSet& schema,
                           MetricKind metric) {
  if (gold.size() != pred.size())
    throw ValidationError("compute_metrics: gold/pred length mismatch");
  schema.validate();
  int null_id = schema.null_index();

  EvalReport report;
  report.metric = metric;
  for (const auto& l : schema.labels) report.per_label[l] = {};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    int gl = gold[i], pl = pred[i];
    if (gl < 0 || gl >= schema.size() || pl < 0 || pl >= schema.size())
      throw ValidationError("compute_metrics: label id out of range");
    ++report.per_label[schema.labels[gl]].support;
    if (pl == gl) ++report.per_label[schema.labels[gl]].tp;
    if (pl != gl) {
      ++report.per_label[schema.labels[pl]].fp;
      ++report.per_label[schema.labels[gl]].fn;
    }
  }

  if (metric == MetricKind::Micro) {
    long tp = 0, fp = 0, fn = 0;
    for (int l = 0; l < schema.size(); ++l) {
      if (l == null_id) continue;
      const LabelCounts& c = report.per_label[schema.labels[l]];
      tp += c.tp;
      fp += c.fp;
      fn += c.fn;
    }
    report.precision = safe_div(static_cast<double>(tp), static_cast<double>(tp + fp));
    report.recall = safe_div(static_cast<double>(tp), static_cast<double>(tp + fn));
    report.f1 = f1_of(report.precision, report.recall);
  } else {
    double sp = 0.0, sr = 0.0, sf = 0.0;
    int k = 0;
    for (int l = 0; l < schema.size(); ++l) {
      if (l == null_id) continue;
      const LabelCounts& c = report.per_label[schema.labels[l]];
      double p = safe_div(c.tp, c.tp + c.fp);
      double r = safe_div(c.tp, c.tp + c.fn);
      sp += p;
      sr += r;
      sf += f1_of(p, r);
      ++k;
    }
    report.precision = k ? sp / k : 0.0;
    report.recall = k ? sr / k : 0.0;
    report.f1 = k ? sf / k : 0.0;
  }
  return report;
}

std::string report_csv(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  os << "variant,precision,recall,f1,seed\n";
  os.setf(std::ios::fixed);
  os.precision(6);
  for (const auto& r : reports)
    os << r.variant << "," << r.precision << "," << r.recall << "," << r.f1
       << "," << r.seed << "\n";
  return os.str();
}

}  // namespace relplane
