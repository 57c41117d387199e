#ifndef RELPLANE_METRICS_HPP_
#define RELPLANE_METRICS_HPP_

#include <map>
#include <string>
#include <vector>

#include "relplane/config.hpp"
#include "relplane/corpus.hpp"

namespace relplane {

struct LabelCounts {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  int support = 0;
};

// Null-label convention: the null label is excluded from micro counts
// and from the macro average. Macro precision/recall/f1 are unweighted
// means of the per-label values over all non-null labels in the schema.
struct EvalReport {
  std::string variant = "model";
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  MetricKind metric = MetricKind::Micro;
  std::map<std::string, LabelCounts> per_label;
  std::string fingerprint;
  std::uint64_t seed = 0;

  void validate() const;  // ranges and harmonic consistency
};

EvalReport compute_metrics(const std::vector<int>& gold,
                           const std::vector<int>& pred, const LabelSet& schema,
                           MetricKind metric);

// Comma-separated table, header `variant,precision,recall,f1,seed`,
// six decimal places, byte-stable.
std::string report_csv(const std::vector<EvalReport>& reports);

extern const char* kMacroConventionNote;

}  // namespace relplane

#endif  // RELPLANE_METRICS_HPP_
