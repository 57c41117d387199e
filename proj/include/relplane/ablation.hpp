#ifndef RELPLANE_ABLATION_HPP_
#define RELPLANE_ABLATION_HPP_

#include <string>
#include <vector>

#include "relplane/trainer.hpp"

namespace relplane {

struct Variant {
  std::string name;
  ModelConfig config;
};

// Built-in grids. "table5" is the eleven-row component-removal grid
// (full model, encoder/interaction/attention removals, and the scoped
// feature removals); "injection" covers the four feature-delivery
// variants FI/FR/BEF/AFT; "all" concatenates both.
std::vector<Variant> ablation_grid(const ModelConfig& base,
                                   const std::string& grid);

// Report fingerprints are variant-qualified so rows of one run are
// distinguishable even when two variants share a structural config
// (the full model and the FI variant coincide by construction).
std::string variant_fingerprint(const Variant& v);

std::vector<EvalReport> run_ablation(const ModelConfig& base,
                                     const std::string& grid,
                                     const std::vector<PreprocessedInstance>& train,
                                     const std::vector<PreprocessedInstance>& eval,
                                     const LabelSet& schema,
                                     const Vocabulary& vocab,
                                     const TrainOptions& opt = {});

}  // namespace relplane

#endif  // RELPLANE_ABLATION_HPP_
