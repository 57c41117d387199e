#ifndef RELPLANE_MODEL_HPP_
#define RELPLANE_MODEL_HPP_

#include <memory>
#include <string>
#include <vector>

#include "relplane/config.hpp"
#include "relplane/preprocess.hpp"

namespace relplane {

// One instance resolved to vocabulary ids plus the geometry the forward
// pass needs. `sent_ids` is the marked sequence, or the plain sequence
// when feature engineering is disabled.
struct ModelInput {
  std::vector<int> sent_ids;
  std::vector<int> plain_ids;
  std::vector<int> feat_ids;          // 8 combined-feature ids
  std::vector<int> e1_rows, e2_rows;  // entity word rows within sent_ids
  std::vector<int> e1_plain, e2_plain;
  InjectionMap injection;  // valid when feature engineering is on
  int gold = -1;
  std::string doc_id;
  std::vector<std::string> sent_tokens;      // heat-map headers
  std::array<std::string, 8> feat_symbols;
};

ModelInput make_model_input(const PreprocessedInstance& pre,
                            const Vocabulary& vocab, const ModelConfig& cfg,
                            const LabelSet& schema);

// The assembled network. Construction initializes every block's
// parameters from the config seed; the ablation flags and injection mode
// select which blocks participate in a forward pass.
class Model {
 public:
  Model(const ModelConfig& cfg, const LabelSet& schema, const Vocabulary& vocab);

  const ModelConfig& config() const { return cfg_; }
  const LabelSet& schema() const { return schema_; }
  const Vocabulary& vocab() const { return vocab_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  // Width of the pooled plane part of the classifier input.
  int pooled_plane_dim() const;
  int classifier_input_dim() const;

  struct Pass {
    Graph graph;
    std::unique_ptr<ParamContext> pc;
    Graph::NodeId logits = -1;
    Graph::NodeId loss = -1;
    Graph::NodeId plane_cells = -1;  // post-injection plane (empty if no plane)
    Graph::NodeId plane_stack = -1;  // convolution stack output
    int plane_extent = 0;
    std::vector<std::string> plane_headers;
  };

  // Builds the forward graph. With `training` set, dropout is applied
  // (consuming `rng`) and parameters are bound with gradients enabled;
  // gold >= 0 adds the loss node.
  void forward(Pass& pass, const ModelInput& input, bool training, Rng* rng) const;

  std::vector<double> predict_proba(const ModelInput& input) const;
  int predict(const ModelInput& input) const;

 private:
  ModelConfig cfg_;
  LabelSet schema_;
  Vocabulary vocab_;
  mutable ParamStore params_;  // values are const in forward; ParamContext
                               // needs mutable access for gradient harvest
};

}  // namespace relplane

#endif  // RELPLANE_MODEL_HPP_
