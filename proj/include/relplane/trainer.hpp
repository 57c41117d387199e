#ifndef RELPLANE_TRAINER_HPP_
#define RELPLANE_TRAINER_HPP_

#include <string>
#include <vector>

#include "relplane/metrics.hpp"
#include "relplane/model.hpp"

namespace relplane {

// -log Y[gold], probabilities floored at 1e-12.
double nll_loss(const std::vector<double>& distribution, int gold);

// Linear ramp to base_lr over the first warmup*total steps, then linear
// decay to zero at `total`.
double lr_schedule(long step, long total, double base_lr, double warmup);

struct TrainOptions {
  int eval_train_every = 0;       // epochs between training-set evaluations
  double stop_at_train_f1 = -1.0; // stop once reached (negative: off)
  bool verbose = false;
};

struct TrainResult {
  std::vector<double> epoch_loss;  // mean instance loss per epoch
  std::vector<double> dev_f1;      // per epoch, when a dev set is given
  std::vector<double> train_f1;    // sparse, per eval_train_every
  int best_epoch = -1;             // dev-selected; -1 without a dev set
  int epochs_run = 0;
};

// AdamW with decoupled weight decay 0.01, global-norm gradient clipping
// at 1.0, seed-fixed batch order, and best-dev parameter retention.
class Trainer {
 public:
  explicit Trainer(Model& model) : model_(&model) {}

  TrainResult train(const std::vector<ModelInput>& train_set,
                    const std::vector<ModelInput>* dev_set,
                    const TrainOptions& opt = {});

  EvalReport evaluate(const std::vector<ModelInput>& dataset, MetricKind metric);

 private:
  Model* model_;
};

// --- checkpoints -------------------------------------------------------------
// Versioned binary blob: config (with fingerprint), schema, vocabulary,
// and all parameter tensors.

struct Checkpoint {
  ModelConfig config;
  LabelSet schema;
  Vocabulary vocab;
  std::vector<std::pair<std::string, Tensor>> params;
};

void save_checkpoint(const std::string& path, const Model& model);
Checkpoint load_checkpoint(const std::string& path);
Model model_from_checkpoint(const Checkpoint& ckpt);

}  // namespace relplane

#endif  // RELPLANE_TRAINER_HPP_
