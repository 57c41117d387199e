#include "relplane/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "relplane/errors.hpp"

namespace relplane {

double nll_loss(const std::vector<double>& distribution, int gold) {
  if (gold < 0 || gold >= static_cast<int>(distribution.size()))
    throw ValidationError("nll_loss: gold label out of range");
  return -std::log(std::max(distribution[gold], 1e-12));
}

double lr_schedule(long step, long total, double base_lr, double warmup) {
  if (total <= 0) throw ValidationError("lr_schedule: total must be positive");
  if (step < 0 || step > total)
    throw ValidationError("lr_schedule: step outside [0, total]");
  double w = warmup * static_cast<double>(total);
  if (static_cast<double>(step) <= w)
    return w == 0.0 ? base_lr : base_lr * static_cast<double>(step) / w;
  return base_lr * static_cast<double>(total - step) /
         (static_cast<double>(total) - w);
}

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
constexpr double kWeightDecay = 0.01;
constexpr double kClipNorm = 1.0;

}  // namespace

TrainResult Trainer::train(const std::vector<ModelInput>& train_set,
                           const std::vector<ModelInput>* dev_set,
                           const TrainOptions& opt) {
  if (train_set.empty()) throw ValidationError("train: empty training set");
  if (dev_set && dev_set->empty())
    throw ValidationError("train: empty development set");
  const ModelConfig& cfg = model_->config();
  ParamStore& store = model_->params();

  long steps_per_epoch =
      (static_cast<long>(train_set.size()) + cfg.batch - 1) / cfg.batch;
  long total_steps = std::max<long>(1, steps_per_epoch * cfg.epochs);

  Rng rng(cfg.seed ^ 0x7261696e72756eULL);
  std::vector<int> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  long global_step = 0;
  double best_dev = -1.0;
  std::vector<Tensor> best_values;

  auto snapshot = [&]() {
    best_values.clear();
    for (const auto& e : store.entries()) best_values.push_back(e.value);
  };
  auto restore = [&]() {
    for (std::size_t i = 0; i < best_values.size(); ++i)
      store.entries()[i].value = best_values[i];
  };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (long s = 0; s < steps_per_epoch; ++s) {
      store.zero_grads();
      long begin = s * cfg.batch;
      long end = std::min<long>(begin + cfg.batch,
                                static_cast<long>(train_set.size()));
      double batch_loss = 0.0;
      for (long i = begin; i < end; ++i) {
        const ModelInput& inst = train_set[order[i]];
        if (inst.gold < 0)
          throw ValidationError("train: instance '" + inst.doc_id +
                                "' has no gold label");
        Model::Pass pass;
        model_->forward(pass, inst, true, &rng);
        double l = pass.graph.val(pass.loss).v[0];
        if (!std::isfinite(l))
          throw DivergenceError("train: non-finite loss at epoch " +
                                std::to_string(epoch) + ", instance '" +
                                inst.doc_id + "'");
        batch_loss += l;
        pass.graph.backward(pass.loss);
        pass.pc->harvest();
      }
      long count = end - begin;
      store.scale_grads(1.0 / static_cast<double>(count));
      store.clip_grad_norm(kClipNorm);
      double lr = lr_schedule(global_step, total_steps, cfg.lr, cfg.warmup);
      store.adamw_step(lr, kBeta1, kBeta2, kAdamEps, kWeightDecay);
      ++global_step;
      loss_sum += batch_loss;
    }
    result.epoch_loss.push_back(loss_sum / static_cast<double>(train_set.size()));
    result.epochs_run = epoch + 1;

    if (dev_set) {
      EvalReport rep = evaluate(*dev_set, cfg.metric);
      result.dev_f1.push_back(rep.f1);
      if (rep.f1 > best_dev) {
        best_dev = rep.f1;
        result.best_epoch = epoch;
        snapshot();
      }
    }
    if (opt.verbose)
      std::cerr << "epoch " << epoch << " loss " << result.epoch_loss.back()
                << (dev_set ? " dev_f1 " + std::to_string(result.dev_f1.back())
                            : "")
                << "\n";
    if (opt.eval_train_every > 0 && (epoch + 1) % opt.eval_train_every == 0) {
      EvalReport rep = evaluate(train_set, cfg.metric);
      result.train_f1.push_back(rep.f1);
      if (opt.stop_at_train_f1 >= 0.0 && rep.f1 >= opt.stop_at_train_f1) break;
    }
  }

  if (dev_set && result.best_epoch >= 0) restore();
  return result;
}

EvalReport Trainer::evaluate(const std::vector<ModelInput>& dataset,
                             MetricKind metric) {
  if (dataset.empty()) throw ValidationError("evaluate: empty dataset");
  std::vector<int> gold, pred;
  gold.reserve(dataset.size());
  pred.reserve(dataset.size());
  for (const auto& inst : dataset) {
    if (inst.gold < 0)
      throw ValidationError("evaluate: instance '" + inst.doc_id +
                            "' has no gold label");
    gold.push_back(inst.gold);
    pred.push_back(model_->predict(inst));
  }
  EvalReport report = compute_metrics(gold, pred, model_->schema(), metric);
  report.fingerprint = model_->config().fingerprint();
  report.seed = model_->config().seed;
  report.validate();
  return report;
}

// --- checkpoints -------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'R', 'P', 'C', 'K', 'P', 'T', '0', '1'};

void write_u64(std::ostream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void write_str(std::ostream& os, const std::string& s) {
  write_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_str(std::istream& is) {
  std::uint64_t n = read_u64(is);
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  return s;
}

void write_tensor(std::ostream& os, const Tensor& t) {
  write_u64(os, static_cast<std::uint64_t>(t.rows));
  write_u64(os, static_cast<std::uint64_t>(t.cols));
  os.write(reinterpret_cast<const char*>(t.v.data()),
           static_cast<std::streamsize>(t.v.size() * sizeof(double)));
}

Tensor read_tensor(std::istream& is) {
  int rows = static_cast<int>(read_u64(is));
  int cols = static_cast<int>(read_u64(is));
  Tensor t(rows, cols);
  is.read(reinterpret_cast<char*>(t.v.data()),
          static_cast<std::streamsize>(t.v.size() * sizeof(double)));
  return t;
}

}  // namespace

void save_checkpoint(const std::string& path, const Model& model) {
  std::ostringstream os(std::ios::binary);
  os.write(kMagic, 8);
  write_str(os, model.config().fingerprint());
  write_str(os, model.config().canonical());
  std::ostringstream schema;
  for (const auto& l : model.schema().labels) schema << l << "\n";
  write_str(os, schema.str());
  write_str(os, model.schema().null_label);
  std::ostringstream vocab;
  for (const auto& s : model.vocab().symbols()) vocab << s << "\n";
  write_str(os, vocab.str());
  write_u64(os, model.params().entries().size());
  for (const auto& e : model.params().entries()) {
    write_str(os, e.name);
    write_tensor(os, e.value);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("checkpoint: cannot write '" + path + "'");
  f << os.str();
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("checkpoint: cannot open '" + path + "'");
  char magic[8];
  f.read(magic, 8);
  if (!f || std::memcmp(magic, kMagic, 8) != 0)
    throw ParseError("checkpoint: '" + path + "' has wrong magic or version");
  Checkpoint ckpt;
  std::string fingerprint = read_str(f);
  ckpt.config = ModelConfig::parse(read_str(f));
  if (ckpt.config.fingerprint() != fingerprint)
    throw ParseError("checkpoint: fingerprint mismatch");
  std::istringstream schema(read_str(f));
  std::string line;
  while (std::getline(schema, line))
    if (!line.empty()) ckpt.schema.labels.push_back(line);
  ckpt.schema.null_label = read_str(f);
  ckpt.schema.validate();
  ckpt.vocab = Vocabulary();
  {
    std::istringstream vs(read_str(f));
    Vocabulary v;
    std::vector<std::string> symbols;
    while (std::getline(vs, line)) symbols.push_back(line);
    // reconstruct exactly: reserved symbols are the first three lines
    if (symbols.size() < 3) throw ParseError("checkpoint: truncated vocabulary");
    for (std::size_t i = 3; i < symbols.size(); ++i) v.add(symbols[i]);
    ckpt.vocab = v;
  }
  std::uint64_t n = read_u64(f);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string name = read_str(f);
    ckpt.params.emplace_back(name, read_tensor(f));
  }
  if (!f) throw ParseError("checkpoint: truncated file");
  return ckpt;
}

Model model_from_checkpoint(const Checkpoint& ckpt) {
  Model model(ckpt.config, ckpt.schema, ckpt.vocab);
  for (const auto& [name, value] : ckpt.params) {
    auto& entry = model.params().get(name);
    if (!entry.value.same_shape(value))
      throw ParseError("checkpoint: shape mismatch for parameter '" + name + "'");
    entry.value = value;
  }
  return model;
}

}  // namespace relplane
