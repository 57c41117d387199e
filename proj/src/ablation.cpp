#include "relplane/ablation.hpp"

#include "relplane/errors.hpp"

namespace relplane {

namespace {

std::vector<Variant> table5_grid(const ModelConfig& base) {
  std::vector<Variant> out;
  auto push = [&](const std::string& name, auto mutate) {
    ModelConfig c = base;
    mutate(c);
    c.validate();
    out.push_back({name, std::move(c)});
  };
  push("full", [](ModelConfig&) {});
  push("wo_bilstm", [](ModelConfig& c) { c.use_bilstm = false; });
  push("wo_ti", [](ModelConfig& c) { c.use_plane = false; });
  push("wo_hdc", [](ModelConfig& c) { c.use_hdc = false; });
  push("wo_cfa", [](ModelConfig& c) { c.use_cfa = false; });
  push("wo_cfa_linear", [](ModelConfig& c) { c.use_cfa_linear = false; });
  push("wo_cfa_attention", [](ModelConfig& c) { c.use_cfa_attention = false; });
  push("wo_cfa_complex_feature",
       [](ModelConfig& c) { c.use_cfa_feature_query = false; });
  push("wo_cfa_feature_engineering", [](ModelConfig& c) {
    c.use_cfa_feature_query = false;
    c.use_cfa_marked_entities = false;
  });
  push("wo_complex_feature",
       [](ModelConfig& c) { c.use_complex_features = false; });
  push("wo_feature_engineering",
       [](ModelConfig& c) { c.use_feature_engineering = false; });
  return out;
}

std::vector<Variant> injection_grid(const ModelConfig& base) {
  std::vector<Variant> out;
  for (auto [name, mode] :
       {std::pair<const char*, InjectionMode>{"fi", InjectionMode::FI},
        {"fr", InjectionMode::FR},
        {"bef", InjectionMode::BEF},
        {"aft", InjectionMode::AFT}}) {
    ModelConfig c = base;
    c.injection_mode = mode;
    c.validate();
    out.push_back({name, std::move(c)});
  }
  return out;
}

}  // namespace

std::vector<Variant> ablation_grid(const ModelConfig& base,
                                   const std::string& grid) {
  base.validate();
  if (grid == "table5") return table5_grid(base);
  if (grid == "injection") return injection_grid(base);
  if (grid == "all") {
    auto out = table5_grid(base);
    auto inj = injection_grid(base);
    out.insert(out.end(), inj.begin(), inj.end());
    return out;
  }
  throw ConfigError("unknown ablation grid '" + grid +
                    "' (expected table5, injection, or all)");
}

std::string variant_fingerprint(const Variant& v) {
  return hex64(fnv1a_hash(v.name + "\n" + v.config.canonical()));
}

std::vector<EvalReport> run_ablation(const ModelConfig& base,
                                     const std::string& grid,
                                     const std::vector<PreprocessedInstance>& train,
                                     const std::vector<PreprocessedInstance>& eval,
                                     const LabelSet& schema,
                                     const Vocabulary& vocab,
                                     const TrainOptions& opt) {
  std::vector<EvalReport> reports;
  for (const Variant& variant : ablation_grid(base, grid)) {
    Model model(variant.config, schema, vocab);
    std::vector<ModelInput> train_in, eval_in;
    train_in.reserve(train.size());
    for (const auto& p : train)
      train_in.push_back(make_model_input(p, vocab, variant.config, schema));
    eval_in.reserve(eval.size());
    for (const auto& p : eval)
      eval_in.push_back(make_model_input(p, vocab, variant.config, schema));
    Trainer trainer(model);
    trainer.train(train_in, nullptr, opt);
    EvalReport report = trainer.evaluate(eval_in, variant.config.metric);
    report.variant = variant.name;
    report.fingerprint = variant_fingerprint(variant);
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace relplane
