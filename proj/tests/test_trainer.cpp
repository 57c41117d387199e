#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <set>

#include "relplane/ablation.hpp"
#include "relplane/synth.hpp"
#include "relplane/trainer.hpp"

using namespace relplane;

namespace {

struct Fixture {
  LabelSet schema = default_synth_schema();
  PreprocessedCorpus pre;
  Vocabulary vocab;

  explicit Fixture(int n, std::uint64_t seed = 5, double difficulty = 0.2) {
    Corpus corpus = generate_synthetic(seed, n, schema, difficulty);
    FixtureLexiconTagger tagger;
    pre = preprocess_corpus(corpus, tagger);
    vocab = build_vocabulary(pre);
  }

  ModelConfig small_config() const {
    ModelConfig cfg;
    cfg.d = 8;
    cfg.d_prime = 2;
    cfg.hdc_rates = {1, 2};
    cfg.heads = 2;
    cfg.dropout = 0.1;
    cfg.lr = 1e-3;
    cfg.batch = 8;
    cfg.epochs = 2;
    cfg.seed = 11;
    return cfg;
  }

  std::vector<ModelInput> inputs(const ModelConfig& cfg) const {
    std::vector<ModelInput> out;
    for (const auto& p : pre)
      out.push_back(make_model_input(p, vocab, cfg, schema));
    return out;
  }
};

}  // namespace

TEST_CASE("nll loss calibration") {
  std::vector<double> onehot = {0.0, 1.0, 0.0};
  CHECK(nll_loss(onehot, 1) <= 1e-6);
  std::vector<double> uniform(7, 1.0 / 7);
  CHECK(nll_loss(uniform, 3) == doctest::Approx(std::log(7.0)));
  Rng rng(2);
  for (int t = 0; t < 30; ++t) {
    std::vector<double> y(5);
    double z = 0.0;
    for (auto& x : y) {
      x = rng.uniform() + 1e-3;
      z += x;
    }
    for (auto& x : y) x /= z;
    int gold = static_cast<int>(rng.below(5));
    CHECK(nll_loss(y, gold) == doctest::Approx(-std::log(y[gold])));
    CHECK(nll_loss(y, gold) >= 0.0);
  }
  // flooring keeps the loss finite at zero probability
  std::vector<double> degenerate = {1.0, 0.0};
  CHECK(std::isfinite(nll_loss(degenerate, 1)));
}

TEST_CASE("lr schedule endpoints, apex, and shape") {
  CHECK(lr_schedule(0, 100, 1.0, 0.1) == 0.0);
  CHECK(lr_schedule(10, 100, 1.0, 0.1) == doctest::Approx(1.0));
  CHECK(lr_schedule(100, 100, 1.0, 0.1) == 0.0);
  CHECK(lr_schedule(55, 100, 1.0, 0.1) == doctest::Approx(0.5));
  CHECK_THROWS_AS(lr_schedule(0, 0, 1.0, 0.1), ValidationError);

  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    long total = 10 + static_cast<long>(rng.below(1000));
    double warmup = rng.uniform(0.01, 0.9);
    double base = rng.uniform(1e-5, 1e-2);
    long apex = static_cast<long>(warmup * total);
    CHECK(lr_schedule(0, total, base, warmup) == 0.0);
    CHECK(lr_schedule(total, total, base, warmup) == 0.0);
    for (long s : {total / 4, total / 2, 3 * total / 4}) {
      double v = lr_schedule(s, total, base, warmup);
      CHECK(v >= 0.0);
      CHECK(v <= base * (1.0 + 1e-12));
    }
    // exact apex when the warmup boundary is integral
    if (std::abs(warmup * total - apex) < 1e-9)
      CHECK(lr_schedule(apex, total, base, warmup) == doctest::Approx(base));
  }
}

TEST_CASE("hand confusion matrix matches frozen micro counts") {
  LabelSet schema{{"A", "B", "null"}, "null"};
  // gold A A B null ; pred A B B null -> TP 2, FP 1, FN 1
  std::vector<int> gold = {0, 0, 1, 2};
  std::vector<int> pred = {0, 1, 1, 2};
  EvalReport rep = compute_metrics(gold, pred, schema, MetricKind::Micro);
  CHECK(rep.precision == doctest::Approx(2.0 / 3.0));
  CHECK(rep.recall == doctest::Approx(2.0 / 3.0));
  CHECK(rep.f1 == doctest::Approx(2.0 / 3.0));
  CHECK(rep.per_label.at("A").tp == 1);
  CHECK(rep.per_label.at("A").fn == 1);
  CHECK(rep.per_label.at("B").fp == 1);
  rep.validate();
}

namespace {

// Independent oracle: full confusion matrix, then the metric definitions.
struct OracleMetrics {
  double micro_p, micro_r, micro_f1;
  double macro_p, macro_r, macro_f1;
};

OracleMetrics confusion_oracle(const std::vector<int>& gold,
                               const std::vector<int>& pred, int k, int null_id) {
  std::vector<std::vector<long>> m(k, std::vector<long>(k, 0));
  for (std::size_t i = 0; i < gold.size(); ++i) ++m[gold[i]][pred[i]];
  long tp = 0, fp = 0, fn = 0;
  double sp = 0, sr = 0, sf = 0;
  int labels = 0;
  for (int l = 0; l < k; ++l) {
    if (l == null_id) continue;
    long tpl = m[l][l], fpl = 0, fnl = 0;
    for (int o = 0; o < k; ++o) {
      if (o == l) continue;
      fpl += m[o][l];
      fnl += m[l][o];
    }
    tp += tpl;
    fp += fpl;
    fn += fnl;
    double p = tpl + fpl ? double(tpl) / double(tpl + fpl) : 0.0;
    double r = tpl + fnl ? double(tpl) / double(tpl + fnl) : 0.0;
    sp += p;
    sr += r;
    sf += (p + r) ? 2 * p * r / (p + r) : 0.0;
    ++labels;
  }
  OracleMetrics o;
  o.micro_p = tp + fp ? double(tp) / double(tp + fp) : 0.0;
  o.micro_r = tp + fn ? double(tp) / double(tp + fn) : 0.0;
  o.micro_f1 = (o.micro_p + o.micro_r)
                   ? 2 * o.micro_p * o.micro_r / (o.micro_p + o.micro_r)
                   : 0.0;
  o.macro_p = sp / labels;
  o.macro_r = sr / labels;
  o.macro_f1 = sf / labels;
  return o;
}

}  // namespace

TEST_CASE("micro and macro agree with the confusion-matrix oracle") {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    int k = 2 + static_cast<int>(rng.below(6));
    LabelSet schema;
    for (int l = 0; l < k; ++l) schema.labels.push_back("L" + std::to_string(l));
    int null_id = static_cast<int>(rng.below(k));
    schema.null_label = schema.labels[null_id];
    int n = 1 + static_cast<int>(rng.below(60));
    std::vector<int> gold(n), pred(n);
    for (int i = 0; i < n; ++i) {
      gold[i] = static_cast<int>(rng.below(k));
      pred[i] = static_cast<int>(rng.below(k));
    }
    OracleMetrics oracle = confusion_oracle(gold, pred, k, null_id);
    EvalReport micro = compute_metrics(gold, pred, schema, MetricKind::Micro);
    EvalReport macro = compute_metrics(gold, pred, schema, MetricKind::Macro);
    CHECK(std::abs(micro.precision - oracle.micro_p) <= 1e-12);
    CHECK(std::abs(micro.recall - oracle.micro_r) <= 1e-12);
    CHECK(std::abs(micro.f1 - oracle.micro_f1) <= 1e-12);
    CHECK(std::abs(macro.precision - oracle.macro_p) <= 1e-12);
    CHECK(std::abs(macro.recall - oracle.macro_r) <= 1e-12);
    CHECK(std::abs(macro.f1 - oracle.macro_f1) <= 1e-12);
  }
}

TEST_CASE("all-correct predictions score a perfect report") {
  LabelSet schema{{"A", "B", "null"}, "null"};
  std::vector<int> gold = {0, 1, 0, 2};
  EvalReport rep = compute_metrics(gold, gold, schema, MetricKind::Micro);
  CHECK(rep.precision == 1.0);
  CHECK(rep.recall == 1.0);
  CHECK(rep.f1 == 1.0);
}

TEST_CASE("report csv is byte-stable with the pinned header") {
  EvalReport a;
  a.variant = "full";
  a.precision = 0.5;
  a.recall = 0.25;
  a.f1 = 1.0 / 3.0;
  a.seed = 7;
  std::string csv = report_csv({a});
  CHECK(csv ==
        "variant,precision,recall,f1,seed\nfull,0.500000,0.250000,0.333333,7\n");
}

TEST_CASE("training is deterministic and starts near the uniform loss") {
  Fixture fx(40);
  ModelConfig cfg = fx.small_config();
  int k = fx.schema.size();

  auto run = [&]() {
    Model model(cfg, fx.schema, fx.vocab);
    Trainer trainer(model);
    TrainResult res = trainer.train(fx.inputs(cfg), nullptr, {});
    return std::pair<TrainResult, std::uint64_t>(res, model.params().value_hash());
  };
  auto [res1, hash1] = run();
  auto [res2, hash2] = run();
  CHECK(res1.epoch_loss == res2.epoch_loss);  // bit-identical traces
  CHECK(hash1 == hash2);
  CHECK(std::abs(res1.epoch_loss.front() - std::log(double(k))) < 0.5);
}

TEST_CASE("training rejects empty sets and reports divergence") {
  Fixture fx(10);
  ModelConfig cfg = fx.small_config();
  Model model(cfg, fx.schema, fx.vocab);
  Trainer trainer(model);
  std::vector<ModelInput> empty;
  CHECK_THROWS_AS(trainer.train(empty, nullptr, {}), ValidationError);
  CHECK_THROWS_AS(trainer.evaluate(empty, MetricKind::Micro), ValidationError);

  // blow up the parameters to force a non-finite loss
  ModelConfig hot = cfg;
  hot.lr = 1e6;
  hot.epochs = 30;
  hot.dropout = 0.0;
  Model doomed(hot, fx.schema, fx.vocab);
  for (auto& e : doomed.params().entries())
    for (auto& v : e.value.v) v *= 1e150;
  Trainer hot_trainer(doomed);
  CHECK_THROWS_AS(hot_trainer.train(fx.inputs(hot), nullptr, {}), DivergenceError);
}

TEST_CASE("best-dev parameters are retained") {
  Fixture fx(60, 9, 0.0);
  Fixture dev_fx(20, 10, 0.0);
  ModelConfig cfg = fx.small_config();
  cfg.epochs = 4;
  Model model(cfg, fx.schema, fx.vocab);
  Trainer trainer(model);
  auto dev = dev_fx.inputs(cfg);
  // dev vocabulary must come from the training fixture
  dev.clear();
  for (const auto& p : dev_fx.pre)
    dev.push_back(make_model_input(p, fx.vocab, cfg, fx.schema));
  TrainResult res = trainer.train(fx.inputs(cfg), &dev, {});
  REQUIRE(res.best_epoch >= 0);
  REQUIRE(res.dev_f1.size() == 4);
  EvalReport final_rep = trainer.evaluate(dev, cfg.metric);
  double best = *std::max_element(res.dev_f1.begin(), res.dev_f1.end());
  CHECK(final_rep.f1 == doctest::Approx(best));
}

TEST_CASE("checkpoints round trip bit-exactly") {
  Fixture fx(20);
  ModelConfig cfg = fx.small_config();
  cfg.epochs = 1;
  Model model(cfg, fx.schema, fx.vocab);
  Trainer trainer(model);
  trainer.train(fx.inputs(cfg), nullptr, {});

  std::string path = "/tmp/relplane_ckpt_" + std::to_string(::getpid());
  save_checkpoint(path, model);
  Checkpoint ckpt = load_checkpoint(path);
  CHECK(ckpt.config == cfg);
  CHECK(ckpt.vocab == fx.vocab);
  CHECK(ckpt.schema.labels == fx.schema.labels);
  Model revived = model_from_checkpoint(ckpt);
  CHECK(revived.params().value_hash() == model.params().value_hash());
  auto inputs = fx.inputs(cfg);
  for (int i = 0; i < 5; ++i)
    CHECK(revived.predict(inputs[i]) == model.predict(inputs[i]));
  std::remove(path.c_str());
}

TEST_CASE("model parity: the encode op matches the training-path encoder") {
  Fixture fx(8, 21, 0.0);
  ModelConfig cfg = fx.small_config();
  cfg.dropout = 0.0;
  Model model(cfg, fx.schema, fx.vocab);
  // standalone encode over the lookup adapter
  LookupAdapter adapter(fx.vocab, model.params().get(kEmbeddingParam).value);
  const auto& p = fx.pre[0];
  MarkedSentence marked;
  marked.tokens = p.marked_tokens;
  marked.m1l = p.m1l;
  marked.m1r = p.m1r;
  marked.m2l = p.m2l;
  marked.m2r = p.m2r;
  marked.e1_positions = p.e1_rows;
  marked.e2_positions = p.e2_rows;
  marked.origin.e1 = {p.e1_start, p.e1_end, "T", "s", "h"};
  marked.origin.e2 = {p.e2_start, p.e2_end, "T", "s", "h"};
  FeatureSequence feats;
  feats.symbols = p.features;
  auto [H, Hf] = encode(marked, feats, adapter, model.params());

  ModelInput in = make_model_input(p, fx.vocab, cfg, fx.schema);
  Model::Pass pass;
  model.forward(pass, in, false, nullptr);
  // the plane input equals the encoded sentence: compare via the
  // injection-free plane at identity CLN init against cln(H)
  Tensor P = cln(H.H, model.params());
  Tensor Hf_used = Hf.Hf;
  InjectionMap map = build_injection_map(marked);
  Tensor P_inj = inject(P, Hf_used, map, cfg.injection_mode);
  const Tensor& model_plane = pass.graph.val(pass.plane_cells);
  REQUIRE(model_plane.rows == P_inj.rows);
  for (std::size_t i = 0; i < P_inj.v.size(); ++i)
    CHECK(model_plane.v[i] == doctest::Approx(P_inj.v[i]).epsilon(1e-12));
}

TEST_CASE("ablation grids have the pinned sizes and distinct fingerprints") {
  ModelConfig base;
  base.epochs = 1;
  auto t5 = ablation_grid(base, "table5");
  CHECK(t5.size() == 11);
  auto inj = ablation_grid(base, "injection");
  CHECK(inj.size() == 4);
  auto all = ablation_grid(base, "all");
  CHECK(all.size() == 15);
  CHECK_THROWS_AS(ablation_grid(base, "bogus"), ConfigError);

  std::set<std::string> fingerprints;
  for (const auto& v : all) fingerprints.insert(variant_fingerprint(v));
  CHECK(fingerprints.size() == 15);

  // named rows resolve to the expected flag settings
  CHECK(all[1].config.use_bilstm == false);
  CHECK(all[2].config.use_plane == false);
  CHECK(all[3].config.use_hdc == false);
  CHECK(all[4].config.use_cfa == false);
  CHECK(all[10].config.use_feature_engineering == false);
  CHECK(all[12].config.injection_mode == InjectionMode::FR);
}

TEST_CASE("config validation names conflicting flags") {
  ModelConfig cfg;
  cfg.use_cfa = false;
  cfg.use_cfa_linear = false;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("use_cfa"), ConfigError);
  ModelConfig cfg2;
  cfg2.use_plane = false;
  cfg2.use_hdc = false;
  CHECK_THROWS_WITH_AS(cfg2.validate(), doctest::Contains("use_hdc"), ConfigError);
}

TEST_CASE("config files round trip through the flat key-value format") {
  ModelConfig cfg;
  cfg.d = 16;
  cfg.d_prime = 4;
  cfg.hdc_rates = {1, 2, 3};
  cfg.lr = 2e-3;
  cfg.injection_mode = InjectionMode::BEF;
  cfg.metric = MetricKind::Macro;
  cfg.use_cfa_attention = true;
  std::string path = "/tmp/relplane_cfg_" + std::to_string(::getpid());
  cfg.save(path);
  ModelConfig loaded = ModelConfig::load(path);
  CHECK(loaded == cfg);
  CHECK(loaded.fingerprint() == cfg.fingerprint());
  std::remove(path.c_str());

  CHECK_THROWS_AS(ModelConfig::parse("bogus_key = 3\n"), ConfigError);
  CHECK_THROWS_AS(ModelConfig::parse("d 16\n"), ConfigError);
}

TEST_CASE("every grid variant trains one epoch on a small corpus") {
  Fixture fx(50, 33, 0.4);
  ModelConfig base = fx.small_config();
  base.epochs = 1;
  base.batch = 16;
  std::vector<EvalReport> reports =
      run_ablation(base, "all", fx.pre, fx.pre, fx.schema, fx.vocab, {});
  REQUIRE(reports.size() == 15);
  std::set<std::string> names, fps;
  for (const auto& r : reports) {
    names.insert(r.variant);
    fps.insert(r.fingerprint);
    CHECK(r.f1 >= 0.0);
    CHECK(r.f1 <= 1.0);
    r.validate();
  }
  CHECK(names.size() == 15);
  CHECK(fps.size() == 15);
  std::string csv = report_csv(reports);
  CHECK(csv.rfind("variant,precision,recall,f1,seed\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 16);
}

TEST_CASE("vocabulary files preserve ids line by line") {
  Fixture fx(12);
  std::string path = "/tmp/relplane_vocab_" + std::to_string(::getpid());
  fx.vocab.save(path);
  Vocabulary loaded = Vocabulary::load(path);
  CHECK(loaded == fx.vocab);
  std::remove(path.c_str());
}

TEST_CASE("preprocessing cache round trips byte-identically") {
  Fixture fx(15, 44, 0.5);
  std::string p1 = "/tmp/relplane_cache1_" + std::to_string(::getpid());
  std::string p2 = "/tmp/relplane_cache2_" + std::to_string(::getpid());
  save_cache(fx.pre, p1);
  PreprocessedCorpus loaded = load_cache(p1);
  REQUIRE(loaded.size() == fx.pre.size());
  save_cache(loaded, p2);
  std::ifstream a(p1), b(p2);
  std::string sa((std::istreambuf_iterator<char>(a)), {});
  std::string sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);
  CHECK(loaded[3].marked_tokens == fx.pre[3].marked_tokens);
  CHECK(loaded[3].features == fx.pre[3].features);
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}
