#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "relplane/corpus.hpp"
#include "relplane/metrics.hpp"
#include "relplane/synth.hpp"

using namespace relplane;

namespace {

std::string temp_path(const std::string& stem) {
  return std::string("/tmp/relplane_corpus_") + stem + "_" +
         std::to_string(::getpid());
}

LabelSet test_schema() {
  return LabelSet{{"phys", "org-aff", "no_relation"}, "no_relation"};
}

RelationInstance case_b_instance() {
  RelationInstance inst;
  inst.tokens = {"vivendi", "universal", "officials", "in",  "the",
                 "united",  "states",    "were",      "not", "available"};
  inst.e1 = {2, 3, "PER", "individual", "officials"};
  inst.e2 = {5, 7, "GPE", "nation", "states"};
  inst.label = "phys";
  inst.doc_id = "case-b";
  return inst;
}

}  // namespace

TEST_CASE("corpus round trip preserves records") {
  LabelSet schema = test_schema();
  Corpus corpus = {case_b_instance()};
  RelationInstance second = case_b_instance();
  second.doc_id = "case-b2";
  second.label = "no_relation";
  corpus.push_back(second);

  std::string path = temp_path("roundtrip");
  save_corpus(corpus, path);
  Corpus reloaded = load_corpus(path, schema);
  CHECK(reloaded == corpus);
  // serialize(load(p)) is byte-stable
  std::string path2 = temp_path("roundtrip2");
  save_corpus(reloaded, path2);
  std::ifstream a(path), b(path2);
  std::string sa((std::istreambuf_iterator<char>(a)), {});
  std::string sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("load_corpus reports gold label from an annotated record") {
  std::string path = temp_path("one");
  save_corpus({case_b_instance()}, path);
  Corpus c = load_corpus(path, test_schema());
  REQUIRE(c.size() == 1);
  CHECK(c[0].label == "phys");
  CHECK(c[0].e1.etype == "PER");
  CHECK(c[0].e2.etype == "GPE");
  std::remove(path.c_str());
}

TEST_CASE("empty file loads as an empty corpus") {
  std::string path = temp_path("empty");
  std::ofstream(path).close();
  CHECK(load_corpus(path, test_schema()).empty());
  std::remove(path.c_str());
}

TEST_CASE("load errors carry line numbers, doc ids, and label names") {
  std::string path = temp_path("bad");
  LabelSet schema = test_schema();

  // malformed record -> parse error with line number
  {
    std::ofstream f(path);
    f << corpus_record_line(case_b_instance()) << "\n";
    f << "{not json\n";
  }
  CHECK_THROWS_WITH_AS(load_corpus(path, schema),
                       doctest::Contains("line 2"), ParseError);

  // span out of bounds -> validation error naming doc_id
  {
    RelationInstance bad = case_b_instance();
    bad.e1.end = static_cast<int>(bad.tokens.size()) + 1;
    std::ofstream f(path);
    f << corpus_record_line(bad) << "\n";
  }
  CHECK_THROWS_WITH_AS(load_corpus(path, schema),
                       doctest::Contains("case-b"), ValidationError);

  // unknown label -> schema error
  {
    RelationInstance bad = case_b_instance();
    bad.label = "mystery";
    std::ofstream f(path);
    f << corpus_record_line(bad) << "\n";
  }
  CHECK_THROWS_WITH_AS(load_corpus(path, schema),
                       doctest::Contains("mystery"), SchemaError);
  std::remove(path.c_str());
}

TEST_CASE("schema file round trip and validation") {
  std::string path = temp_path("schema");
  LabelSet schema = test_schema();
  save_schema(schema, path);
  CHECK(load_schema(path) == schema);

  LabelSet dup{{"a", "a", "n"}, "n"};
  CHECK_THROWS_AS(dup.validate(), SchemaError);
  LabelSet missing{{"a", "b"}, "n"};
  CHECK_THROWS_AS(missing.validate(), SchemaError);
  std::remove(path.c_str());
}

TEST_CASE("fixture tagger is a deterministic lexicon with X fallback") {
  FixtureLexiconTagger tagger;
  PosTags tags = pos_tag({"the", "cat"}, tagger);
  CHECK(tags.tags == std::vector<std::string>{"DT", "NN"});
  CHECK(pos_tag({}, tagger).tags.empty());
  CHECK(pos_tag({"zzzunknown"}, tagger).tags == std::vector<std::string>{"X"});
  // alignment: n tokens -> n tags
  for (int n : {1, 5, 17}) {
    std::vector<std::string> toks(n, "the");
    CHECK(static_cast<int>(pos_tag(toks, tagger).tags.size()) == n);
  }
}

namespace {

// misaligned on purpose
struct BrokenTagger : PosTagger {
  std::vector<std::string> tag(const std::vector<std::string>& tokens) const override {
    return std::vector<std::string>(tokens.size() + 1, "X");
  }
};

}  // namespace

TEST_CASE("misaligned tagger output raises an alignment error") {
  BrokenTagger broken;
  CHECK_THROWS_AS(pos_tag({"a", "b"}, broken), ValidationError);
}

TEST_CASE("corpus stats count per label and sum to the corpus size") {
  LabelSet schema = test_schema();
  Corpus corpus;
  for (int i = 0; i < 3; ++i) {
    RelationInstance in = case_b_instance();
    in.doc_id = "d" + std::to_string(i);
    in.label = i < 2 ? "phys" : "org-aff";
    corpus.push_back(in);
  }
  CorpusStats stats = corpus_stats(corpus);
  CHECK(stats.per_label.at("phys") == 2);
  CHECK(stats.per_label.at("org-aff") == 1);
  CHECK(stats.total == 3);
  CHECK(corpus_stats({}).total == 0);

  // independent linear recount
  std::map<std::string, int> recount;
  for (const auto& inst : corpus) ++recount[inst.label];
  int total = 0;
  for (auto& [label, n] : stats.per_label) {
    CHECK(recount[label] == n);
    total += n;
  }
  CHECK(total == stats.total);
}

TEST_CASE("synthetic generator meets its count and determinism contracts") {
  LabelSet schema = default_synth_schema();
  Corpus a = generate_synthetic(7, 10, schema, 0.0);
  CHECK(a.size() == 10);
  Corpus b = generate_synthetic(7, 10, schema, 0.0);
  CHECK(a == b);
  Corpus c = generate_synthetic(8, 10, schema, 0.0);
  CHECK(a != c);
  CHECK(generate_synthetic(7, 0, schema, 0.0).empty());
  // degenerate knobs clamp instead of failing
  CHECK(generate_synthetic(7, 5, schema, 7.5).size() == 5);
  CHECK(generate_synthetic(7, 5, schema, -1.0).size() == 5);
}

TEST_CASE("every generated instance validates and the rule oracle scores F1 = 1") {
  LabelSet schema = default_synth_schema();
  for (double difficulty : {0.0, 0.5, 1.0}) {
    Corpus corpus = generate_synthetic(11, 200, schema, difficulty);
    std::vector<int> gold, pred;
    for (const auto& inst : corpus) {
      validate_instance(inst, schema);
      gold.push_back(schema.index_of(inst.label));
      pred.push_back(schema.index_of(synth_rule_label(inst, schema)));
    }
    EvalReport rep = compute_metrics(gold, pred, schema, MetricKind::Micro);
    CHECK(rep.f1 == doctest::Approx(1.0));
  }
}

TEST_CASE("difficulty produces sentence-sharing instance pairs") {
  LabelSet schema = default_synth_schema();
  Corpus corpus = generate_synthetic(13, 300, schema, 1.0);
  std::map<std::string, int> sentence_count;
  for (const auto& inst : corpus) {
    std::string key;
    for (const auto& t : inst.tokens) key += t + " ";
    ++sentence_count[key];
  }
  int shared = 0;
  for (auto& [k, n] : sentence_count)
    if (n > 1) ++shared;
  CHECK(shared > 0);

  // all four geometries appear at scale
  std::set<std::string> orders;
  for (const auto& inst : corpus) {
    bool same = inst.e1.start == inst.e2.start && inst.e1.end == inst.e2.end;
    bool c12 = inst.e1.start <= inst.e2.start && inst.e2.end <= inst.e1.end && !same;
    bool c21 = inst.e2.start <= inst.e1.start && inst.e1.end <= inst.e2.end && !same;
    if (c12) orders.insert("three");
    else if (c21) orders.insert("four");
    else if (inst.e1.start < inst.e2.start) orders.insert("one");
    else orders.insert("two");
  }
  CHECK(orders.size() == 4);
}

TEST_CASE("null instances carry no trigger and nulls are configurable") {
  LabelSet schema = default_synth_schema();
  SynthOptions opt;
  opt.null_fraction = 0.5;
  Corpus corpus = generate_synthetic(17, 200, schema, 0.3, opt);
  int nulls = 0;
  for (const auto& inst : corpus) {
    bool has_trigger = false;
    for (const auto& tok : inst.tokens)
      for (const auto& trig : synth_triggers())
        if (tok == trig) has_trigger = true;
    if (inst.label == schema.null_label) {
      ++nulls;
      CHECK(!has_trigger);
    } else {
      CHECK(has_trigger);
    }
  }
  CHECK(nulls > 50);

  SynthOptions none;
  none.null_fraction = 0.0;
  for (const auto& inst : generate_synthetic(17, 50, schema, 0.0, none))
    CHECK(inst.label != schema.null_label);
}
