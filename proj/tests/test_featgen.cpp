#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "relplane/featgen.hpp"
#include "relplane/rng.hpp"
#include "relplane/synth.hpp"

using namespace relplane;

namespace {

RelationInstance fixture_instance() {
  RelationInstance inst;
  inst.tokens = {"vivendi", "universal", "officials", "in",  "the",
                 "united",  "states",    "were",      "not", "available"};
  inst.e1 = {2, 3, "PER", "individual", "officials"};
  inst.e2 = {5, 7, "GPE", "nation", "states"};
  inst.label = "phys";
  inst.doc_id = "case-b";
  return inst;
}

EntitySpan span(int s, int e) { return {s, e, "T", "st", "h"}; }

// Independent re-parser: recovers spans from marker tokens by string
// matching, the oracle for the marker round trip.
struct Reparsed {
  EntitySpan e1, e2;
};

Reparsed reparse(const std::vector<std::string>& marked, const std::string& t1,
                 const std::string& t2) {
  auto find = [&](const std::string& token) {
    auto it = std::find(marked.begin(), marked.end(), token);
    REQUIRE(it != marked.end());
    return static_cast<int>(it - marked.begin());
  };
  int l1 = find(marker_token(t1, 1, false)), r1 = find(marker_token(t1, 1, true));
  int l2 = find(marker_token(t2, 2, false)), r2 = find(marker_token(t2, 2, true));
  std::set<int> markers = {l1, r1, l2, r2};
  // map marked positions to original indices
  std::map<int, int> orig;
  int k = 0;
  for (int i = 0; i < static_cast<int>(marked.size()); ++i)
    if (!markers.count(i)) orig[i] = k++;
  auto span_of = [&](int l, int r) {
    int begin = -1, end = -1;
    for (int i = l + 1; i < r; ++i) {
      if (markers.count(i)) continue;
      if (begin < 0) begin = orig[i];
      end = orig[i] + 1;
    }
    return std::pair<int, int>{begin, end};
  };
  auto [b1, e1] = span_of(l1, r1);
  auto [b2, e2] = span_of(l2, r2);
  Reparsed out;
  out.e1 = {b1, e1, t1, "", ""};
  out.e2 = {b2, e2, t2, "", ""};
  return out;
}

}  // namespace

TEST_CASE("relative order covers the four geometries and the overlap rule") {
  CHECK(relative_order(span(2, 4), span(7, 9)) == RelativeOrder::One);
  CHECK(relative_order(span(7, 9), span(2, 4)) == RelativeOrder::Two);
  CHECK(relative_order(span(2, 9), span(4, 6)) == RelativeOrder::Three);
  CHECK(relative_order(span(4, 6), span(2, 9)) == RelativeOrder::Four);
  // partial overlap: start precedence
  CHECK(relative_order(span(2, 5), span(4, 8)) == RelativeOrder::One);
  CHECK(relative_order(span(4, 8), span(2, 5)) == RelativeOrder::Two);
  // shared boundary containment is still containment
  CHECK(relative_order(span(2, 6), span(2, 4)) == RelativeOrder::Three);
  CHECK(relative_order(span(2, 6), span(4, 6)) == RelativeOrder::Three);
  // identical spans: entity 1 precedence
  CHECK(relative_order(span(2, 4), span(2, 4)) == RelativeOrder::One);
  // same start, different end
  CHECK(relative_order(span(2, 4), span(2, 8)) == RelativeOrder::Four);
}

TEST_CASE("atomic features on the fixture sentence match the hand-walked table") {
  RelationInstance inst = fixture_instance();
  FixtureLexiconTagger tagger;
  PosTags tags = pos_tag(inst.tokens, tagger);
  AtomicFeatures a = extract_atomic(inst, tags);
  CHECK(a.type1 == "PER");
  CHECK(a.type2 == "GPE");
  CHECK(a.subtype1 == "individual");
  CHECK(a.subtype2 == "nation");
  CHECK(a.left_pos1 == "JJ");    // universal
  CHECK(a.right_pos1 == "IN");   // in
  CHECK(a.left_pos2 == "DT");    // the
  CHECK(a.right_pos2 == "VBD");  // were
  CHECK(a.order == RelativeOrder::One);
  CHECK(a.head1 == "officials");
  CHECK(a.head2 == "states");
}

TEST_CASE("boundary entities take sentinel tags") {
  RelationInstance inst;
  inst.tokens = {"officials", "met", "states"};
  inst.e1 = {0, 1, "PER", "individual", "officials"};
  inst.e2 = {2, 3, "GPE", "nation", "states"};
  inst.label = "x";
  inst.doc_id = "edge";
  FixtureLexiconTagger tagger;
  AtomicFeatures a = extract_atomic(inst, pos_tag(inst.tokens, tagger));
  CHECK(a.left_pos1 == kBosTag);
  CHECK(a.right_pos2 == kEosTag);
}

TEST_CASE("misaligned tags raise an alignment error") {
  RelationInstance inst = fixture_instance();
  PosTags bad{{"DT", "NN"}};
  CHECK_THROWS_AS(extract_atomic(inst, bad), ValidationError);
}

TEST_CASE("combined features join atomics in the documented slot order") {
  RelationInstance inst = fixture_instance();
  FixtureLexiconTagger tagger;
  AtomicFeatures a = extract_atomic(inst, pos_tag(inst.tokens, tagger));
  ComplexFeatureSet cfs = combine(a);
  CHECK(cfs.cf[0] == "JJ∥PER");
  CHECK(cfs.cf[1] == "IN∥PER");
  CHECK(cfs.cf[2] == "DT∥GPE");
  CHECK(cfs.cf[3] == "VBD∥GPE");
  CHECK(cfs.cf[4] == "PER∥GPE");
  CHECK(cfs.cf[5] == "individual∥nation");
  CHECK(cfs.cf[6] == "officials∥states");
  CHECK(cfs.cf[7] == "one");
  // the first seven contain the separator exactly once, the eighth never
  for (int k = 0; k < 7; ++k) {
    auto first = cfs.cf[k].find(kCombineSeparator);
    REQUIRE(first != std::string::npos);
    CHECK(cfs.cf[k].find(kCombineSeparator, first + kCombineSeparator.size()) ==
          std::string::npos);
  }
  CHECK(cfs.cf[7].find(kCombineSeparator) == std::string::npos);
}

TEST_CASE("combine is pure and the pair feature splits back into its parts") {
  Rng rng(3);
  const std::vector<std::string> syms = {"PER", "ORG", "GPE", "FAC", "WEA"};
  for (int trial = 0; trial < 50; ++trial) {
    AtomicFeatures a;
    a.type1 = syms[rng.below(syms.size())];
    a.type2 = syms[rng.below(syms.size())];
    a.subtype1 = "s" + std::to_string(rng.below(9));
    a.subtype2 = "s" + std::to_string(rng.below(9));
    a.left_pos1 = a.right_pos1 = "P" + std::to_string(rng.below(5));
    a.left_pos2 = a.right_pos2 = "Q" + std::to_string(rng.below(5));
    a.head1 = "h" + std::to_string(rng.below(9));
    a.head2 = "g" + std::to_string(rng.below(9));
    a.order = static_cast<RelativeOrder>(rng.below(4));
    ComplexFeatureSet cfs = combine(a);
    CHECK(combine(a) == cfs);
    auto [t1, t2] = split_combined(cfs.cf[4]);
    CHECK(t1 == a.type1);
    CHECK(t2 == a.type2);
    for (const auto& s : cfs.cf) CHECK(!s.empty());
  }
}

TEST_CASE("markers wrap each entity with its typed tokens") {
  RelationInstance inst = fixture_instance();
  MarkedSentence marked = insert_markers(inst);
  CHECK(marked.length() == static_cast<int>(inst.tokens.size()) + 4);
  CHECK(marked.tokens[marked.m1l] == marker_token("PER", 1, false));
  CHECK(marked.tokens[marked.m1r] == marker_token("PER", 1, true));
  CHECK(marked.tokens[marked.m2l] == marker_token("GPE", 2, false));
  CHECK(marked.tokens[marked.m2r] == marker_token("GPE", 2, true));
  CHECK(marker_token("PER", 2, false) == "⟨PER_2⟩");
  CHECK(marker_token("PER", 2, true) == "⟨/PER_2⟩");
  // frozen layout for this fixture
  CHECK(marked.m1l == 2);
  CHECK(marked.m1r == 4);
  CHECK(marked.m2l == 7);
  CHECK(marked.m2r == 10);
  CHECK(marked.e1_positions == std::vector<int>{3});
  CHECK(marked.e2_positions == std::vector<int>{8, 9});
  CHECK(strip_markers(marked) == inst.tokens);
}

TEST_CASE("marker round trip recovers spans across random geometries") {
  Rng rng(29);
  for (int trial = 0; trial < 400; ++trial) {
    int n = 4 + static_cast<int>(rng.below(10));
    std::vector<std::string> tokens;
    for (int i = 0; i < n; ++i) tokens.push_back("w" + std::to_string(i));
    auto random_span = [&]() {
      int s = static_cast<int>(rng.below(n));
      int e = s + 1 + static_cast<int>(rng.below(n - s));
      return span(s, e);
    };
    RelationInstance inst;
    inst.tokens = tokens;
    inst.e1 = random_span();
    inst.e2 = random_span();
    inst.e1.etype = "PER";
    inst.e2.etype = "GPE";
    inst.doc_id = "t" + std::to_string(trial);
    inst.label = "x";

    MarkedSentence marked = insert_markers(inst);
    CHECK(marked.length() == n + 4);
    CHECK(strip_markers(marked) == tokens);
    // marker positions bracket the entity word rows
    REQUIRE(!marked.e1_positions.empty());
    CHECK(marked.m1l < marked.e1_positions.front());
    CHECK(marked.e1_positions.back() < marked.m1r);
    CHECK(marked.m2l < marked.e2_positions.front());
    CHECK(marked.e2_positions.back() < marked.m2r);

    Reparsed rep = reparse(marked.tokens, "PER", "GPE");
    CHECK(rep.e1.start == inst.e1.start);
    CHECK(rep.e1.end == inst.e1.end);
    CHECK(rep.e2.start == inst.e2.start);
    CHECK(rep.e2.end == inst.e2.end);
  }
}

TEST_CASE("nested entities nest their markers") {
  RelationInstance inst;
  inst.tokens = {"a", "b", "c", "d", "e", "f"};
  inst.e1 = {1, 5, "ORG", "company", "e"};
  inst.e2 = {2, 4, "PER", "individual", "d"};
  inst.doc_id = "nested";
  inst.label = "x";
  MarkedSentence m = insert_markers(inst);
  CHECK(m.tokens == std::vector<std::string>{
                        "a", marker_token("ORG", 1, false), "b",
                        marker_token("PER", 2, false), "c", "d",
                        marker_token("PER", 2, true), "e",
                        marker_token("ORG", 1, true), "f"});
  // shared start: outer opens first
  inst.e2 = {1, 3, "PER", "individual", "c"};
  m = insert_markers(inst);
  CHECK(m.tokens[1] == marker_token("ORG", 1, false));
  CHECK(m.tokens[2] == marker_token("PER", 2, false));
  // shared end: inner closes first
  inst.e2 = {3, 5, "PER", "individual", "e"};
  m = insert_markers(inst);
  CHECK(m.tokens[m.m2r] == marker_token("PER", 2, true));
  CHECK(m.m2r + 1 == m.m1r);
  CHECK(strip_markers(m) == inst.tokens);
}

TEST_CASE("feature sequence preserves the eight-slot order") {
  RelationInstance inst = fixture_instance();
  FixtureLexiconTagger tagger;
  ComplexFeatureSet cfs = combine(extract_atomic(inst, pos_tag(inst.tokens, tagger)));
  FeatureSequence seq = build_feature_sequence(cfs);
  CHECK(seq.symbols.size() == 8);
  for (int k = 0; k < 8; ++k) CHECK(seq.symbols[k] == cfs.cf[k]);
}

TEST_CASE("synthetic instances produce valid features end to end") {
  LabelSet schema = default_synth_schema();
  FixtureLexiconTagger tagger;
  for (const auto& inst : generate_synthetic(41, 150, schema, 0.8)) {
    PosTags tags = pos_tag(inst.tokens, tagger);
    AtomicFeatures a = extract_atomic(inst, tags);
    ComplexFeatureSet cfs = combine(a);
    for (const auto& s : cfs.cf) CHECK(!s.empty());
    MarkedSentence marked = insert_markers(inst);
    CHECK(strip_markers(marked) == inst.tokens);
  }
}
