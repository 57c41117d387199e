#include "relplane/synth.hpp"

#include <algorithm>
#include <array>

#include "relplane/rng.hpp"

namespace relplane {

namespace {

const std::vector<std::string> kTypes = {"PER", "ORG", "GPE"};
const std::vector<std::vector<std::string>> kSubtypes = {
    {"individual", "crowd"}, {"company", "agency"}, {"nation", "town"}};
const std::vector<std::string> kEntityPool = {
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel"};
const std::vector<std::string> kFillers = {
    "the",  "old",    "new",  "report", "office", "city",  "yesterday",
    "said", "met",    "was",  "is",     "works",  "here",  "and",
    "to",   "visited"};
const std::vector<std::string> kTriggers = {"near", "with", "under"};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

int type_index(const std::string& t) {
  for (std::size_t i = 0; i < kTypes.size(); ++i)
    if (kTypes[i] == t) return static_cast<int>(i);
  return static_cast<int>(fnv1a(t) % kTypes.size());
}

// 0: e1 first, 1: e2 first, 2: e1 contains e2, 3: e2 contains e1
int geometry_index(const EntitySpan& a, const EntitySpan& b) {
  bool a_in_b = b.start <= a.start && a.end <= b.end;
  bool b_in_a = a.start <= b.start && b.end <= a.end;
  if (b_in_a && !(a.start == b.start && a.end == b.end)) return 2;
  if (a_in_b && !(a.start == b.start && a.end == b.end)) return 3;
  if (a.start != b.start) return a.start < b.start ? 0 : 1;
  if (a.end != b.end) return a.end < b.end ? 0 : 1;
  return 0;
}

// A token sequence assembled from segments; entity spans are registered
// against final positions once assembly is done.
struct SentenceDraft {
  std::vector<std::string> tokens;
  int append(const std::vector<std::string>& words) {
    int at = static_cast<int>(tokens.size());
    tokens.insert(tokens.end(), words.begin(), words.end());
    return at;
  }
};

std::vector<std::string> sample_fillers(Rng& rng, int lo, int hi) {
  int k = lo + static_cast<int>(rng.below(hi - lo + 1));
  std::vector<std::string> out;
  for (int i = 0; i < k; ++i)
    out.push_back(kFillers[rng.below(kFillers.size())]);
  return out;
}

std::vector<std::string> sample_entity_words(Rng& rng, int lo, int hi) {
  int k = lo + static_cast<int>(rng.below(hi - lo + 1));
  std::vector<std::string> out;
  for (int i = 0; i < k; ++i)
    out.push_back(kEntityPool[rng.below(kEntityPool.size())]);
  return out;
}

EntitySpan annotate(Rng& rng, int start, int end,
                    const std::vector<std::string>& tokens) {
  EntitySpan s;
  s.start = start;
  s.end = end;
  int ti = static_cast<int>(rng.below(kTypes.size()));
  s.etype = kTypes[ti];
  s.subtype = kSubtypes[ti][rng.below(kSubtypes[ti].size())];
  s.head = tokens[end - 1];
  return s;
}

// Inserts `word` at a position outside every registered span, shifting
// span indices as needed.
void insert_outside(Rng& rng, std::vector<std::string>& tokens,
                    std::vector<EntitySpan*> spans, const std::string& word) {
  std::vector<int> slots;
  for (int k = 0; k <= static_cast<int>(tokens.size()); ++k) {
    bool inside = false;
    for (const EntitySpan* s : spans)
      if (s->start < k && k < s->end) inside = true;
    // insertion at a span boundary is fine: the span shifts or stays whole
    if (!inside) slots.push_back(k);
  }
  int at = slots[rng.below(slots.size())];
  tokens.insert(tokens.begin() + at, word);
  for (EntitySpan* s : spans) {
    if (at <= s->start) {
      ++s->start;
      ++s->end;
    }
    // at >= s->end leaves the span untouched; strict interior is never chosen
  }
}

}  // namespace

LabelSet default_synth_schema() {
  LabelSet s;
  s.labels = {"located", "employs", "part-of", "social", "no_relation"};
  s.null_label = "no_relation";
  return s;
}

const std::vector<std::string>& synth_triggers() { return kTriggers; }

std::string synth_rule_label(const RelationInstance& inst, const LabelSet& schema) {
  int trigger = -1;
  for (const auto& tok : inst.tokens) {
    auto it = std::find(kTriggers.begin(), kTriggers.end(), tok);
    if (it != kTriggers.end()) {
      trigger = static_cast<int>(it - kTriggers.begin());
      break;
    }
  }
  if (trigger < 0) return schema.null_label;
  std::vector<std::string> nonnull;
  for (const auto& l : schema.labels)
    if (l != schema.null_label) nonnull.push_back(l);
  int t1 = type_index(inst.e1.etype);
  int t2 = type_index(inst.e2.etype);
  int ord = geometry_index(inst.e1, inst.e2);
  int idx = (trigger + t1 + 2 * t2 + 3 * ord) % static_cast<int>(nonnull.size());
  return nonnull[idx];
}

Corpus generate_synthetic(std::uint64_t seed, int n, const LabelSet& schema,
                          double difficulty, const SynthOptions& opt) {
  schema.validate();
  if (n < 0) n = 0;
  difficulty = std::clamp(difficulty, 0.0, 1.0);
  Rng rng(seed);
  Corpus corpus;
  int sentence_id = 0;

  while (static_cast<int>(corpus.size()) < n) {
    ++sentence_id;
    bool is_null = rng.uniform() < opt.null_fraction;
    bool nested = rng.uniform() < opt.nested_fraction;
    bool shared = rng.uniform() < difficulty * 0.4;  // two pairs, one sentence
    bool distract = rng.uniform() < difficulty * 0.5;

    SentenceDraft draft;
    std::vector<EntitySpan> spans;

    draft.append(sample_fillers(rng, 1, 3));
    if (nested) {
      auto outer_words = sample_entity_words(rng, 3, 4);
      int at = draft.append(outer_words);
      int outer_len = static_cast<int>(outer_words.size());
      // inner is always strictly shorter, so containment is strict
      int inner_len = 1 + static_cast<int>(rng.below(outer_len - 1));
      int inner_off = static_cast<int>(rng.below(outer_len - inner_len + 1));
      spans.push_back(annotate(rng, at, at + outer_len, draft.tokens));
      spans.push_back(annotate(rng, at + inner_off, at + inner_off + inner_len,
                               draft.tokens));
    } else {
      auto first_words = sample_entity_words(rng, 1, 2);
      int a = draft.append(first_words);
      spans.push_back(annotate(rng, a, a + static_cast<int>(first_words.size()),
                               draft.tokens));
      draft.append(sample_fillers(rng, 1, 3));
      auto second_words = sample_entity_words(rng, 1, 2);
      int b = draft.append(second_words);
      spans.push_back(annotate(rng, b, b + static_cast<int>(second_words.size()),
                               draft.tokens));
      if (shared) {
        draft.append(sample_fillers(rng, 1, 2));
        auto third_words = sample_entity_words(rng, 1, 2);
        int c = draft.append(third_words);
        spans.push_back(annotate(rng, c, c + static_cast<int>(third_words.size()),
                                 draft.tokens));
      }
    }
    draft.append(sample_fillers(rng, 1, 2));

    std::vector<EntitySpan*> span_ptrs;
    for (auto& s : spans) span_ptrs.push_back(&s);
    if (!is_null)
      insert_outside(rng, draft.tokens, span_ptrs,
                     kTriggers[rng.below(kTriggers.size())]);
    if (distract)
      insert_outside(rng, draft.tokens, span_ptrs,
                     kEntityPool[rng.below(kEntityPool.size())]);

    // pair assignment: swap roles half the time so all geometries occur
    std::vector<std::pair<int, int>> pairs;
    bool swap_roles = rng.uniform() < 0.5;
    pairs.emplace_back(swap_roles ? 1 : 0, swap_roles ? 0 : 1);
    if (!nested && shared && spans.size() == 3) {
      bool swap2 = rng.uniform() < 0.5;
      pairs.emplace_back(swap2 ? 2 : 1, swap2 ? 1 : 2);
    }

    for (std::size_t p = 0;
         p < pairs.size() && static_cast<int>(corpus.size()) < n; ++p) {
      RelationInstance inst;
      inst.tokens = draft.tokens;
      inst.e1 = spans[pairs[p].first];
      inst.e2 = spans[pairs[p].second];
      inst.doc_id = "syn-" + std::to_string(sentence_id) + "-" +
                    std::to_string(p);
      inst.label = synth_rule_label(inst, schema);
      validate_instance(inst, schema);
      corpus.push_back(std::move(inst));
    }
  }
  return corpus;
}

}  // namespace relplane
