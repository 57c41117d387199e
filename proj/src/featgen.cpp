#include "relplane/featgen.hpp"

#include <algorithm>

namespace relplane {

const std::string kBosTag = "⟨BOS⟩";
const std::string kEosTag = "⟨EOS⟩";

const std::string& order_symbol(RelativeOrder o) {
  static const std::string names[4] = {"one", "two", "three", "four"};
  return names[static_cast<int>(o)];
}

RelativeOrder relative_order(const EntitySpan& e1, const EntitySpan& e2) {
  bool same = e1.start == e2.start && e1.end == e2.end;
  bool e1_contains = e1.start <= e2.start && e2.end <= e1.end && !same;
  bool e2_contains = e2.start <= e1.start && e1.end <= e2.end && !same;
  if (e1_contains) return RelativeOrder::Three;
  if (e2_contains) return RelativeOrder::Four;
  if (e1.start != e2.start)
    return e1.start < e2.start ? RelativeOrder::One : RelativeOrder::Two;
  if (e1.end != e2.end)
    return e1.end < e2.end ? RelativeOrder::One : RelativeOrder::Two;
  return RelativeOrder::One;  // identical spans: entity 1 takes precedence
}

AtomicFeatures extract_atomic(const RelationInstance& inst, const PosTags& tags) {
  if (tags.tags.size() != inst.tokens.size())
    throw ValidationError("extract_atomic: " + std::to_string(tags.tags.size()) +
                          " tags for " + std::to_string(inst.tokens.size()) +
                          " tokens (instance '" + inst.doc_id + "')");
  int n = static_cast<int>(inst.tokens.size());
  auto left_of = [&](const EntitySpan& s) {
    return s.start == 0 ? kBosTag : tags.tags[s.start - 1];
  };
  auto right_of = [&](const EntitySpan& s) {
    return s.end == n ? kEosTag : tags.tags[s.end];
  };
  AtomicFeatures a;
  a.type1 = inst.e1.etype;
  a.type2 = inst.e2.etype;
  a.subtype1 = inst.e1.subtype;
  a.subtype2 = inst.e2.subtype;
  a.left_pos1 = left_of(inst.e1);
  a.right_pos1 = right_of(inst.e1);
  a.left_pos2 = left_of(inst.e2);
  a.right_pos2 = right_of(inst.e2);
  a.order = relative_order(inst.e1, inst.e2);
  a.head1 = inst.e1.head;
  a.head2 = inst.e2.head;
  return a;
}

ComplexFeatureSet combine(const AtomicFeatures& a) {
  auto join = [](const std::string& x, const std::string& y) {
    return x + kCombineSeparator + y;
  };
  ComplexFeatureSet out;
  out.cf[0] = join(a.left_pos1, a.type1);
  out.cf[1] = join(a.right_pos1, a.type1);
  out.cf[2] = join(a.left_pos2, a.type2);
  out.cf[3] = join(a.right_pos2, a.type2);
  out.cf[4] = join(a.type1, a.type2);
  out.cf[5] = join(a.subtype1, a.subtype2);
  out.cf[6] = join(a.head1, a.head2);
  out.cf[7] = order_symbol(a.order);
  return out;
}

std::pair<std::string, std::string> split_combined(const std::string& cf) {
  auto at = cf.find(kCombineSeparator);
  if (at == std::string::npos)
    throw ValidationError("split_combined: no separator in '" + cf + "'");
  return {cf.substr(0, at), cf.substr(at + kCombineSeparator.size())};
}

std::string marker_token(const std::string& etype, int entity_id, bool closing) {
  return kMarkerOpen + (closing ? "/" : "") + etype + "_" +
         std::to_string(entity_id) + kMarkerClose;
}

namespace {

struct MarkerEvent {
  int offset;      // insertion point in the original token sequence
  bool closing;    // right marker
  int entity;      // 1 or 2
  std::string token;
};

}  // namespace

MarkedSentence insert_markers(const RelationInstance& inst) {
  const EntitySpan& e1 = inst.e1;
  const EntitySpan& e2 = inst.e2;
  bool same = e1.start == e2.start && e1.end == e2.end;
  bool e1_outer = e1.start <= e2.start && e2.end <= e1.end && !same;
  bool e2_outer = e2.start <= e1.start && e1.end <= e2.end && !same;

  std::vector<MarkerEvent> events = {
      {e1.start, false, 1, marker_token(e1.etype, 1, false)},
      {e1.end, true, 1, marker_token(e1.etype, 1, true)},
      {e2.start, false, 2, marker_token(e2.etype, 2, false)},
      {e2.end, true, 2, marker_token(e2.etype, 2, true)},
  };
  std::stable_sort(events.begin(), events.end(),
                   [&](const MarkerEvent& a, const MarkerEvent& b) {
                     if (a.offset != b.offset) return a.offset < b.offset;
                     // same offset: the outer entity opens first and closes last
                     if (e1_outer || e2_outer) {
                       int outer = e1_outer ? 1 : 2;
                       if (!a.closing && !b.closing)
                         return (a.entity == outer) > (b.entity == outer);
                       if (a.closing && b.closing)
                         return (a.entity == outer) < (b.entity == outer);
                     }
                     if (a.closing != b.closing) return !a.closing;  // left first
                     return a.entity < b.entity;
                   });

  MarkedSentence out;
  out.origin = inst;
  int n = static_cast<int>(inst.tokens.size());
  out.tokens.reserve(n + 4);
  std::vector<int> word_pos(n);  // original index -> marked index
  std::size_t next_event = 0;
  for (int i = 0; i <= n; ++i) {
    while (next_event < events.size() && events[next_event].offset == i) {
      const MarkerEvent& ev = events[next_event];
      int at = static_cast<int>(out.tokens.size());
      if (ev.entity == 1)
        (ev.closing ? out.m1r : out.m1l) = at;
      else
        (ev.closing ? out.m2r : out.m2l) = at;
      out.tokens.push_back(ev.token);
      ++next_event;
    }
    if (i < n) {
      word_pos[i] = static_cast<int>(out.tokens.size());
      out.tokens.push_back(inst.tokens[i]);
    }
  }
  for (int i = e1.start; i < e1.end; ++i) out.e1_positions.push_back(word_pos[i]);
  for (int i = e2.start; i < e2.end; ++i) out.e2_positions.push_back(word_pos[i]);
  return out;
}

std::vector<std::string> strip_markers(const MarkedSentence& marked) {
  std::vector<std::string> out;
  out.reserve(marked.tokens.size() - 4);
  for (int i = 0; i < marked.length(); ++i) {
    if (i == marked.m1l || i == marked.m1r || i == marked.m2l || i == marked.m2r)
      continue;
    out.push_back(marked.tokens[i]);
  }
  return out;
}

FeatureSequence build_feature_sequence(const ComplexFeatureSet& cfs) {
  FeatureSequence out;
  out.symbols = cfs.cf;
  return out;
}

}  // namespace relplane
