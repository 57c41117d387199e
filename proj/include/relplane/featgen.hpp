#ifndef RELPLANE_FEATGEN_HPP_
#define RELPLANE_FEATGEN_HPP_

#include <array>
#include <string>
#include <vector>

#include "relplane/corpus.hpp"

namespace relplane {

// Four entity-pair geometries. Partial overlaps fold into One/Two by
// start index (ties by end index, then by entity id).
enum class RelativeOrder { One, Two, Three, Four };

const std::string& order_symbol(RelativeOrder o);  // "one".."four"

RelativeOrder relative_order(const EntitySpan& e1, const EntitySpan& e2);

// Smallest-granularity hand features of one instance. Flanking POS tags
// use sentinel symbols at sentence boundaries.
struct AtomicFeatures {
  std::string type1, type2;
  std::string subtype1, subtype2;
  std::string left_pos1, right_pos1;
  std::string left_pos2, right_pos2;
  RelativeOrder order = RelativeOrder::One;
  std::string head1, head2;

  bool operator==(const AtomicFeatures&) const = default;
};

extern const std::string kBosTag;  // left sentinel
extern const std::string kEosTag;  // right sentinel

AtomicFeatures extract_atomic(const RelationInstance& inst, const PosTags& tags);

// The eight combined features, cf[0]..cf[7] holding CF1..CF8. The first
// seven join two atomic symbols with the reserved separator; the eighth
// is the bare order symbol.
struct ComplexFeatureSet {
  std::array<std::string, 8> cf;

  bool operator==(const ComplexFeatureSet&) const = default;
};

ComplexFeatureSet combine(const AtomicFeatures& a);

// Splits a combined feature back into its two parts (testing aid).
std::pair<std::string, std::string> split_combined(const std::string& cf);

// Marker-augmented token sequence. The four marker tokens wrap each
// entity; when one entity contains the other the outer markers are placed
// outside the inner ones, and at identical insertion offsets left markers
// precede right markers with entity 1 before entity 2.
struct MarkedSentence {
  std::vector<std::string> tokens;  // length M = N + 4
  int m1l = 0, m1r = 0, m2l = 0, m2r = 0;
  std::vector<int> e1_positions;  // marked-sequence indices of entity words
  std::vector<int> e2_positions;
  RelationInstance origin;

  int length() const { return static_cast<int>(tokens.size()); }
};

std::string marker_token(const std::string& etype, int entity_id, bool closing);

MarkedSentence insert_markers(const RelationInstance& inst);

// Strips the four marker tokens, recovering the original sentence.
std::vector<std::string> strip_markers(const MarkedSentence& marked);

// CF1..CF8 in fixed order, the feature-side model input.
struct FeatureSequence {
  std::array<std::string, 8> symbols;
};

FeatureSequence build_feature_sequence(const ComplexFeatureSet& cfs);

}  // namespace relplane

#endif  // RELPLANE_FEATGEN_HPP_
