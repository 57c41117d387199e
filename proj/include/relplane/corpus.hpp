#ifndef RELPLANE_CORPUS_HPP_
#define RELPLANE_CORPUS_HPP_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "relplane/errors.hpp"

namespace relplane {

// Characters reserved for feature combination and entity markers; they
// may not appear in entity type / subtype / head symbols.
extern const std::string kCombineSeparator;  // U+2225
extern const std::string kMarkerOpen;        // U+27E8
extern const std::string kMarkerClose;       // U+27E9

// Half-open token span [start, end) with its corpus annotations.
struct EntitySpan {
  int start = 0;
  int end = 0;
  std::string etype;
  std::string subtype;
  std::string head;

  bool operator==(const EntitySpan&) const = default;
};

// One sentence with two annotated entities and a gold relation label.
struct RelationInstance {
  std::vector<std::string> tokens;
  EntitySpan e1;
  EntitySpan e2;
  std::string label;
  std::string doc_id;

  bool operator==(const RelationInstance&) const = default;
};

// Ordered relation-type inventory including the null (no-relation) label.
struct LabelSet {
  std::vector<std::string> labels;
  std::string null_label;

  int index_of(const std::string& label) const;
  bool contains(const std::string& label) const { return index_of(label) >= 0; }
  int null_index() const { return index_of(null_label); }
  int size() const { return static_cast<int>(labels.size()); }

  void validate() const;  // null membership, uniqueness

  bool operator==(const LabelSet&) const = default;
};

struct PosTags {
  std::vector<std::string> tags;
};

using Corpus = std::vector<RelationInstance>;

// Throws ValidationError (naming doc_id) or SchemaError on violation.
void validate_instance(const RelationInstance& inst, const LabelSet& schema);

// --- part-of-speech seam ---------------------------------------------------

class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual std::vector<std::string> tag(const std::vector<std::string>& tokens) const = 0;
};

// Deterministic lexicon lookup with an "X" fallback; the default tagger,
// so runs never depend on an external toolkit.
class FixtureLexiconTagger : public PosTagger {
 public:
  FixtureLexiconTagger();
  std::vector<std::string> tag(const std::vector<std::string>& tokens) const override;

 private:
  std::map<std::string, std::string> lexicon_;
};

PosTags pos_tag(const std::vector<std::string>& tokens, const PosTagger& tagger);

// --- corpus and schema files -----------------------------------------------
// Corpus: UTF-8, one JSON record per line with fields `tokens`, `e1`, `e2`
// (start/end/type/subtype/head), `label`, `doc_id`. Schema: one JSON object
// with `labels` and `null_label`. Writers are byte-stable.

Corpus load_corpus(const std::string& path, const LabelSet& schema);
void save_corpus(const Corpus& corpus, const std::string& path);
std::string corpus_record_line(const RelationInstance& inst);

LabelSet load_schema(const std::string& path);
void save_schema(const LabelSet& schema, const std::string& path);

// --- statistics --------------------------------------------------------------

struct CorpusStats {
  std::map<std::string, int> per_label;
  int total = 0;
};

CorpusStats corpus_stats(const Corpus& corpus);

}  // namespace relplane

#endif  // RELPLANE_CORPUS_HPP_
