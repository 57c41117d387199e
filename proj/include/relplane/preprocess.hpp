#ifndef RELPLANE_PREPROCESS_HPP_
#define RELPLANE_PREPROCESS_HPP_

#include <array>
#include <string>
#include <vector>

#include "relplane/corpus.hpp"
#include "relplane/featgen.hpp"
#include "relplane/vocab.hpp"

namespace relplane {

// Per-instance feature-engineering products, computed once and cached
// next to the corpus so training loops stay deterministic and fast.
struct PreprocessedInstance {
  std::string doc_id;
  std::string label;
  std::vector<std::string> tokens;
  std::vector<std::string> pos;
  std::vector<std::string> marked_tokens;
  int m1l = 0, m1r = 0, m2l = 0, m2r = 0;
  std::vector<int> e1_rows, e2_rows;  // entity word rows in marked_tokens
  int e1_start = 0, e1_end = 0, e2_start = 0, e2_end = 0;
  std::array<std::string, 8> features;
};

using PreprocessedCorpus = std::vector<PreprocessedInstance>;

PreprocessedInstance preprocess_instance(const RelationInstance& inst,
                                         const PosTagger& tagger);
PreprocessedCorpus preprocess_corpus(const Corpus& corpus,
                                     const PosTagger& tagger);

// Training vocabulary: reserved ids, then marked-sentence tokens, then
// feature symbols, each in first-occurrence order.
Vocabulary build_vocabulary(const PreprocessedCorpus& corpus);

// Cache file: one JSON record per line, byte-stable for idempotence checks.
void save_cache(const PreprocessedCorpus& corpus, const std::string& path);
PreprocessedCorpus load_cache(const std::string& path);

}  // namespace relplane

#endif  // RELPLANE_PREPROCESS_HPP_
