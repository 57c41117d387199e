#ifndef RELPLANE_EMBEDDING_HPP_
#define RELPLANE_EMBEDDING_HPP_

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "relplane/params.hpp"
#include "relplane/tensor.hpp"
#include "relplane/vocab.hpp"

namespace relplane {

// Embedding-backend contract. An implementation turns a token sequence
// into piece vectors plus a word-to-piece alignment; each word covers a
// contiguous, non-overlapping run of at least one piece. `cls` is the
// sequence-level vector, filled only when requested. Implementations
// must be deterministic for fixed parameters and input.
struct AdapterOutput {
  Tensor pieces;                                 // P x d
  std::vector<std::pair<int, int>> word_pieces;  // half-open [begin, end)
  Tensor cls;                                    // 1 x d or empty
};

class EmbeddingAdapter {
 public:
  virtual ~EmbeddingAdapter() = default;
  virtual int dim() const = 0;
  virtual AdapterOutput embed(const std::vector<std::string>& tokens,
                              bool want_cls) const = 0;
};

// Checks the alignment contract; throws ValidationError when violated.
void validate_adapter_output(const AdapterOutput& out, int n_words, int d);

// Default backend: a trainable lookup table over the training vocabulary
// (one piece per word, never sub-tokenized). Feature symbols are single
// vocabulary items; unseen symbols map to the unknown-word id, and the
// sequence vector is the reserved sequence-token embedding.
class LookupAdapter : public EmbeddingAdapter {
 public:
  LookupAdapter(const Vocabulary& vocab, const Tensor& table);

  int dim() const override { return table_->cols; }
  AdapterOutput embed(const std::vector<std::string>& tokens,
                      bool want_cls) const override;

  std::vector<int> ids(const std::vector<std::string>& tokens) const;

 private:
  const Vocabulary* vocab_;
  const Tensor* table_;
};

extern const char* kEmbeddingParam;  // "emb.table"

void init_embedding_param(ParamStore& store, int vocab_size, int d, Rng& rng);

}  // namespace relplane

#endif  // RELPLANE_EMBEDDING_HPP_
