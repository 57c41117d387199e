#include "relplane/embedding.hpp"

#include "relplane/errors.hpp"

namespace relplane {

const char* kEmbeddingParam = "emb.table";

void validate_adapter_output(const AdapterOutput& out, int n_words, int d) {
  if (out.pieces.cols != d)
    throw ValidationError("adapter: piece dimension " +
                          std::to_string(out.pieces.cols) + ", expected " +
                          std::to_string(d));
  if (static_cast<int>(out.word_pieces.size()) != n_words)
    throw ValidationError("adapter: alignment covers " +
                          std::to_string(out.word_pieces.size()) +
                          " words, expected " + std::to_string(n_words));
  int cursor = 0;
  for (auto [b, e] : out.word_pieces) {
    if (b != cursor || e <= b)
      throw ValidationError("adapter: piece ranges must be contiguous, ordered, "
                            "non-overlapping, and non-empty");
    cursor = e;
  }
  if (cursor != out.pieces.rows)
    throw ValidationError("adapter: alignment covers " + std::to_string(cursor) +
                          " pieces, tensor has " + std::to_string(out.pieces.rows));
}

LookupAdapter::LookupAdapter(const Vocabulary& vocab, const Tensor& table)
    : vocab_(&vocab), table_(&table) {
  if (table.rows != vocab.size())
    throw ValidationError("lookup adapter: table rows " +
                          std::to_string(table.rows) + " != vocabulary size " +
                          std::to_string(vocab.size()));
}

std::vector<int> LookupAdapter::ids(const std::vector<std::string>& tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(vocab_->word_id(t));
  return out;
}

AdapterOutput LookupAdapter::embed(const std::vector<std::string>& tokens,
                                   bool want_cls) const {
  AdapterOutput out;
  int n = static_cast<int>(tokens.size());
  out.pieces = Tensor(n, table_->cols);
  out.word_pieces.reserve(n);
  for (int i = 0; i < n; ++i) {
    int id = vocab_->word_id(tokens[i]);
    const double* src = table_->row(id);
    std::copy(src, src + table_->cols, out.pieces.row(i));
    out.word_pieces.emplace_back(i, i + 1);
  }
  if (want_cls) {
    out.cls = Tensor(1, table_->cols);
    const double* src = table_->row(Vocabulary::kSeqId);
    std::copy(src, src + table_->cols, out.cls.row(0));
  }
  return out;
}

void init_embedding_param(ParamStore& store, int vocab_size, int d, Rng& rng) {
  store.add(kEmbeddingParam, Tensor::randn(vocab_size, d, rng, 0.1));
}

}  // namespace relplane
