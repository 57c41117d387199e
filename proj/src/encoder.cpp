#include "relplane/encoder.hpp"

#include "relplane/bilstm.hpp"
#include "relplane/errors.hpp"

namespace relplane {

const char* kSentRefiner = "enc.sent";
const char* kFeatRefiner = "enc.feat";

Tensor subword_maxpool(const Tensor& pieces) {
  if (pieces.rows < 1)
    throw ValidationError("subword_maxpool: a word must cover at least one piece");
  Tensor out(1, pieces.cols);
  for (int c = 0; c < pieces.cols; ++c) {
    double best = pieces.at(0, c);
    for (int r = 1; r < pieces.rows; ++r) best = std::max(best, pieces.at(r, c));
    out.at(0, c) = best;
  }
  return out;
}

void init_encoder_params(ParamStore& store, int vocab_size, int d, Rng& rng) {
  init_embedding_param(store, vocab_size, d, rng);
  init_bilstm(store, kSentRefiner, d, rng);
  init_bilstm(store, kFeatRefiner, d, rng);
}

Graph::NodeId pool_words_graph(Graph& g, Graph::NodeId pieces,
                               const std::vector<std::pair<int, int>>& word_pieces) {
  std::vector<Graph::NodeId> rows;
  rows.reserve(word_pieces.size());
  for (auto [b, e] : word_pieces) {
    std::vector<int> idx;
    for (int p = b; p < e; ++p) idx.push_back(p);
    rows.push_back(g.maxpool_rows(g.gather_rows(pieces, idx)));
  }
  return g.concat_rows(rows);
}

std::pair<EncodedSentence, EncodedFeatures> encode(
    const MarkedSentence& marked, const FeatureSequence& feats,
    const EmbeddingAdapter& adapter, ParamStore& store, const EncodeOptions& opt) {
  int d = adapter.dim();
  AdapterOutput sent = adapter.embed(marked.tokens, false);
  validate_adapter_output(sent, marked.length(), d);
  std::vector<std::string> feat_tokens(feats.symbols.begin(), feats.symbols.end());
  AdapterOutput feat = adapter.embed(feat_tokens, true);
  validate_adapter_output(feat, 8, d);
  if (feat.cls.rows != 1 || feat.cls.cols != d)
    throw ValidationError("adapter: sequence vector missing or mis-shaped");

  Graph g;
  ParamContext pc(g, store, false);

  Graph::NodeId h = pool_words_graph(g, g.input(sent.pieces), sent.word_pieces);
  Graph::NodeId f = pool_words_graph(g, g.input(feat.pieces), feat.word_pieces);
  if (opt.use_bilstm) {
    h = bilstm_apply(g, pc, kSentRefiner, h);
    f = bilstm_apply(g, pc, kFeatRefiner, f);
  }
  if (opt.dropout > 0.0) {
    if (!opt.rng) throw ValidationError("encode: dropout requires a generator");
    h = g.dropout(h, opt.dropout, *opt.rng);
    f = g.dropout(f, opt.dropout, *opt.rng);
  }
  Graph::NodeId hf = g.concat_rows({g.input(feat.cls), f});

  return {EncodedSentence{g.val(h)}, EncodedFeatures{g.val(hf)}};
}

}  // namespace relplane
