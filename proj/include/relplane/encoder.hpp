#ifndef RELPLANE_ENCODER_HPP_
#define RELPLANE_ENCODER_HPP_

#include "relplane/embedding.hpp"
#include "relplane/featgen.hpp"
#include "relplane/params.hpp"

namespace relplane {

extern const char* kSentRefiner;  // "enc.sent"
extern const char* kFeatRefiner;  // "enc.feat"

// M x d contextualized representation of a marked sentence.
struct EncodedSentence {
  Tensor H;
};

// 9 x d: row 0 is the sequence-level vector, rows 1..8 the refined
// combined-feature representations.
struct EncodedFeatures {
  Tensor Hf;
};

// Element-wise maximum over piece rows (k x d -> d); k must be >= 1.
Tensor subword_maxpool(const Tensor& pieces);

void init_encoder_params(ParamStore& store, int vocab_size, int d, Rng& rng);

// In-graph builders shared by the standalone op and the training model.
// `words` is the piece tensor node plus alignment; emits one pooled row
// per word.
Graph::NodeId pool_words_graph(Graph& g, Graph::NodeId pieces,
                               const std::vector<std::pair<int, int>>& word_pieces);

struct EncodeOptions {
  bool use_bilstm = true;
  double dropout = 0.0;  // applied to refiner outputs
  Rng* rng = nullptr;    // required when dropout > 0
};

// Assembles word vectors via subword max-pooling, refines each stream
// with its own Bi-LSTM, and returns (H, Hf). The sequence vector bypasses
// the feature-stream refiner.
std::pair<EncodedSentence, EncodedFeatures> encode(
    const MarkedSentence& marked, const FeatureSequence& feats,
    const EmbeddingAdapter& adapter, ParamStore& store,
    const EncodeOptions& opt = {});

}  // namespace relplane

#endif  // RELPLANE_ENCODER_HPP_
