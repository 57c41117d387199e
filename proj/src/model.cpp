#include "relplane/model.hpp"

#include "relplane/bilstm.hpp"
#include "relplane/encoder.hpp"
#include "relplane/errors.hpp"

namespace relplane {

ModelInput make_model_input(const PreprocessedInstance& pre,
                            const Vocabulary& vocab, const ModelConfig& cfg,
                            const LabelSet& schema) {
  ModelInput in;
  in.doc_id = pre.doc_id;
  in.sent_tokens = cfg.use_feature_engineering ? pre.marked_tokens : pre.tokens;
  in.feat_symbols = pre.features;

  in.sent_ids.reserve(pre.marked_tokens.size());
  for (const auto& t : pre.marked_tokens) in.sent_ids.push_back(vocab.word_id(t));
  in.plain_ids.reserve(pre.tokens.size());
  for (const auto& t : pre.tokens) in.plain_ids.push_back(vocab.word_id(t));
  in.feat_ids.reserve(8);
  for (const auto& s : pre.features) in.feat_ids.push_back(vocab.feature_id(s));

  if (cfg.use_feature_engineering) {
    in.e1_rows = pre.e1_rows;
    in.e2_rows = pre.e2_rows;
  } else {
    for (int i = pre.e1_start; i < pre.e1_end; ++i) in.e1_rows.push_back(i);
    for (int i = pre.e2_start; i < pre.e2_end; ++i) in.e2_rows.push_back(i);
    in.sent_ids = in.plain_ids;
  }
  for (int i = pre.e1_start; i < pre.e1_end; ++i) in.e1_plain.push_back(i);
  for (int i = pre.e2_start; i < pre.e2_end; ++i) in.e2_plain.push_back(i);

  if (cfg.use_feature_engineering) {
    MarkedSentence marked;
    marked.tokens = pre.marked_tokens;
    marked.m1l = pre.m1l;
    marked.m1r = pre.m1r;
    marked.m2l = pre.m2l;
    marked.m2r = pre.m2r;
    marked.e1_positions = pre.e1_rows;
    marked.e2_positions = pre.e2_rows;
    marked.origin.e1 = {pre.e1_start, pre.e1_end, "T", "T", "h"};
    marked.origin.e2 = {pre.e2_start, pre.e2_end, "T", "T", "h"};
    in.injection = build_injection_map(marked);
  }

  if (!pre.label.empty()) {
    in.gold = schema.index_of(pre.label);
    if (in.gold < 0)
      throw SchemaError("instance '" + pre.doc_id + "': unknown label '" +
                        pre.label + "'");
  }
  return in;
}

Model::Model(const ModelConfig& cfg, const LabelSet& schema,
             const Vocabulary& vocab)
    : cfg_(cfg), schema_(schema), vocab_(vocab) {
  cfg_.validate();
  schema_.validate();
  Rng rng(cfg_.seed);
  init_encoder_params(params_, vocab_.size(), cfg_.d, rng);
  init_plane_params(params_, cfg_.d, cfg_.d_prime,
                    static_cast<int>(cfg_.hdc_rates.size()), rng);
  init_cfa_params(params_, cfg_.d, rng);
  init_mlp_params(params_, classifier_input_dim(), schema_.size(), rng);
}

int Model::pooled_plane_dim() const {
  if (!cfg_.use_plane) return cfg_.d;
  if (!cfg_.use_hdc) return cfg_.d_prime;
  return static_cast<int>(cfg_.hdc_rates.size()) * cfg_.d_prime;
}

int Model::classifier_input_dim() const {
  return (cfg_.use_cfa ? 2 * cfg_.d : 0) + pooled_plane_dim();
}

void Model::forward(Pass& pass, const ModelInput& in, bool training,
                    Rng* rng) const {
  const ModelConfig& c = cfg_;
  bool fe = c.use_feature_engineering;
  bool cf = fe && c.use_complex_features;
  bool in_plane_injection =
      cf && (c.injection_mode == InjectionMode::FI ||
             c.injection_mode == InjectionMode::FR);
  bool seq_concat = cf && (c.injection_mode == InjectionMode::BEF ||
                           c.injection_mode == InjectionMode::AFT);
  double drop = training ? c.dropout : 0.0;
  if (drop > 0.0 && !rng)
    throw ValidationError("model: training with dropout requires a generator");

  Graph& g = pass.graph;
  pass.pc = std::make_unique<ParamContext>(g, params_, training);
  ParamContext& pc = *pass.pc;

  auto embed_seq = [&](const std::vector<int>& ids) {
    return g.gather_rows(pc[kEmbeddingParam], ids);
  };

  // sentence stream
  Graph::NodeId H = embed_seq(in.sent_ids);
  if (c.use_bilstm) H = bilstm_apply(g, pc, kSentRefiner, H);
  if (drop > 0.0) H = g.dropout(H, drop, *rng);

  // feature stream; the sequence vector bypasses the refiner
  Graph::NodeId f0 = g.gather_rows(pc[kEmbeddingParam], {Vocabulary::kSeqId});
  Graph::NodeId Hf = -1;
  if (cf) {
    Graph::NodeId F = embed_seq(in.feat_ids);
    if (c.use_bilstm) F = bilstm_apply(g, pc, kFeatRefiner, F);
    if (drop > 0.0) F = g.dropout(F, drop, *rng);
    Hf = g.concat_rows({f0, F});
  }

  // interaction plane
  Graph::NodeId pooled;
  if (c.use_plane) {
    Graph::NodeId Hin = H;
    int extent = g.val(H).rows;
    pass.plane_headers = in.sent_tokens;
    if (seq_concat) {
      Hin = prepend_features_graph(g, H, Hf, c.injection_mode);
      extent += 8;
      std::vector<std::string> feats(in.feat_symbols.begin(),
                                     in.feat_symbols.end());
      if (c.injection_mode == InjectionMode::BEF) {
        feats.insert(feats.end(), in.sent_tokens.begin(), in.sent_tokens.end());
        pass.plane_headers = std::move(feats);
      } else {
        pass.plane_headers.insert(pass.plane_headers.end(), feats.begin(),
                                  feats.end());
      }
    }
    Graph::NodeId P = cln_graph(g, pc, Hin);
    if (in_plane_injection)
      P = inject_graph(g, P, Hf, in.injection, c.injection_mode);
    pass.plane_cells = P;
    pass.plane_extent = extent;
    Graph::NodeId R = reduce_graph(g, pc, P);
    Graph::NodeId O =
        c.use_hdc ? hdc_graph(g, pc, R, extent, c.hdc_rates) : R;
    pass.plane_stack = O;
    pooled = pool_plane_graph(g, O);
  } else {
    pooled = g.mean_rows(H);
  }

  // feature-aware attention
  std::vector<Graph::NodeId> parts;
  if (c.use_cfa) {
    Graph::NodeId query =
        c.use_cfa_feature_query ? f0 : g.input(Tensor::zeros(1, c.d));
    Graph::NodeId Hc = H;
    const std::vector<int>* rows1 = &in.e1_rows;
    const std::vector<int>* rows2 = &in.e2_rows;
    if (fe && !c.use_cfa_marked_entities) {
      // marker-free view for the attention module only
      Graph::NodeId Ep = embed_seq(in.plain_ids);
      Hc = c.use_bilstm ? bilstm_apply(g, pc, kSentRefiner, Ep) : Ep;
      if (drop > 0.0) Hc = g.dropout(Hc, drop, *rng);
      rows1 = &in.e1_plain;
      rows2 = &in.e2_plain;
    }
    for (const std::vector<int>* rows : {rows1, rows2}) {
      Graph::NodeId pooled_e = pool_entity_graph(g, Hc, *rows);
      Graph::NodeId af;
      if (!c.use_cfa_attention) {
        af = c.use_cfa_linear ? entity_rep_graph(g, pc, pooled_e) : pooled_e;
      } else {
        Graph::NodeId kv;
        if (c.cfa_mode == CfaMode::Pooled) {
          kv = c.use_cfa_linear ? entity_rep_graph(g, pc, pooled_e) : pooled_e;
        } else {
          Graph::NodeId span = g.gather_rows(Hc, *rows);
          kv = c.use_cfa_linear ? entity_rep_graph(g, pc, span) : span;
        }
        af = multihead_attention_graph(g, pc, query, kv, c.heads);
      }
      parts.push_back(af);
    }
  }
  parts.push_back(pooled);

  ClassifyOptions copt;
  copt.dropout = drop;
  copt.rng = rng;
  pass.logits = classify_logits_graph(g, pc, parts, copt);
  if (in.gold >= 0) pass.loss = g.cross_entropy_logits(pass.logits, in.gold);
}

std::vector<double> Model::predict_proba(const ModelInput& in) const {
  Pass pass;
  forward(pass, in, false, nullptr);
  const Tensor& l = pass.graph.val(pass.logits);
  return softmax(std::vector<double>(l.v.begin(), l.v.end()));
}

int Model::predict(const ModelInput& in) const {
  std::vector<double> p = predict_proba(in);
  int best = 0;
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i] > p[best]) best = static_cast<int>(i);
  return best;
}

}  // namespace relplane
