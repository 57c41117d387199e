#include "relplane/head.hpp"

#include <cmath>

#include "relplane/errors.hpp"

namespace relplane {

const char* kEntityLinearW = "cfa.ent.W";
const char* kEntityLinearB = "cfa.ent.b";
const char* kAttnQW = "cfa.attn.q.W";
const char* kAttnQB = "cfa.attn.q.b";
const char* kAttnKW = "cfa.attn.k.W";
const char* kAttnKB = "cfa.attn.k.b";
const char* kAttnVW = "cfa.attn.v.W";
const char* kAttnVB = "cfa.attn.v.b";
const char* kAttnOW = "cfa.attn.o.W";
const char* kAttnOB = "cfa.attn.o.b";
const char* kMlpHiddenW = "mlp.hidden.W";
const char* kMlpHiddenB = "mlp.hidden.b";
const char* kMlpOutW = "mlp.out.W";
const char* kMlpOutB = "mlp.out.b";

std::string cfa_mode_name(CfaMode m) {
  return m == CfaMode::Pooled ? "pooled" : "span";
}

CfaMode cfa_mode_from(const std::string& name) {
  if (name == "pooled") return CfaMode::Pooled;
  if (name == "span") return CfaMode::Span;
  throw ConfigError("unknown cfa mode '" + name + "'");
}

void init_cfa_params(ParamStore& store, int d, Rng& rng) {
  store.add(kEntityLinearW, Tensor::xavier(d, d, rng));
  store.add(kEntityLinearB, Tensor::zeros(1, d));
  for (const char* w : {kAttnQW, kAttnKW, kAttnVW, kAttnOW})
    store.add(w, Tensor::xavier(d, d, rng));
  for (const char* b : {kAttnQB, kAttnKB, kAttnVB, kAttnOB})
    store.add(b, Tensor::zeros(1, d));
}

int mlp_hidden_width(int in_dim) { return std::max(1, in_dim / 2); }

void init_mlp_params(ParamStore& store, int in_dim, int n_labels, Rng& rng) {
  int hidden = mlp_hidden_width(in_dim);
  store.add(kMlpHiddenW, Tensor::xavier(in_dim, hidden, rng));
  store.add(kMlpHiddenB, Tensor::zeros(1, hidden));
  store.add(kMlpOutW, Tensor::xavier(hidden, n_labels, rng));
  store.add(kMlpOutB, Tensor::zeros(1, n_labels));
}

Graph::NodeId pool_entity_graph(Graph& g, Graph::NodeId H,
                                const std::vector<int>& positions) {
  if (positions.empty())
    throw ValidationError("pool_entity: empty position set");
  return g.mean_rows(g.gather_rows(H, positions));
}

Tensor pool_entity(const Tensor& H, const std::vector<int>& positions) {
  Graph g;
  return g.val(pool_entity_graph(g, g.input(H), positions));
}

Graph::NodeId entity_rep_graph(Graph& g, ParamContext& pc, Graph::NodeId x) {
  return g.add_rowvec(g.matmul(g.gelu(x), pc[kEntityLinearW]), pc[kEntityLinearB]);
}

Tensor entity_rep(const Tensor& pooled, const ParamStore& store) {
  Graph g;
  ParamContext pc(g, const_cast<ParamStore&>(store), false);
  return g.val(entity_rep_graph(g, pc, g.input(pooled)));
}

Graph::NodeId multihead_attention_graph(Graph& g, ParamContext& pc,
                                        Graph::NodeId query, Graph::NodeId keys,
                                        int heads) {
  int d = g.val(query).cols;
  if (g.val(query).rows != 1)
    throw ValidationError("attention: query must be a single row");
  if (g.val(keys).cols != d)
    throw ValidationError("attention: key dimension mismatch");
  if (heads < 1 || d % heads != 0)
    throw ConfigError("attention: head count " + std::to_string(heads) +
                      " must divide width " + std::to_string(d));
  int dh = d / heads;
  Graph::NodeId Q = g.add_rowvec(g.matmul(query, pc[kAttnQW]), pc[kAttnQB]);
  Graph::NodeId K = g.add_rowvec(g.matmul(keys, pc[kAttnKW]), pc[kAttnKB]);
  Graph::NodeId V = g.add_rowvec(g.matmul(keys, pc[kAttnVW]), pc[kAttnVB]);
  std::vector<Graph::NodeId> head_outs;
  head_outs.reserve(heads);
  for (int h = 0; h < heads; ++h) {
    Graph::NodeId Qh = g.slice_cols(Q, h * dh, (h + 1) * dh);
    Graph::NodeId Kh = g.slice_cols(K, h * dh, (h + 1) * dh);
    Graph::NodeId Vh = g.slice_cols(V, h * dh, (h + 1) * dh);
    Graph::NodeId scores = g.scale(g.matmul_nt(Qh, Kh), 1.0 / std::sqrt(dh));
    head_outs.push_back(g.matmul(g.softmax_rows(scores), Vh));
  }
  return g.add_rowvec(g.matmul(g.concat_cols(head_outs), pc[kAttnOW]),
                      pc[kAttnOB]);
}

Tensor cfa_attend(const Tensor& f0, const Tensor& entity, CfaMode mode,
                  const std::optional<Tensor>& span_rows, int heads,
                  const ParamStore& store) {
  if (mode == CfaMode::Span && !span_rows)
    throw ValidationError("cfa_attend: span mode requires span rows");
  Graph g;
  ParamContext pc(g, const_cast<ParamStore&>(store), false);
  Graph::NodeId q = g.input(f0);
  Graph::NodeId kv = mode == CfaMode::Pooled ? g.input(entity)
                                             : g.input(*span_rows);
  return g.val(multihead_attention_graph(g, pc, q, kv, heads));
}

Graph::NodeId pool_plane_graph(Graph& g, Graph::NodeId stack) {
  return g.mean_rows(stack);
}

Tensor pool_plane(const Tensor& stack) {
  Graph g;
  return g.val(pool_plane_graph(g, g.input(stack)));
}

Graph::NodeId classify_logits_graph(Graph& g, ParamContext& pc,
                                    const std::vector<Graph::NodeId>& parts,
                                    const ClassifyOptions& opt) {
  Graph::NodeId z = parts.size() == 1 ? parts[0] : g.concat_cols(parts);
  Graph::NodeId hidden =
      g.gelu(g.add_rowvec(g.matmul(z, pc[kMlpHiddenW]), pc[kMlpHiddenB]));
  if (opt.dropout > 0.0) {
    if (!opt.rng) throw ValidationError("classify: dropout requires a generator");
    hidden = g.dropout(hidden, opt.dropout, *opt.rng);
  }
  return g.add_rowvec(g.matmul(hidden, pc[kMlpOutW]), pc[kMlpOutB]);
}

std::vector<double> softmax(const std::vector<double>& logits) {
  double m = logits[0];
  for (double x : logits) m = std::max(m, x);
  std::vector<double> out(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    z += out[i];
  }
  for (auto& x : out) x /= z;
  return out;
}

std::vector<double> classify(const Tensor& af1, const Tensor& af2,
                             const Tensor& pooled_plane, const ParamStore& store) {
  Graph g;
  ParamContext pc(g, const_cast<ParamStore&>(store), false);
  Graph::NodeId logits = classify_logits_graph(
      g, pc, {g.input(af1), g.input(af2), g.input(pooled_plane)});
  const Tensor& l = g.val(logits);
  return softmax(std::vector<double>(l.v.begin(), l.v.end()));
}

}  // namespace relplane
