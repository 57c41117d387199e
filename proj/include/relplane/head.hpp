#ifndef RELPLANE_HEAD_HPP_
#define RELPLANE_HEAD_HPP_

#include <optional>
#include <string>
#include <vector>

#include "relplane/params.hpp"

namespace relplane {

// Attention over a single pooled entity vector (literal form; the
// softmax over one key makes the query inert) or over the entity's
// token rows.
enum class CfaMode { Pooled, Span };

std::string cfa_mode_name(CfaMode m);
CfaMode cfa_mode_from(const std::string& name);

extern const char* kEntityLinearW;  // "cfa.ent.W"
extern const char* kEntityLinearB;  // "cfa.ent.b"
extern const char* kAttnQW;
extern const char* kAttnQB;
extern const char* kAttnKW;
extern const char* kAttnKB;
extern const char* kAttnVW;
extern const char* kAttnVB;
extern const char* kAttnOW;
extern const char* kAttnOB;
extern const char* kMlpHiddenW;
extern const char* kMlpHiddenB;
extern const char* kMlpOutW;
extern const char* kMlpOutB;

void init_cfa_params(ParamStore& store, int d, Rng& rng);
void init_mlp_params(ParamStore& store, int in_dim, int n_labels, Rng& rng);

int mlp_hidden_width(int in_dim);

// --- pooling and entity representations -------------------------------------

// Mean of the rows at `positions` (entity word tokens only).
Graph::NodeId pool_entity_graph(Graph& g, Graph::NodeId H,
                                const std::vector<int>& positions);
Tensor pool_entity(const Tensor& H, const std::vector<int>& positions);

// Linear(Gelu(x)) rowwise; for a pooled vector this is the entity
// representation, for span rows it lifts each row.
Graph::NodeId entity_rep_graph(Graph& g, ParamContext& pc, Graph::NodeId x);
Tensor entity_rep(const Tensor& pooled, const ParamStore& store);

// --- feature-aware attention -------------------------------------------------

// Multi-head attention with `query` (1 x d) attending over `keys`
// (k x d, used as both keys and values).
Graph::NodeId multihead_attention_graph(Graph& g, ParamContext& pc,
                                        Graph::NodeId query, Graph::NodeId keys,
                                        int heads);

Tensor cfa_attend(const Tensor& f0, const Tensor& entity, CfaMode mode,
                  const std::optional<Tensor>& span_rows, int heads,
                  const ParamStore& store);

// --- classification ----------------------------------------------------------

Graph::NodeId pool_plane_graph(Graph& g, Graph::NodeId stack);
Tensor pool_plane(const Tensor& stack);

struct ClassifyOptions {
  double dropout = 0.0;
  Rng* rng = nullptr;
};

// Concatenates the given 1-row parts, applies the Gelu MLP, returns
// logits (1 x K).
Graph::NodeId classify_logits_graph(Graph& g, ParamContext& pc,
                                    const std::vector<Graph::NodeId>& parts,
                                    const ClassifyOptions& opt = {});

// Softmax distribution over the label set.
std::vector<double> classify(const Tensor& af1, const Tensor& af2,
                             const Tensor& pooled_plane, const ParamStore& store);

std::vector<double> softmax(const std::vector<double>& logits);

}  // namespace relplane

#endif  // RELPLANE_HEAD_HPP_
