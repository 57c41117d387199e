#include "relplane/bilstm.hpp"

#include "relplane/errors.hpp"

namespace relplane {

void init_bilstm(ParamStore& store, const std::string& prefix, int d, Rng& rng) {
  if (d % 2 != 0)
    throw ConfigError("bilstm: hidden width " + std::to_string(d) +
                      " must be even");
  int h = d / 2;
  for (const char* dir : {"fw", "bw"}) {
    std::string p = prefix + "." + dir + ".";
    store.add(p + "W", Tensor::xavier(d, 4 * h, rng));
    store.add(p + "U", Tensor::xavier(h, 4 * h, rng));
    Tensor b = Tensor::zeros(1, 4 * h);
    for (int c = h; c < 2 * h; ++c) b.at(0, c) = 1.0;  // forget gate bias
    store.add(p + "b", std::move(b));
  }
}

namespace {

// One direction; emits T rows of hidden states in input order.
Graph::NodeId lstm_direction(Graph& g, Graph::NodeId W, Graph::NodeId U,
                             Graph::NodeId b, Graph::NodeId x, int t_len, int h,
                             bool reverse) {
  std::vector<Graph::NodeId> hs(t_len);
  Graph::NodeId h_prev = -1, c_prev = -1;
  for (int step = 0; step < t_len; ++step) {
    int t = reverse ? t_len - 1 - step : step;
    Graph::NodeId x_t = g.gather_rows(x, {t});
    Graph::NodeId pre = g.add_rowvec(g.matmul(x_t, W), b);
    if (h_prev >= 0) pre = g.add(pre, g.matmul(h_prev, U));
    Graph::NodeId i_g = g.sigmoid(g.slice_cols(pre, 0, h));
    Graph::NodeId f_g = g.sigmoid(g.slice_cols(pre, h, 2 * h));
    Graph::NodeId g_g = g.tanh_op(g.slice_cols(pre, 2 * h, 3 * h));
    Graph::NodeId o_g = g.sigmoid(g.slice_cols(pre, 3 * h, 4 * h));
    Graph::NodeId c = g.mul(i_g, g_g);
    if (c_prev >= 0) c = g.add(c, g.mul(f_g, c_prev));
    Graph::NodeId h_t = g.mul(o_g, g.tanh_op(c));
    hs[t] = h_t;
    h_prev = h_t;
    c_prev = c;
  }
  return g.concat_rows(hs);
}

}  // namespace

Graph::NodeId bilstm_apply(Graph& g, ParamContext& pc, const std::string& prefix,
                           Graph::NodeId x) {
  int d = g.val(x).cols;
  int t_len = g.val(x).rows;
  if (t_len < 1) throw ValidationError("bilstm: input must have at least one row");
  int h = d / 2;
  Graph::NodeId fwd = lstm_direction(g, pc[prefix + ".fw.W"], pc[prefix + ".fw.U"],
                                     pc[prefix + ".fw.b"], x, t_len, h, false);
  Graph::NodeId bwd = lstm_direction(g, pc[prefix + ".bw.W"], pc[prefix + ".bw.U"],
                                     pc[prefix + ".bw.b"], x, t_len, h, true);
  return g.concat_cols({fwd, bwd});
}

}  // namespace relplane
