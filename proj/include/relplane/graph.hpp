#ifndef RELPLANE_GRAPH_HPP_
#define RELPLANE_GRAPH_HPP_

#include <functional>
#include <utility>
#include <vector>

#include "relplane/rng.hpp"
#include "relplane/tensor.hpp"

namespace relplane {

// Reverse-mode tape over Tensor values. A graph is built per forward
// pass and discarded (or reset) afterwards; node handles are plain ints.
//
// Every op's backward is exercised by central finite differences in the
// test suite, so new ops must ship with a gradient check.
class Graph {
 public:
  using NodeId = int;

  NodeId input(Tensor t, bool needs_grad = false);

  // elementwise / broadcast
  NodeId add(NodeId a, NodeId b);
  NodeId add_rowvec(NodeId a, NodeId b);  // b is 1 x C, broadcast over rows
  NodeId scale(NodeId a, double s);
  NodeId mul(NodeId a, NodeId b);

  // linear algebra
  NodeId matmul(NodeId a, NodeId b);     // (m x k) * (k x n)
  NodeId matmul_nt(NodeId a, NodeId b);  // (m x k) * (n x k)^T

  // structure
  NodeId concat_rows(const std::vector<NodeId>& xs);
  NodeId concat_cols(const std::vector<NodeId>& xs);
  NodeId slice_cols(NodeId a, int c0, int c1);
  NodeId gather_rows(NodeId a, std::vector<int> idx);
  NodeId mean_rows(NodeId a);  // R x C -> 1 x C
  NodeId sum_all(NodeId a);    // R x C -> 1 x 1

  // nonlinearities
  NodeId tanh_op(NodeId a);
  NodeId sigmoid(NodeId a);
  NodeId gelu(NodeId a);
  NodeId softmax_rows(NodeId a);

  // per-row standardization (zero mean, unit variance over columns),
  // epsilon inside the square root, no learned affine
  NodeId standardize_rows(NodeId a, double eps);

  // out[i*M+j] = gain[i] (.) nrm[j] + bias[i]; all inputs M x d
  NodeId cln_combine(NodeId gain, NodeId bias, NodeId nrm);

  // Writes feature rows into plane cells. `cells[k] = (feat_row, flat_cell)`.
  // replace=false adds, replace=true overwrites the cell.
  NodeId plane_inject(NodeId plane, NodeId feats,
                      std::vector<std::pair<int, int>> cells, bool replace);

  // 3x3 dilated conv over an m x m plane stored as (m*m) x Cin.
  // w is (9*Cin) x Cout laid out (ki, kj, ic) -> oc; b is 1 x Cout.
  // Zero padding of `dilation` keeps the spatial extent.
  NodeId conv2d(NodeId x, NodeId w, NodeId b, int m, int dilation);

  NodeId maxpool_rows(NodeId a);  // k x C -> 1 x C, elementwise max

  // -log softmax(logits)[gold]; logits 1 x K, output 1 x 1
  NodeId cross_entropy_logits(NodeId logits, int gold);

  // Inverted dropout; the mask is sampled at node creation. rate <= 0
  // returns the input unchanged without consuming the generator.
  NodeId dropout(NodeId a, double rate, Rng& rng);

  const Tensor& val(NodeId id) const { return nodes_[id].val; }
  Tensor& grad(NodeId id);
  bool needs_grad(NodeId id) const { return nodes_[id].needs_grad; }

  void backward(NodeId loss_id);
  void clear() { nodes_.clear(); }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor val;
    Tensor grad;  // allocated lazily during backward
    bool needs_grad = false;
    bool grad_live = false;
    std::function<void(Graph&, int)> back;  // accumulates into parents
  };

  NodeId push(Tensor val, bool needs_grad, std::function<void(Graph&, int)> back);
  void accumulate(NodeId id, const Tensor& g);
  Tensor& ensure_grad(NodeId id);

  std::vector<Node> nodes_;
};

}  // namespace relplane

#endif  // RELPLANE_GRAPH_HPP_
