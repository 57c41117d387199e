#ifndef RELPLANE_PARAMS_HPP_
#define RELPLANE_PARAMS_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "relplane/graph.hpp"
#include "relplane/tensor.hpp"

namespace relplane {

// Named trainable tensors with gradient buffers and AdamW state.
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Tensor value;
    Tensor grad;
    Tensor m;  // first moment
    Tensor v;  // second moment
  };

  int add(const std::string& name, Tensor init);
  bool has(const std::string& name) const { return index_.count(name) > 0; }
  Entry& get(const std::string& name);
  const Entry& get(const std::string& name) const;
  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }

  void zero_grads();
  void scale_grads(double s);
  double grad_norm() const;
  void clip_grad_norm(double max_norm);

  // Decoupled weight decay applied to matrix-shaped entries only
  // (single-row tensors are treated as biases).
  void adamw_step(double lr, double beta1, double beta2, double eps,
                  double weight_decay);

  std::size_t count_scalars() const;
  std::uint64_t value_hash() const;  // order- and byte-exact fingerprint

 private:
  std::vector<Entry> entries_;
  std::map<std::string, int> index_;
  std::int64_t step_ = 0;
};

// Per-pass binding of store entries to graph input nodes. Nodes are
// memoized by name; harvest() moves accumulated graph gradients back
// into the store after backward().
class ParamContext {
 public:
  ParamContext(Graph& g, ParamStore& store, bool needs_grad)
      : graph_(&g), store_(&store), needs_grad_(needs_grad) {}

  Graph::NodeId operator[](const std::string& name);
  void harvest();

 private:
  Graph* graph_;
  ParamStore* store_;
  bool needs_grad_;
  std::map<std::string, Graph::NodeId> bound_;
};

}  // namespace relplane

#endif  // RELPLANE_PARAMS_HPP_
