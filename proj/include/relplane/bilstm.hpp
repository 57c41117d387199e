#ifndef RELPLANE_BILSTM_HPP_
#define RELPLANE_BILSTM_HPP_

#include <string>

#include "relplane/params.hpp"

namespace relplane {

// Bidirectional LSTM refiner with hidden size d/2 per direction, so the
// concatenated output stays in R^d and needs no extra projection.
// Parameter names: <prefix>.{fw,bw}.{W,U,b} with gates packed i,f,g,o.

void init_bilstm(ParamStore& store, const std::string& prefix, int d, Rng& rng);

// x is T x d; returns a T x d node.
Graph::NodeId bilstm_apply(Graph& g, ParamContext& pc, const std::string& prefix,
                           Graph::NodeId x);

}  // namespace relplane

#endif  // RELPLANE_BILSTM_HPP_
