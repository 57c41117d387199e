#include "relplane/plane.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "relplane/errors.hpp"

namespace relplane {

const char* kClnGainW = "cln.gain.W";
const char* kClnGainB = "cln.gain.b";
const char* kClnBiasW = "cln.bias.W";
const char* kClnBiasB = "cln.bias.b";
const char* kReduceW = "reduce.W";
const char* kReduceB = "reduce.b";

const std::vector<int> kDefaultHdcRates = {1, 2, 3, 4};

std::string injection_mode_name(InjectionMode m) {
  switch (m) {
    case InjectionMode::FI: return "FI";
    case InjectionMode::FR: return "FR";
    case InjectionMode::BEF: return "BEF";
    case InjectionMode::AFT: return "AFT";
    case InjectionMode::NONE: return "NONE";
  }
  return "NONE";
}

InjectionMode injection_mode_from(const std::string& name) {
  if (name == "FI") return InjectionMode::FI;
  if (name == "FR") return InjectionMode::FR;
  if (name == "BEF") return InjectionMode::BEF;
  if (name == "AFT") return InjectionMode::AFT;
  if (name == "NONE") return InjectionMode::NONE;
  throw ConfigError("unknown injection mode '" + name + "'");
}

std::string hdc_param_w(int layer) { return "hdc." + std::to_string(layer) + ".W"; }
std::string hdc_param_b(int layer) { return "hdc." + std::to_string(layer) + ".b"; }

void init_plane_params(ParamStore& store, int d, int d_reduced, int hdc_layers,
                       Rng& rng) {
  // gain starts at one and bias at zero, so the initial plane is the
  // plain row standardization
  store.add(kClnGainW, Tensor::zeros(d, d));
  store.add(kClnGainB, Tensor::full(1, d, 1.0));
  store.add(kClnBiasW, Tensor::zeros(d, d));
  store.add(kClnBiasB, Tensor::zeros(1, d));
  store.add(kReduceW, Tensor::xavier(d, d_reduced, rng));
  store.add(kReduceB, Tensor::zeros(1, d_reduced));
  for (int l = 0; l < hdc_layers; ++l) {
    store.add(hdc_param_w(l), Tensor::xavier(9 * d_reduced, d_reduced, rng));
    store.add(hdc_param_b(l), Tensor::zeros(1, d_reduced));
  }
}

Graph::NodeId cln_graph(Graph& g, ParamContext& pc, Graph::NodeId H) {
  Graph::NodeId gain = g.add_rowvec(g.matmul(H, pc[kClnGainW]), pc[kClnGainB]);
  Graph::NodeId bias = g.add_rowvec(g.matmul(H, pc[kClnBiasW]), pc[kClnBiasB]);
  Graph::NodeId nrm = g.standardize_rows(H, kClnEpsilon);
  return g.cln_combine(gain, bias, nrm);
}

Tensor cln(const Tensor& H, const ParamStore& store) {
  Graph g;
  ParamContext pc(g, const_cast<ParamStore&>(store), false);
  return g.val(cln_graph(g, pc, g.input(H)));
}

// ---------------------------------------------------------------------------

void InjectionMap::validate() const {
  if (assignments.size() != 8)
    throw ValidationError("injection map: expected 8 assignments, have " +
                          std::to_string(assignments.size()));
  std::set<std::pair<int, int>> cells;
  for (const auto& a : assignments) {
    if (a.row < 0 || a.row >= extent || a.col < 0 || a.col >= extent)
      throw ValidationError("injection map: cell out of range");
    if (!cells.emplace(a.row, a.col).second)
      throw ValidationError("injection map: duplicate cell");
    if (a.feature >= 1 && a.feature <= 4) {
      if (a.row != a.col)
        throw ValidationError("injection map: single-entity feature off the diagonal");
    } else if (a.feature >= 5 && a.feature <= 8) {
      if (a.row >= a.col)
        throw ValidationError("injection map: pair feature outside the upper triangle");
    } else {
      throw ValidationError("injection map: feature index out of range");
    }
  }
}

InjectionMap build_injection_map(const MarkedSentence& marked) {
  InjectionMap map;
  map.extent = marked.length();

  map.assignments.push_back({1, marked.m1l, marked.m1l});
  map.assignments.push_back({2, marked.m1r, marked.m1r});
  map.assignments.push_back({3, marked.m2l, marked.m2l});
  map.assignments.push_back({4, marked.m2r, marked.m2r});

  // (a, b) orders the two entities by span position
  RelativeOrder ord = relative_order(marked.origin.e1, marked.origin.e2);
  bool e1_first = ord == RelativeOrder::One || ord == RelativeOrder::Three;
  int a_l = e1_first ? marked.m1l : marked.m2l;
  int a_r = e1_first ? marked.m1r : marked.m2r;
  int b_l = e1_first ? marked.m2l : marked.m1l;
  int b_r = e1_first ? marked.m2r : marked.m1r;

  std::set<std::pair<int, int>> taken;
  for (const auto& a : map.assignments) taken.emplace(a.row, a.col);

  auto place_pair = [&](int feature, int i, int j) {
    if (i > j) std::swap(i, j);
    // marker positions are pairwise distinct, so this shift never fires
    // for well-formed inputs; it keeps the mapping total regardless
    while ((i == j || taken.count({i, j})) && j + 1 < map.extent) ++j;
    if (i == j || taken.count({i, j}))
      throw ValidationError("injection map: cannot place pair feature " +
                            std::to_string(feature));
    taken.emplace(i, j);
    map.assignments.push_back({feature, i, j});
  };
  place_pair(5, a_l, b_l);
  place_pair(6, a_r, b_r);
  place_pair(7, a_l, b_r);
  place_pair(8, a_r, b_l);

  map.validate();
  return map;
}

namespace {

std::vector<std::pair<int, int>> flat_cells(const InjectionMap& map) {
  std::vector<std::pair<int, int>> cells;
  cells.reserve(map.assignments.size());
  for (const auto& a : map.assignments)
    cells.emplace_back(a.feature, a.row * map.extent + a.col);
  return cells;
}

}  // namespace

Graph::NodeId inject_graph(Graph& g, Graph::NodeId plane, Graph::NodeId Hf,
                           const InjectionMap& map, InjectionMode mode) {
  if (mode == InjectionMode::NONE) return plane;
  if (mode != InjectionMode::FI && mode != InjectionMode::FR)
    throw ValidationError("inject: mode must be FI, FR, or NONE");
  if (g.val(Hf).rows != 9)
    throw ValidationError("inject: feature matrix must have 9 rows");
  if (g.val(Hf).cols != g.val(plane).cols)
    throw ValidationError("inject: feature dimension " +
                          std::to_string(g.val(Hf).cols) +
                          " != plane dimension " +
                          std::to_string(g.val(plane).cols));
  return g.plane_inject(plane, Hf, flat_cells(map), mode == InjectionMode::FR);
}

Tensor inject(const Tensor& plane, const Tensor& Hf, const InjectionMap& map,
              InjectionMode mode) {
  Graph g;
  return g.val(inject_graph(g, g.input(plane), g.input(Hf), map, mode));
}

Graph::NodeId prepend_features_graph(Graph& g, Graph::NodeId H, Graph::NodeId Hf,
                                     InjectionMode mode) {
  if (mode != InjectionMode::BEF && mode != InjectionMode::AFT)
    throw ValidationError("prepend_features: mode must be BEF or AFT");
  Graph::NodeId f = g.gather_rows(Hf, {1, 2, 3, 4, 5, 6, 7, 8});
  return mode == InjectionMode::BEF ? g.concat_rows({f, H})
                                    : g.concat_rows({H, f});
}

Tensor prepend_features(const Tensor& H, const Tensor& Hf, InjectionMode mode) {
  Graph g;
  return g.val(prepend_features_graph(g, g.input(H), g.input(Hf), mode));
}

Graph::NodeId reduce_graph(Graph& g, ParamContext& pc, Graph::NodeId plane) {
  return g.add_rowvec(g.matmul(plane, pc[kReduceW]), pc[kReduceB]);
}

Tensor reduce(const Tensor& plane, const ParamStore& store) {
  Graph g;
  ParamContext pc(g, const_cast<ParamStore&>(store), false);
  return g.val(reduce_graph(g, pc, g.input(plane)));
}

Graph::NodeId hdc_graph(Graph& g, ParamContext& pc, Graph::NodeId reduced,
                        int extent, const std::vector<int>& rates) {
  if (rates.empty()) throw ValidationError("hdc: empty dilation schedule");
  if (extent < 1) throw ValidationError("hdc: spatial extent must be positive");
  std::vector<Graph::NodeId> outputs;
  Graph::NodeId cur = reduced;
  for (std::size_t l = 0; l < rates.size(); ++l) {
    cur = g.gelu(g.conv2d(cur, pc[hdc_param_w(static_cast<int>(l))],
                          pc[hdc_param_b(static_cast<int>(l))], extent, rates[l]));
    outputs.push_back(cur);
  }
  return g.concat_cols(outputs);
}

Tensor hdc(const Tensor& reduced, int extent, const std::vector<int>& rates,
           const ParamStore& store) {
  Graph g;
  ParamContext pc(g, const_cast<ParamStore&>(store), false);
  return g.val(hdc_graph(g, pc, g.input(reduced), extent, rates));
}

}  // namespace relplane
