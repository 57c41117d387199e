#ifndef RELPLANE_PLANE_HPP_
#define RELPLANE_PLANE_HPP_

#include <string>
#include <vector>

#include "relplane/encoder.hpp"
#include "relplane/featgen.hpp"
#include "relplane/params.hpp"

namespace relplane {

// How engineered features reach the model. FI adds feature vectors at
// mapped plane cells, FR overwrites those cells, BEF/AFT concatenate the
// feature rows to the sentence before the plane transform, NONE disables
// injection.
enum class InjectionMode { FI, FR, BEF, AFT, NONE };

std::string injection_mode_name(InjectionMode m);
InjectionMode injection_mode_from(const std::string& name);

constexpr double kClnEpsilon = 1e-5;

extern const char* kClnGainW;   // "cln.gain.W"
extern const char* kClnGainB;   // "cln.gain.b"
extern const char* kClnBiasW;   // "cln.bias.W"
extern const char* kClnBiasB;   // "cln.bias.b"
extern const char* kReduceW;    // "reduce.W"
extern const char* kReduceB;    // "reduce.b"

std::string hdc_param_w(int layer);
std::string hdc_param_b(int layer);

void init_plane_params(ParamStore& store, int d, int d_reduced,
                       int hdc_layers, Rng& rng);

// --- conditional layer normalization ----------------------------------------
// P[i][j] = gain(h_i) (.) standardize(h_j) + bias(h_i), with gain/bias
// affine in the conditioning row. Output is (M*M) x d, cell (i,j) at row
// i*M + j.

Graph::NodeId cln_graph(Graph& g, ParamContext& pc, Graph::NodeId H);
Tensor cln(const Tensor& H, const ParamStore& store);

// --- feature injection geometry ----------------------------------------------

struct InjectionAssignment {
  int feature = 0;  // 1..8
  int row = 0;
  int col = 0;
};

// Eight cell assignments: single-entity features on the diagonal at
// their marker positions, pair features in the strict upper triangle at
// marker-pair positions.
struct InjectionMap {
  std::vector<InjectionAssignment> assignments;
  int extent = 0;  // M

  void validate() const;  // geometry invariants
};

InjectionMap build_injection_map(const MarkedSentence& marked);

Graph::NodeId inject_graph(Graph& g, Graph::NodeId plane, Graph::NodeId Hf,
                           const InjectionMap& map, InjectionMode mode);
Tensor inject(const Tensor& plane, const Tensor& Hf, const InjectionMap& map,
              InjectionMode mode);

// --- sequence-level feature concatenation (BEF / AFT) -----------------------

Graph::NodeId prepend_features_graph(Graph& g, Graph::NodeId H, Graph::NodeId Hf,
                                     InjectionMode mode);
Tensor prepend_features(const Tensor& H, const Tensor& Hf, InjectionMode mode);

// --- 1x1 reduction and hybrid dilated convolution ---------------------------

Graph::NodeId reduce_graph(Graph& g, ParamContext& pc, Graph::NodeId plane);
Tensor reduce(const Tensor& plane, const ParamStore& store);

extern const std::vector<int> kDefaultHdcRates;  // {1, 2, 3, 4}

// Chained 3x3 convolutions with the given dilation rates, Gelu after
// each layer, per-layer outputs concatenated along channels.
Graph::NodeId hdc_graph(Graph& g, ParamContext& pc, Graph::NodeId reduced,
                        int extent, const std::vector<int>& rates);
Tensor hdc(const Tensor& reduced, int extent, const std::vector<int>& rates,
           const ParamStore& store);

}  // namespace relplane

#endif  // RELPLANE_PLANE_HPP_
