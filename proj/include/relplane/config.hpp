#ifndef RELPLANE_CONFIG_HPP_
#define RELPLANE_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "relplane/head.hpp"
#include "relplane/plane.hpp"

namespace relplane {

enum class MetricKind { Micro, Macro };

std::string metric_name(MetricKind m);
MetricKind metric_from(const std::string& name);

// Every hyperparameter, ablation flag, and injection mode of one
// experiment. Serialized as flat `key = value` lines; the canonical
// serialization is hashed into the config fingerprint.
struct ModelConfig {
  int d = 32;
  int d_prime = 8;
  std::vector<int> hdc_rates = {1, 2, 3, 4};
  int heads = 4;
  double dropout = 0.3;
  double lr = 3e-5;
  double warmup = 0.1;
  int batch = 8;
  int epochs = 20;
  std::uint64_t seed = 7;
  InjectionMode injection_mode = InjectionMode::FI;
  CfaMode cfa_mode = CfaMode::Pooled;
  bool use_bilstm = true;
  bool use_plane = true;  // the 2D interaction module
  bool use_hdc = true;
  bool use_cfa = true;
  bool use_cfa_linear = true;
  bool use_cfa_attention = true;
  // Scoped removals: drop the feature query (the combined-feature summary
  // used as the attention query) or the marker-aware entity encoding from
  // the attention module only, leaving the plane path intact.
  bool use_cfa_feature_query = true;
  bool use_cfa_marked_entities = true;
  bool use_complex_features = true;
  bool use_feature_engineering = true;
  MetricKind metric = MetricKind::Micro;

  void validate() const;  // throws ConfigError naming the conflict

  std::string canonical() const;
  std::string fingerprint() const;  // 16 hex chars over the canonical form

  static ModelConfig parse(const std::string& text);
  static ModelConfig load(const std::string& path);
  void save(const std::string& path) const;

  bool operator==(const ModelConfig&) const = default;
};

std::uint64_t fnv1a_hash(const std::string& s);
std::string hex64(std::uint64_t value);

}  // namespace relplane

#endif  // RELPLANE_CONFIG_HPP_
