#ifndef RELPLANE_SYNTH_HPP_
#define RELPLANE_SYNTH_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "relplane/corpus.hpp"

namespace relplane {

// Synthetic relation corpora with rule-decidable gold labels.
//
// The gold label of every instance is a deterministic function of
// (entity types, relative order, the sentence's single trigger token);
// sentences without a trigger are null instances. Entity surface words
// are drawn from a pool shared across entity types, so the types are
// recoverable only from the annotations, not from the text.
struct SynthOptions {
  double null_fraction = 0.2;    // share of no-relation instances
  double nested_fraction = 0.15; // share of containment geometries
};

LabelSet default_synth_schema();  // four relation types plus no_relation

const std::vector<std::string>& synth_triggers();

// Recomputes the gold label from an instance's annotations and tokens.
// This is the labeling rule itself; a classifier that recovers it scores
// a perfect F1 on generated corpora.
std::string synth_rule_label(const RelationInstance& inst, const LabelSet& schema);

// Deterministic in all arguments. difficulty in [0,1] (clamped) controls
// the rate of unannotated distractor entity words and of instance pairs
// that share one sentence.
Corpus generate_synthetic(std::uint64_t seed, int n, const LabelSet& schema,
                          double difficulty, const SynthOptions& opt = {});

}  // namespace relplane

#endif  // RELPLANE_SYNTH_HPP_
