#pragma once

#include <optional>
#include <vector>

#include "encoder.hpp"
#include "rules.hpp"

namespace ruleke {

// An edit judged relevant to one rule: the edit stands in for body atom
// `position` (1-based), with similarity scaled by the rule's support weight.
struct Activation {
  Rule rule;
  size_t position;
  double similarity;
  double scaled;
};

// Best-matching body atom for the edit relation: argmax of cosine against
// each atom, ties resolved to the smallest position.
std::pair<size_t, double> best_match(const Relation& edit_relation, const Rule& rule,
                                     const Encoder& encoder);

// Activated iff similarity * support > delta, strictly.
std::optional<Activation> is_activated(const Relation& edit_relation, const Rule& rule,
                                       const Encoder& encoder, double delta);

// Activations over the whole set, preserving rule order.
std::vector<Activation> activated_rules(const Relation& edit_relation, const RuleSet& rules,
                                        const Encoder& encoder, double delta);

}  // namespace ruleke
