#include "activation.hpp"

namespace ruleke {

std::pair<size_t, double> best_match(const Relation& edit_relation, const Rule& rule,
                                     const Encoder& encoder) {
  if (rule.body.empty()) throw Error(ErrorCode::Invalid, "rule with empty body");
  const auto edit_vec = encoder.encode(edit_relation);
  size_t best_k = 1;
  double best_sim = -2.0;
  for (size_t k = 0; k < rule.body.size(); ++k) {
    const double sim = cosine(encoder.encode(rule.body[k]), edit_vec);
    if (sim > best_sim) {
      best_sim = sim;
      best_k = k + 1;
    }
  }
  return {best_k, best_sim};
}

std::optional<Activation> is_activated(const Relation& edit_relation, const Rule& rule,
                                       const Encoder& encoder, double delta) {
  const auto [k, sim] = best_match(edit_relation, rule, encoder);
  const double scaled = sim * rule.support;
  if (scaled > delta) return Activation{rule, k, sim, scaled};
  return std::nullopt;
}

std::vector<Activation> activated_rules(const Relation& edit_relation, const RuleSet& rules,
                                        const Encoder& encoder, double delta) {
  std::vector<Activation> out;
  for (const auto& rule : rules) {
    if (auto a = is_activated(edit_relation, rule, encoder, delta)) {
      out.push_back(std::move(*a));
    }
  }
  return out;
}

}  // namespace ruleke
