#pragma once

#include "kg.hpp"
#include "rules.hpp"

namespace ruleke {

// Mines length-2 chain rules r1(z0,z1) & r2(z1,z2) -> r3(z0,z2).
//
//   body_count(r1,r2)       = |{(a,b,c) : r1(a,b), r2(b,c)}|
//   support_count(r1,r2,r3) = |{(a,b,c) : r1(a,b), r2(b,c), r3(a,c)}|
//
// A candidate is emitted when support_count >= min_support_count and
// support_count/body_count >= min_confidence; the ratio becomes the rule's
// support weight. Output is sorted by descending confidence, then head name,
// then body names, so equal inputs serialize byte-identically. `jobs`
// partitions the r1 axis; 0 means one worker per core.
RuleSet mine_rules(const KnowledgeBase& kb, size_t min_support_count = 2,
                   double min_confidence = 0.5, unsigned jobs = 1);

// Confidence of an existing length-2 rule against kb. Zero body groundings is
// Error{Invalid}: the ratio is undefined, not zero.
double rule_confidence(const KnowledgeBase& kb, const Rule& rule);

}  // namespace ruleke
