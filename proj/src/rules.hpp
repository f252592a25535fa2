#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "types.hpp"

namespace ruleke {

// Chain rule body_1(z0,z1) & ... & body_n(z_{n-1},z_n) -> head(z0,z_n).
// support is the confidence weight applied during activation, in [0, 1].
struct Rule {
  Relation head;
  std::vector<Relation> body;
  double support = 1.0;

  friend bool operator==(const Rule& a, const Rule& b) {
    return a.head == b.head && a.body == b.body && a.support == b.support;
  }
};

// Ordered collection; (head, body) pairs are unique, support is not part of
// the identity.
class RuleSet {
public:
  RuleSet() = default;
  explicit RuleSet(std::vector<Rule> rules);

  // Rejects duplicates with Error{Conflict}.
  void add(Rule r);

  const std::vector<Rule>& rules() const { return rules_; }
  size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }
  const Rule& operator[](size_t i) const { return rules_[i]; }
  auto begin() const { return rules_.begin(); }
  auto end() const { return rules_.end(); }

  std::vector<double> supports() const;

private:
  bool contains(const Rule& r) const;
  std::vector<Rule> rules_;
  std::set<std::pair<Relation, std::vector<Relation>>> identities_;
};

// Text form, e.g. "father_is(z0,z1) & wife_is(z1,z2) -> mother_is(z0,z2) @0.95".
// Variables are positional: body atom i connects z_{i-1} to z_i and the head
// spans z0..zn. The "@support" suffix is omitted when support == 1.
//
// parse_rule is total: any input yields either a Rule or Error{Parse} whose
// message carries the byte offset of the defect.
Rule parse_rule(const std::string& text);
std::string render_rule(const Rule& r);

// One rule per line, '#' and blank lines ignored. Duplicate (head, body) is
// Error{Conflict} naming the line.
RuleSet load_rules(const std::string& path);
void save_rules(const RuleSet& rules, const std::string& path);

}  // namespace ruleke
