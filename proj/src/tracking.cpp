#include "tracking.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace ruleke {

std::optional<EntityId> KbOracle::query_object(const EntityId& subject,
                                               const Relation& relation) const {
  std::set<EntityId> answers;
  for (const auto& name : kb_.alias_expand(subject)) {
    auto derived = derive_by_rules(kb_, rules_, name, relation);
    answers.insert(derived.begin(), derived.end());
  }
  if (answers.empty()) return std::nullopt;
  return *answers.begin();
}

std::vector<EntityId> KbOracle::query_subjects(const Relation& relation,
                                               const EntityId& object) const {
  std::set<EntityId> answers;
  for (const auto& name : kb_.alias_expand(object)) {
    auto derived = derive_subjects_by_rules(kb_, rules_, relation, name);
    answers.insert(derived.begin(), derived.end());
  }
  return {answers.begin(), answers.end()};
}

const char* to_string(TraceSource s) {
  switch (s) {
    case TraceSource::Trigger: return "trigger";
    case TraceSource::EditMemory: return "edit-memory";
    case TraceSource::Oracle: return "oracle";
  }
  return "?";
}

const char* to_string(TrackingErrorKind k) {
  switch (k) {
    case TrackingErrorKind::OracleMiss: return "oracle-miss";
    case TrackingErrorKind::AmbiguousInverse: return "ambiguous-inverse";
    case TrackingErrorKind::Empty: return "empty";
  }
  return "?";
}

TrackOutcome forward_track(const Rule& rule, size_t k, const EntityId& start,
                           const EditMemory& mem, const KnowledgeOracle& oracle,
                           double theta, std::vector<TraceStep>* trace) {
  const size_t n = rule.body.size();
  if (k < 1 || k > n) {
    return TrackingError{TrackingErrorKind::Empty,
                         "position " + std::to_string(k) + " outside body of " + render_rule(rule)};
  }
  EntityId cur = start;
  for (size_t m = k; m < n; ++m) {
    const Relation& rel = rule.body[m];  // atom m+1 resolves position m+1
    TraceSource source;
    if (auto hit = mem.retrieve_forward(cur, rel, theta)) {
      cur = hit->edit.new_object;
      source = TraceSource::EditMemory;
    } else if (auto obj = oracle.query_object(cur, rel)) {
      cur = *obj;
      source = TraceSource::Oracle;
    } else {
      return TrackingError{TrackingErrorKind::OracleMiss,
                           "no object for " + rel + "(" + cur + ", ?)"};
    }
    if (trace) trace->push_back({m + 1, rel, cur, source});
  }
  return cur;
}

TrackOutcome back_track(const Rule& rule, size_t k, const EntityId& end,
                        const EditMemory& mem, const KnowledgeOracle& oracle,
                        double theta, std::vector<TraceStep>* trace) {
  const size_t n = rule.body.size();
  if (k < 1 || k > n) {
    return TrackingError{TrackingErrorKind::Empty,
                         "position " + std::to_string(k) + " outside body of " + render_rule(rule)};
  }
  EntityId cur = end;
  for (size_t j = k - 1; j >= 1; --j) {
    const Relation& rel = rule.body[j - 1];  // atom j resolves position j-1
    TraceSource source;
    if (auto hit = mem.retrieve_backward(cur, rel, theta)) {
      cur = hit->edit.subject;
      source = TraceSource::EditMemory;
    } else {
      auto subjects = oracle.query_subjects(rel, cur);
      if (subjects.empty()) {
        return TrackingError{TrackingErrorKind::OracleMiss,
                             "no subject for " + rel + "(?, " + cur + ")"};
      }
      if (subjects.size() >= 2) {
        return TrackingError{TrackingErrorKind::AmbiguousInverse,
                             std::to_string(subjects.size()) + " subjects for " + rel + "(?, " +
                                 cur + ")"};
      }
      cur = subjects.front();
      source = TraceSource::Oracle;
    }
    if (trace) trace->push_back({j - 1, rel, cur, source});
  }
  return cur;
}

InferOutcome infer_correlated(const Edit& edit, const Activation& activation,
                              const EditMemory& mem, const KnowledgeOracle& oracle,
                              double theta) {
  const Rule& rule = activation.rule;
  const size_t k = activation.position;
  const size_t n = rule.body.size();
  if (k < 1 || k > n) {
    return TrackingError{TrackingErrorKind::Empty,
                         "activation position " + std::to_string(k) + " outside body of " +
                             render_rule(rule)};
  }

  std::vector<TraceStep> trace;
  trace.push_back({k - 1, rule.body[k - 1], edit.subject, TraceSource::Trigger});
  trace.push_back({k, rule.body[k - 1], edit.new_object, TraceSource::Trigger});

  auto back = back_track(rule, k, edit.subject, mem, oracle, theta, &trace);
  if (auto* err = std::get_if<TrackingError>(&back)) return *err;
  auto forward = forward_track(rule, k, edit.new_object, mem, oracle, theta, &trace);
  if (auto* err = std::get_if<TrackingError>(&forward)) return *err;

  std::sort(trace.begin(), trace.end(),
            [](const TraceStep& a, const TraceStep& b) { return a.position < b.position; });

  DerivedFact df;
  df.fact = Fact{rule.head, std::get<EntityId>(back), std::get<EntityId>(forward)};
  df.rule = rule;
  df.trigger = edit;
  df.position = k;
  df.trace = std::move(trace);
  return df;
}

Edit to_edit(const DerivedFact& df) {
  return Edit{df.fact.relation, df.fact.subject, std::nullopt, df.fact.object};
}

namespace {

bool sets_intersect(const std::set<std::string>& a, const std::set<std::string>& b) {
  for (const auto& x : a) {
    if (b.count(x)) return true;
  }
  return false;
}

// Contradiction: same relation, same entity as subject, different entity as
// new object. Subject and object identity are alias-mediated like retrieval.
bool contradicts(const Edit& derived, const Edit& original, const AliasTable& aliases) {
  if (derived.relation != original.relation) return false;
  if (!sets_intersect(aliases.expand(derived.subject), aliases.expand(original.subject))) {
    return false;
  }
  return !sets_intersect(aliases.expand(derived.new_object),
                         aliases.expand(original.new_object));
}

}  // namespace

AugmentResult augment(const std::vector<Edit>& edits, const RuleSet& rules,
                      const KnowledgeOracle& oracle, const Encoder& encoder,
                      const AliasTable& aliases, const AugmentOptions& opts) {
  AugmentResult result{EditMemory(aliases, encoder), {}, {}};
  EditMemory& mem = result.memory;
  AugmentStats& stats = result.stats;
  stats.originals = edits.size();

  std::set<std::tuple<Relation, EntityId, EntityId>> seen;
  std::vector<DerivedFact> pending;  // derivations of the current pass

  auto scan = [&](const Edit& edit) {
    for (const auto& act : activated_rules(edit.relation, rules, encoder, opts.delta)) {
      auto outcome = infer_correlated(edit, act, mem, oracle, opts.theta);
      if (auto* err = std::get_if<TrackingError>(&outcome)) {
        switch (err->kind) {
          case TrackingErrorKind::OracleMiss: ++stats.oracle_misses; break;
          case TrackingErrorKind::AmbiguousInverse: ++stats.ambiguous_inverses; break;
          case TrackingErrorKind::Empty: ++stats.empties; break;
        }
        continue;
      }
      auto& df = std::get<DerivedFact>(outcome);
      if (seen.insert({df.fact.relation, df.fact.subject, df.fact.object}).second) {
        pending.push_back(std::move(df));
      }
    }
  };

  // First pass: each original enters the memory, then fires its rules.
  stats.rounds = 1;
  for (const auto& e : edits) {
    mem.insert(e);
    scan(e);
  }

  // Append this pass's derivations; with fixpoint the appended edits are
  // themselves scanned until nothing new shows up or the cap is reached.
  while (!pending.empty()) {
    const size_t frontier_begin = mem.size();
    for (auto& df : pending) {
      Edit e = to_edit(df);
      for (const auto& orig : edits) {
        if (contradicts(e, orig, aliases)) {
          ++stats.conflicts;
          break;
        }
      }
      mem.insert(std::move(e));
      result.derived.push_back(std::move(df));
    }
    pending.clear();
    if (!opts.fixpoint || stats.rounds > opts.max_rounds) break;
    ++stats.rounds;
    for (size_t i = frontier_begin; i < mem.size(); ++i) scan(mem[i]);
  }

  stats.derived = result.derived.size();
  stats.growth_ratio =
      edits.empty() ? 1.0
                    : static_cast<double>(mem.size()) / static_cast<double>(edits.size());
  return result;
}

}  // namespace ruleke
