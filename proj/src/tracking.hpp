#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "activation.hpp"
#include "edit_memory.hpp"
#include "kg.hpp"
#include "rules.hpp"

namespace ruleke {

// Answers queries about the pre-edit world. The production backend would be
// a language model prompted per relation; here the default reads the base
// graph plus one level of rule closure, which is enough to reproduce the
// stale-answer behaviour edits are meant to override.
class KnowledgeOracle {
 public:
  virtual ~KnowledgeOracle() = default;

  virtual std::optional<EntityId> query_object(const EntityId& subject,
                                               const Relation& relation) const = 0;
  // All subjects s with relation(s, object), sorted. May be empty.
  virtual std::vector<EntityId> query_subjects(const Relation& relation,
                                               const EntityId& object) const = 0;
};

// Graph-backed oracle. Probes under every alias of the query entity and
// unions the answers; multiple derivations collapse to the smallest entity
// so repeated queries agree. Non-owning: kb and rules must outlive it.
class KbOracle : public KnowledgeOracle {
 public:
  KbOracle(const KnowledgeBase& kb, const RuleSet& rules) : kb_(kb), rules_(rules) {}

  std::optional<EntityId> query_object(const EntityId& subject,
                                       const Relation& relation) const override;
  std::vector<EntityId> query_subjects(const Relation& relation,
                                       const EntityId& object) const override;

 private:
  const KnowledgeBase& kb_;
  const RuleSet& rules_;
};

// Pass-through wrapper that counts calls. Tracking must prefer edit memory
// over the oracle, and the counts make that observable.
class CountingOracle : public KnowledgeOracle {
 public:
  explicit CountingOracle(const KnowledgeOracle& inner) : inner_(inner) {}

  std::optional<EntityId> query_object(const EntityId& subject,
                                       const Relation& relation) const override {
    ++object_calls_;
    return inner_.query_object(subject, relation);
  }
  std::vector<EntityId> query_subjects(const Relation& relation,
                                       const EntityId& object) const override {
    ++subject_calls_;
    return inner_.query_subjects(relation, object);
  }

  size_t object_calls() const { return object_calls_; }
  size_t subject_calls() const { return subject_calls_; }
  size_t calls() const { return object_calls_ + subject_calls_; }
  void reset() { object_calls_ = subject_calls_ = 0; }

 private:
  const KnowledgeOracle& inner_;
  mutable size_t object_calls_ = 0;
  mutable size_t subject_calls_ = 0;
};

enum class TraceSource { Trigger, EditMemory, Oracle };
const char* to_string(TraceSource s);

// One resolved chain variable. `relation` is the body atom that fixed the
// entity: atom j for positions j >= 1, atom 1 for position 0, the matched
// atom for the two trigger positions.
struct TraceStep {
  size_t position;
  Relation relation;
  EntityId entity;
  TraceSource source;

  bool operator==(const TraceStep&) const = default;
};

// A correlated fact inferred from one activation, with enough provenance to
// replay the chain. The trace covers every position 0..n in order.
struct DerivedFact {
  Fact fact;      // rule.head(z_0, z_n)
  Rule rule;
  Edit trigger;
  size_t position;  // matched body atom, 1-based
  std::vector<TraceStep> trace;
};

enum class TrackingErrorKind { OracleMiss, AmbiguousInverse, Empty };
const char* to_string(TrackingErrorKind k);

struct TrackingError {
  TrackingErrorKind kind;
  std::string detail;
};

using TrackOutcome = std::variant<EntityId, TrackingError>;
using InferOutcome = std::variant<DerivedFact, TrackingError>;

// Resolve z_n from z_k = start by walking the body atoms after position k.
// Each step asks the edit memory first and falls back to the oracle;
// OracleMiss when neither answers. k = n returns start untouched. If trace
// is given, one step per resolved position (k+1..n) is appended.
TrackOutcome forward_track(const Rule& rule, size_t k, const EntityId& start,
                           const EditMemory& mem, const KnowledgeOracle& oracle,
                           double theta, std::vector<TraceStep>* trace = nullptr);

// Resolve z_0 from z_{k-1} = end by walking the body atoms before position k
// in reverse. A step needs a unique subject: AmbiguousInverse when the
// oracle offers two or more, OracleMiss when it offers none and the memory
// has no match. k = 1 returns end untouched.
TrackOutcome back_track(const Rule& rule, size_t k, const EntityId& end,
                        const EditMemory& mem, const KnowledgeOracle& oracle,
                        double theta, std::vector<TraceStep>* trace = nullptr);

// Instantiate the activated rule around the edit (z_{k-1} := subject,
// z_k := new object), resolve both ends, and emit rule.head(z_0, z_n).
// Tracking failures propagate and the rule is simply skipped by callers.
InferOutcome infer_correlated(const Edit& edit, const Activation& activation,
                              const EditMemory& mem, const KnowledgeOracle& oracle,
                              double theta);

// Derived facts enter the memory as edits with no prior object.
Edit to_edit(const DerivedFact& df);

struct AugmentStats {
  size_t originals = 0;  // |M|
  size_t derived = 0;    // |M_K'|
  double growth_ratio = 1.0;  // |M_AUG| / |M|, 1.0 for an empty input
  size_t oracle_misses = 0;
  size_t ambiguous_inverses = 0;
  size_t empties = 0;
  size_t conflicts = 0;  // derived edits contradicting an original
  size_t rounds = 0;     // activation passes; 1 unless fixpoint iterates
};

struct AugmentOptions {
  double delta = 0.8;
  double theta = 0.7;
  bool fixpoint = false;
  size_t max_rounds = 10;  // cap on fixpoint re-runs past the first pass
};

// The memory references aliases and encoder; both must outlive the result.
struct AugmentResult {
  EditMemory memory;  // M_AUG: originals in order, then derived null-edits
  std::vector<DerivedFact> derived;
  AugmentStats stats;
};

// Build M_AUG. Edits are inserted in input order, each before its own
// activation scan, so tracking for an edit sees all earlier edits and
// itself. Derived facts are deduped on (relation, subject, new object) and
// appended after the originals; with fixpoint they are scanned in turn
// until nothing new appears or the round cap is hit. A derived edit that
// contradicts an original is counted, still appended, and loses retrieval
// ties to the original by insertion order.
AugmentResult augment(const std::vector<Edit>& edits, const RuleSet& rules,
                      const KnowledgeOracle& oracle, const Encoder& encoder,
                      const AliasTable& aliases, const AugmentOptions& opts = {});

}  // namespace ruleke
