#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "benchmark.hpp"
#include "edit_memory.hpp"
#include "kg.hpp"
#include "tracking.hpp"

namespace ruleke {

struct HopStep {
  Relation relation;
  EntityId entity;
  TraceSource source;  // edit-memory or oracle

  friend bool operator==(const HopStep&, const HopStep&) = default;
};

struct Prediction {
  std::string id;
  std::optional<EntityId> answer;  // absent when a hop found nothing
  std::vector<HopStep> hop_trace;
};

// Walk the coarse path: each hop asks the edit memory first, then the
// closure oracle. A dry hop ends the walk with no answer.
Prediction solve(const BenchmarkInstance& instance, const EditMemory& mem,
                 const KnowledgeOracle& oracle, double theta);

// Fraction of instances answered with the gold entity or one of its aliases.
// Instances sharing an id form one group scored as correct when any member
// is. preds[i] must carry golds[i]'s id, else Error{Invalid}.
double multi_hop_accuracy(const std::vector<Prediction>& preds,
                          const std::vector<BenchmarkInstance>& golds);

struct ExperimentConfig {
  size_t batch = 0;  // edits of how many instances share one memory; 0 = all
  double delta = 0.8;
  double theta = 0.7;
  bool augmented = true;
  bool fixpoint = false;
  uint64_t seed = 0;  // drives the within-stratum shuffle only
  size_t jobs = 1;
  bool timings = false;  // off keeps reports byte-stable across runs
};

struct ExperimentReport {
  ExperimentConfig setting;
  double overall_accuracy = 0.0;
  std::map<Scenario, double> per_scenario;
  std::map<size_t, double> per_hop;
  double growth_ratio = 1.0;  // total memory size over total edit count
  size_t oracle_calls = 0;    // tracking and solving combined
  size_t oracle_misses = 0;   // augment failures, by kind
  size_t ambiguous_inverses = 0;
  size_t conflicts = 0;
  double wall_time_seconds = 0.0;  // stays 0 unless timings requested
};

// Stratify by hop count (seeded shuffle within a stratum), deal round-robin
// into batches of `batch` instances, then per batch: collect its edits in
// order, optionally augment, freeze, solve every instance against the
// frozen memory. Batches run in parallel under jobs > 1; the report is
// independent of jobs.
ExperimentReport run_experiment(const std::vector<BenchmarkInstance>& instances,
                                const KnowledgeBase& kb, const RuleSet& rules,
                                const Encoder& encoder, const ExperimentConfig& config = {});

struct SweepRow {
  double delta = 0.0;
  double accuracy = 0.0;
  double growth_ratio = 1.0;
};

// One augmented experiment per delta; config.delta is ignored.
std::vector<SweepRow> sweep_delta(const std::vector<BenchmarkInstance>& instances,
                                  const KnowledgeBase& kb, const RuleSet& rules,
                                  const Encoder& encoder, const std::vector<double>& deltas,
                                  const ExperimentConfig& config = {});

std::string report_to_json(const ExperimentReport& report);
std::string report_to_csv(const ExperimentReport& report);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace ruleke
