#include "ruleke.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "benchmark.hpp"
#include "edit_memory.hpp"
#include "encoder.hpp"
#include "eval.hpp"
#include "kg.hpp"
#include "miner.hpp"
#include "rules.hpp"
#include "tracking.hpp"
#include "types.hpp"

using namespace ruleke;

// Handle bodies. Each wraps exactly the C++ object its functions act on;
// the oracle owns its backend and may borrow a kb-backed one's sources.
struct rk_kb {
  KnowledgeBase kb;
};
struct rk_rules {
  RuleSet rules;
};
struct rk_edits {
  std::vector<Edit> edits;
};
struct rk_templates {
  TemplateTable table;
};
struct rk_dataset {
  std::vector<BenchmarkInstance> instances;
};
struct rk_oracle {
  std::unique_ptr<KnowledgeOracle> backend;
};

namespace {

thread_local std::string t_last_error;

rk_status fail(rk_status status, const std::string& message) {
  t_last_error = message;
  return status;
}

rk_status from_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return RK_ERR_IO;
    case ErrorCode::Parse: return RK_ERR_PARSE;
    case ErrorCode::Conflict: return RK_ERR_CONFLICT;
    case ErrorCode::Invalid: return RK_ERR_INVALID;
    case ErrorCode::NotFound: return RK_ERR_NOT_FOUND;
    case ErrorCode::State: return RK_ERR_INTERNAL;
  }
  return RK_ERR_INTERNAL;
}

// Runs fn, routing exceptions into status codes and the thread's error slot.
template <typename Fn>
rk_status guarded(Fn&& fn) {
  try {
    t_last_error.clear();
    fn();
    return RK_OK;
  } catch (const Error& e) {
    return fail(from_code(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail(RK_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RK_ERR_INTERNAL, "unknown failure");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

rk_status require(bool ok, const char* what) {
  return ok ? RK_OK : fail(RK_ERR_INVALID, std::string("null ") + what);
}

// Adapter for caller-supplied backends. Defensive on the way in: answers
// are copied immediately, subject lists are sorted and deduplicated so the
// ambiguity test downstream sees multiplicity, not callback quirks.
class CallbackOracle : public KnowledgeOracle {
 public:
  explicit CallbackOracle(const rk_oracle_callbacks& cb) : cb_(cb) {}

  std::optional<EntityId> query_object(const EntityId& subject,
                                       const Relation& relation) const override {
    if (cb_.query_object == nullptr) return std::nullopt;
    char* raw = cb_.query_object(cb_.user, subject.c_str(), relation.c_str());
    if (raw == nullptr) return std::nullopt;
    std::string out(raw);
    std::free(raw);
    if (out.empty()) return std::nullopt;
    return out;
  }

  std::vector<EntityId> query_subjects(const Relation& relation,
                                       const EntityId& object) const override {
    std::vector<EntityId> out;
    if (cb_.query_subjects == nullptr) return out;
    char** raw = cb_.query_subjects(cb_.user, relation.c_str(), object.c_str());
    if (raw == nullptr) return out;
    for (char** p = raw; *p != nullptr; ++p) {
      if (**p != '\0') out.emplace_back(*p);
      std::free(*p);
    }
    std::free(raw);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  rk_oracle_callbacks cb_;
};

AugmentOptions to_augment_options(const rk_augment_options* opts) {
  AugmentOptions out;
  if (opts != nullptr) {
    out.delta = opts->delta;
    out.theta = opts->theta;
    out.fixpoint = opts->fixpoint != 0;
    out.max_rounds = opts->max_rounds;
  }
  return out;
}

GenerationOptions to_generation_options(const rk_generation_options* opts) {
  GenerationOptions out;
  if (opts != nullptr) {
    out.seed = opts->seed;
    out.max_hops = opts->max_hops;
    out.allow_ambiguous = opts->allow_ambiguous != 0;
    out.delta = opts->delta;
    out.theta = opts->theta;
    out.attempts_per_instance = opts->attempts_per_instance;
  }
  return out;
}

size_t resolve_jobs(size_t jobs) {
  if (jobs != 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

ExperimentConfig to_experiment_config(const rk_experiment_options* opts) {
  ExperimentConfig out;
  if (opts != nullptr) {
    out.batch = opts->batch;
    out.delta = opts->delta;
    out.theta = opts->theta;
    out.augmented = opts->augmented != 0;
    out.fixpoint = opts->fixpoint != 0;
    out.seed = opts->seed;
    out.jobs = resolve_jobs(opts->jobs);
    out.timings = opts->timings != 0;
  }
  return out;
}

}  // namespace

extern "C" {

const char* rk_last_error(void) { return t_last_error.c_str(); }

const char* rk_version(void) { return "0.1.0"; }

void rk_string_free(char* s) { std::free(s); }

/* ---------- knowledge base ---------- */

rk_status rk_kb_load(const char* triples_path, const char* aliases_path, rk_kb** out) {
  if (rk_status s = require(triples_path != nullptr, "triples_path")) return s;
  if (rk_status s = require(out != nullptr, "out")) return s;
  return guarded([&] {
    auto handle = std::make_unique<rk_kb>();
    handle->kb = load_knowledge_base(triples_path,
                                     aliases_path == nullptr ? std::string{} : aliases_path);
    *out = handle.release();
  });
}

rk_status rk_kb_save(const rk_kb* kb, const char* path) {
  if (rk_status s = require(kb != nullptr, "kb")) return s;
  if (rk_status s = require(path != nullptr, "path")) return s;
  return guarded([&] { save_knowledge_base(kb->kb, path); });
}

void rk_kb_free(rk_kb* kb) { delete kb; }

size_t rk_kb_fact_count(const rk_kb* kb) { return kb == nullptr ? 0 : kb->kb.fact_count(); }
size_t rk_kb_entity_count(const rk_kb* kb) { return kb == nullptr ? 0 : kb->kb.entity_count(); }
size_t rk_kb_relation_count(const rk_kb* kb) {
  return kb == nullptr ? 0 : kb->kb.relation_count();
}

/* ---------- rules ---------- */

rk_status rk_rules_load(const char* path, rk_rules** out) {
  if (rk_status s = require(path != nullptr, "path")) return s;
  if (rk_status s = require(out != nullptr, "out")) return s;
  return guarded([&] {
    auto handle = std::make_unique<rk_rules>();
    handle->rules = load_rules(path);
    *out = handle.release();
  });
}

rk_status rk_rules_save(const rk_rules* rules, const char* path) {
  if (rk_status s = require(rules != nullptr, "rules")) return s;
  if (rk_status s = require(path != nullptr, "path")) return s;
  return guarded([&] { save_rules(rules->rules, path); });
}

void rk_rules_free(rk_rules* rules) { delete rules; }

size_t rk_rules_count(const rk_rules* rules) {
  return rules == nullptr ? 0 : rules->rules.size();
}

rk_status rk_rules_render(const rk_rules* rules, size_t index, char** out) {
  if (rk_status s = require(rules != nullptr, "rules")) return s;
  if (rk_status s = require(out != nullptr, "out")) return s;
  return guarded([&] {
    if (index >= rules->rules.size())
      throw Error(ErrorCode::NotFound, "rule index " + std::to_string(index) + " out of range");
    *out = copy_string(render_rule(rules->rules[index]));
  });
}

rk_status rk_rules_mine(const rk_kb* kb, size_t min_support, double min_confidence,
                        size_t jobs, rk_rules** out) {
  if (rk_status s = require(kb != nullptr, "kb")) return s;
  if (rk_status s = require(out != nullptr, "out")) return s;
  return guarded([&] {
    auto handle = std::make_unique<rk_rules>();
    handle->rules = mine_rules(kb->kb, min_support, min_confidence,
                               static_cast<unsigned>(resolve_jobs(jobs)));
    *out = handle.release();
  });
}

/* ---------- edits ---------- */

rk_status rk_edits_load(const char* path, rk_edits** out) {
  if (rk_status s = require(path != nullptr, "path")) return s;
  if (rk_status s = require(out != nullptr, "out")) return s;
  return guarded([&] {
    auto handle = std::make_unique<rk_edits>();
    handle->edits = load_edits(path);
    *out = handle.release();
  });
}

rk_status rk_edits_save(const rk_edits* edits, const char* path) {
  if (rk_status s = require(edits != nullptr, "edits")) return s;
  if (rk_status s = require(path != nullptr, "path")) return s;
  return guarded([&] { save_edits(edits->edits, path); });
}

void rk_edits_free(rk_edits* edits) { delete edits; }

size_t rk_edits_count(const rk_edits* edits) {
  return edits == nullptr ? 0 : edits->edits.size();
}

/* ---------- oracle ---------- */

rk_status rk_oracle_from_kb(const rk_kb* kb, const rk_rules* rules, rk_oracle** out) {
  if (rk_status s = require(kb != nullptr, "kb")) return s;
  if (rk_status s = require(rules != nullptr, "rules")) return s;
  if (rk_status s = require(out != nullptr, "out")) return s;
  return guarded([&] {
    auto handle = std::make_unique<rk_oracle>();
    handle->backend = std::make_unique<KbOracle>(kb->kb, rules->rules);
    *out = handle.release();
  });
}

rk_status rk_oracle_from_callbacks(const rk_oracle_callbacks* callbacks, rk_oracle** out) {
  if (rk_status s = require(callbacks != nullptr, "callbacks")) return s;
  if (rk_status s = require(out != nullptr, "out")) return s;
  return guarded([&] {
    auto handle = std::make_unique<rk_oracle>();
    handle->backend = std::make_unique<CallbackOracle>(*callbacks);
    *out = handle.release();
  });
}

void rk_oracle_free(rk_oracle* oracle) { delete oracle; }

/* ---------- augmentation ---------- */

void rk_augment_options_init(rk_augment_options* opts) {
  if (opts == nullptr) return;
  const AugmentOptions d;
  opts->delta = d.delta;
  opts->theta = d.theta;
  opts->fixpoint = d.fixpoint ? 1 : 0;
  opts->max_rounds = d.max_rounds;
}

rk_status rk_augment(const rk_kb* kb, const rk_rules* rules, const rk_edits* edits,
                     const rk_oracle* oracle, const rk_augment_options* opts,
                     rk_edits** out, rk_augment_stats* stats) {
  if (rk_status s = require(kb != nullptr, "kb")) return s;
  if (rk_status s = require(rules != nullptr, "rules")) return s;
  if (rk_status s = require(edits != nullptr, "edits")) return s;
  if (rk_status s = require(out != nullptr, "out")) return s;
  return guarded([&] {
    HashedNgramEncoder encoder;
    const KbOracle fallback(kb->kb, rules->rules);
    const KnowledgeOracle& backend =
        oracle != nullptr ? *oracle->backend : static_cast<const KnowledgeOracle&>(fallback);
    AugmentResult result = augment(edits->edits, rules->rules, backend, encoder,
                                   kb->kb.aliases(), to_augment_options(opts));
    auto handle = std::make_unique<rk_edits>();
    handle->edits = result.memory.edits();
    if (stats != nullptr) {
      stats->originals = result.stats.originals;
      stats->derived = result.stats.derived;
      stats->growth_ratio = result.stats.growth_ratio;
      stats->oracle_misses = result.stats.oracle_misses;
      stats->ambiguous_inverses = result.stats.ambiguous_inverses;
      stats->empties = result.stats.empties;
      stats->conflicts = result.stats.conflicts;
      stats->rounds = result.stats.rounds;
    }
    *out = handle.release();
  });
}

/* ---------- benchmark ---------- */

rk_status rk_templates_load(const char* path, rk_templates** out) {
  if (rk_status s = require(path != nullptr, "path")) return s;
  if (rk_status s = require(out != nullptr, "out")) return s;
  return guarded([&] {
    auto handle = std::make_unique<rk_templates>();
    handle->table = load_relation_templates(path);
    *out = handle.release();
  });
}

void rk_templates_free(rk_templates* templates) { delete templates; }

void rk_generation_options_init(rk_generation_options* opts) {
  if (opts == nullptr) return;
  const GenerationOptions d;
  opts->seed = d.seed;
  opts->max_hops = d.max_hops;
  opts->allow_ambiguous = d.allow_ambiguous ? 1 : 0;
  opts->delta = d.delta;
  opts->theta = d.theta;
  opts->attempts_per_instance = d.attempts_per_instance;
}

rk_status rk_dataset_generate(const rk_kb* kb, const rk_rules* rules,
                              const rk_templates* templates, size_t no_edit, size_t left_edit,
                              size_t right_edit, size_t both_edit,
                              const rk_generation_options* opts, rk_dataset** out,
                              char** warnings) {
  if (rk_status s = require(kb != nullptr, "kb")) return s;
  if (rk_status s = require(rules != nullptr, "rules")) return s;
  if (rk_status s = require(templates != nullptr, "templates")) return s;
  if (rk_status s = require(out != nullptr, "out")) return s;
  return guarded([&] {
    HashedNgramEncoder encoder;
    Dataset ds = generate_dataset(kb->kb, rules->rules, templates->table,
                                  {no_edit, left_edit, right_edit, both_edit}, encoder,
                                  to_generation_options(opts));
    auto handle = std::make_unique<rk_dataset>();
    handle->instances = std::move(ds.instances);
    if (warnings != nullptr) {
      std::string joined;
      for (const std::string& w : ds.warnings) {
        if (!joined.empty()) joined += '\n';
        joined += w;
      }
      *warnings = copy_string(joined);
    }
    *out = handle.release();
  });
}

rk_status rk_dataset_load(const char* path, rk_dataset** out) {
  if (rk_status s = require(path != nullptr, "path")) return s;
  if (rk_status s = require(out != nullptr, "out")) return s;
  return guarded([&] {
    auto handle = std::make_unique<rk_dataset>();
    handle->instances = load_dataset(path);
    *out = handle.release();
  });
}

rk_status rk_dataset_save(const rk_dataset* dataset, const char* path) {
  if (rk_status s = require(dataset != nullptr, "dataset")) return s;
  if (rk_status s = require(path != nullptr, "path")) return s;
  return guarded([&] { save_dataset(dataset->instances, path); });
}

void rk_dataset_free(rk_dataset* dataset) { delete dataset; }

size_t rk_dataset_count(const rk_dataset* dataset) {
  return dataset == nullptr ? 0 : dataset->instances.size();
}

rk_status rk_dataset_stats_json(const rk_dataset* dataset, char** out) {
  if (rk_status s = require(dataset != nullptr, "dataset")) return s;
  if (rk_status s = require(out != nullptr, "out")) return s;
  return guarded([&] { *out = copy_string(dataset_stats_json(dataset->instances)); });
}

/* ---------- evaluation ---------- */

void rk_experiment_options_init(rk_experiment_options* opts) {
  if (opts == nullptr) return;
  const ExperimentConfig d;
  opts->batch = d.batch;
  opts->delta = d.delta;
  opts->theta = d.theta;
  opts->augmented = d.augmented ? 1 : 0;
  opts->fixpoint = d.fixpoint ? 1 : 0;
  opts->seed = d.seed;
  opts->jobs = d.jobs;
  opts->timings = d.timings ? 1 : 0;
}

rk_status rk_evaluate(const rk_kb* kb, const rk_rules* rules, const rk_dataset* dataset,
                      const rk_experiment_options* opts, char** report_json,
                      char** report_csv) {
  if (rk_status s = require(kb != nullptr, "kb")) return s;
  if (rk_status s = require(rules != nullptr, "rules")) return s;
  if (rk_status s = require(dataset != nullptr, "dataset")) return s;
  return guarded([&] {
    HashedNgramEncoder encoder;
    const ExperimentReport report = run_experiment(dataset->instances, kb->kb, rules->rules,
                                                   encoder, to_experiment_config(opts));
    if (report_json != nullptr) *report_json = copy_string(report_to_json(report));
    if (report_csv != nullptr) *report_csv = copy_string(report_to_csv(report));
  });
}

rk_status rk_sweep(const rk_kb* kb, const rk_rules* rules, const rk_dataset* dataset,
                   const double* deltas, size_t delta_count,
                   const rk_experiment_options* opts, char** csv) {
  if (rk_status s = require(kb != nullptr, "kb")) return s;
  if (rk_status s = require(rules != nullptr, "rules")) return s;
  if (rk_status s = require(dataset != nullptr, "dataset")) return s;
  if (rk_status s = require(deltas != nullptr || delta_count == 0, "deltas")) return s;
  if (rk_status s = require(csv != nullptr, "csv")) return s;
  return guarded([&] {
    HashedNgramEncoder encoder;
    const std::vector<double> ds(deltas, deltas + delta_count);
    const auto rows = sweep_delta(dataset->instances, kb->kb, rules->rules, encoder, ds,
                                  to_experiment_config(opts));
    *csv = copy_string(sweep_to_csv(rows));
  });
}

} /* extern "C" */
