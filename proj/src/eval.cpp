#include "eval.hpp"

#include <atomic>
#include <chrono>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "rng.hpp"

namespace ruleke {

Prediction solve(const BenchmarkInstance& instance, const EditMemory& mem,
                 const KnowledgeOracle& oracle, double theta) {
  Prediction out{instance.id, std::nullopt, {}};
  EntityId cur = instance.start;
  for (const Relation& r : instance.question_path) {
    if (auto hit = mem.retrieve_forward(cur, r, theta)) {
      cur = hit->edit.new_object;
      out.hop_trace.push_back({r, cur, TraceSource::EditMemory});
      continue;
    }
    auto obj = oracle.query_object(cur, r);
    if (!obj) return out;  // dry hop: no answer
    cur = *obj;
    out.hop_trace.push_back({r, cur, TraceSource::Oracle});
  }
  out.answer = cur;
  return out;
}

namespace {

bool prediction_correct(const Prediction& pred, const BenchmarkInstance& gold) {
  if (!pred.answer) return false;
  return *pred.answer == gold.gold_answer || gold.gold_aliases.count(*pred.answer) > 0;
}

// Instances sharing an id are question variants of one underlying case and
// score as a unit: the group is correct when any variant is.
struct Grouped {
  std::vector<size_t> leader;  // first member index, in order of appearance
  std::vector<char> correct;
};

Grouped group_scores(const std::vector<Prediction>& preds,
                     const std::vector<BenchmarkInstance>& golds) {
  if (preds.size() != golds.size())
    throw Error(ErrorCode::Invalid, "prediction count " + std::to_string(preds.size()) +
                                        " does not match instance count " +
                                        std::to_string(golds.size()));
  Grouped g;
  std::map<std::string, size_t> slot;
  for (size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].id != golds[i].id)
      throw Error(ErrorCode::Invalid, "prediction id '" + preds[i].id +
                                          "' does not match instance id '" + golds[i].id + "'");
    auto [it, fresh] = slot.emplace(golds[i].id, g.leader.size());
    if (fresh) {
      g.leader.push_back(i);
      g.correct.push_back(0);
    }
    if (prediction_correct(preds[i], golds[i])) g.correct[it->second] = 1;
  }
  return g;
}

double mean_correct(const std::vector<char>& correct) {
  if (correct.empty()) return 0.0;
  size_t hits = 0;
  for (char c : correct) hits += c;
  return static_cast<double>(hits) / static_cast<double>(correct.size());
}

}  // namespace

double multi_hop_accuracy(const std::vector<Prediction>& preds,
                          const std::vector<BenchmarkInstance>& golds) {
  return mean_correct(group_scores(preds, golds).correct);
}

ExperimentReport run_experiment(const std::vector<BenchmarkInstance>& instances,
                                const KnowledgeBase& kb, const RuleSet& rules,
                                const Encoder& encoder, const ExperimentConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.setting = config;
  if (instances.empty()) return report;

  // Stratify by hop count, shuffle within each stratum, then deal strata
  // round-robin so every batch sees a balanced hop mix.
  std::map<size_t, std::vector<size_t>> strata;
  for (size_t i = 0; i < instances.size(); ++i) strata[instances[i].hops].push_back(i);
  Rng rng(config.seed);
  for (auto& [hops, idxs] : strata) rng.shuffle(idxs);
  std::vector<size_t> order;
  order.reserve(instances.size());
  std::map<size_t, size_t> cursor;
  while (order.size() < instances.size()) {
    for (auto& [hops, idxs] : strata) {
      size_t& c = cursor[hops];
      if (c < idxs.size()) order.push_back(idxs[c++]);
    }
  }

  const size_t k = config.batch == 0 ? instances.size() : config.batch;
  std::vector<std::vector<size_t>> batches;
  for (size_t at = 0; at < order.size(); at += k) {
    batches.emplace_back(order.begin() + at,
                         order.begin() + std::min(at + k, order.size()));
  }

  std::vector<Prediction> preds(instances.size());
  std::atomic<size_t> next_batch{0};
  std::mutex tally_mutex;
  size_t total_edits = 0;
  size_t total_memory = 0;

  auto worker = [&] {
    for (;;) {
      const size_t b = next_batch.fetch_add(1);
      if (b >= batches.size()) return;
      const std::vector<size_t>& batch = batches[b];

      std::vector<Edit> edits;
      for (size_t idx : batch)
        for (const Edit& e : instances[idx].edits) edits.push_back(e);

      KbOracle base(kb, rules);
      CountingOracle oracle(base);
      AugmentStats stats;
      EditMemory plain(kb.aliases(), encoder);
      std::optional<AugmentResult> aug;
      const EditMemory* mem = &plain;
      if (config.augmented) {
        AugmentOptions opts;
        opts.delta = config.delta;
        opts.theta = config.theta;
        opts.fixpoint = config.fixpoint;
        aug.emplace(augment(edits, rules, oracle, encoder, kb.aliases(), opts));
        aug->memory.freeze();
        mem = &aug->memory;
        stats = aug->stats;
      } else {
        for (const Edit& e : edits) plain.insert(e);
        plain.freeze();
      }
      for (size_t idx : batch)
        preds[idx] = solve(instances[idx], *mem, oracle, config.theta);

      std::lock_guard<std::mutex> lock(tally_mutex);
      total_edits += edits.size();
      total_memory += mem->size();
      report.oracle_calls += oracle.calls();
      report.oracle_misses += stats.oracle_misses;
      report.ambiguous_inverses += stats.ambiguous_inverses;
      report.conflicts += stats.conflicts;
    }
  };

  const size_t jobs = std::max<size_t>(1, std::min(config.jobs, batches.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  Grouped g = group_scores(preds, instances);
  report.overall_accuracy = mean_correct(g.correct);
  std::map<Scenario, std::pair<size_t, size_t>> by_scenario;  // hits, groups
  std::map<size_t, std::pair<size_t, size_t>> by_hop;
  for (size_t gi = 0; gi < g.leader.size(); ++gi) {
    const BenchmarkInstance& lead = instances[g.leader[gi]];
    auto& s = by_scenario[lead.scenario];
    auto& h = by_hop[lead.hops];
    s.first += g.correct[gi];
    ++s.second;
    h.first += g.correct[gi];
    ++h.second;
  }
  for (const auto& [sc, hg] : by_scenario)
    report.per_scenario[sc] = static_cast<double>(hg.first) / static_cast<double>(hg.second);
  for (const auto& [hops, hg] : by_hop)
    report.per_hop[hops] = static_cast<double>(hg.first) / static_cast<double>(hg.second);

  report.growth_ratio = total_edits == 0
                            ? 1.0
                            : static_cast<double>(total_memory) / static_cast<double>(total_edits);
  if (config.timings) {
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  }
  return report;
}

std::vector<SweepRow> sweep_delta(const std::vector<BenchmarkInstance>& instances,
                                  const KnowledgeBase& kb, const RuleSet& rules,
                                  const Encoder& encoder, const std::vector<double>& deltas,
                                  const ExperimentConfig& config) {
  std::vector<SweepRow> rows;
  for (double delta : deltas) {
    ExperimentConfig c = config;
    c.delta = delta;
    c.augmented = true;
    ExperimentReport r = run_experiment(instances, kb, rules, encoder, c);
    rows.push_back({delta, r.overall_accuracy, r.growth_ratio});
  }
  return rows;
}

std::string report_to_json(const ExperimentReport& report) {
  nlohmann::json j;
  nlohmann::json setting;
  if (report.setting.batch == 0) {
    setting["batch"] = "all";
  } else {
    setting["batch"] = report.setting.batch;
  }
  setting["delta"] = report.setting.delta;
  setting["theta"] = report.setting.theta;
  setting["augmented"] = report.setting.augmented;
  setting["fixpoint"] = report.setting.fixpoint;
  setting["seed"] = report.setting.seed;
  j["setting"] = setting;
  j["overall_accuracy"] = report.overall_accuracy;
  nlohmann::json per_scenario = nlohmann::json::object();
  for (const auto& [sc, acc] : report.per_scenario) per_scenario[to_string(sc)] = acc;
  j["per_scenario"] = per_scenario;
  nlohmann::json per_hop = nlohmann::json::object();
  for (const auto& [hops, acc] : report.per_hop) per_hop[std::to_string(hops)] = acc;
  j["per_hop"] = per_hop;
  j["growth_ratio"] = report.growth_ratio;
  j["oracle_calls"] = report.oracle_calls;
  j["oracle_misses"] = report.oracle_misses;
  j["ambiguous_inverses"] = report.ambiguous_inverses;
  j["conflicts"] = report.conflicts;
  j["wall_time_seconds"] = report.wall_time_seconds;
  return j.dump(2) + "\n";
}

std::string report_to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "batch,delta,theta,augmented,fixpoint,seed,overall_accuracy,growth_ratio,"
         "oracle_calls,oracle_misses,ambiguous_inverses,conflicts,wall_time_seconds\n";
  if (report.setting.batch == 0) {
    out << "all";
  } else {
    out << report.setting.batch;
  }
  out << ',' << format_double(report.setting.delta) << ',' << format_double(report.setting.theta)
      << ',' << (report.setting.augmented ? "true" : "false") << ','
      << (report.setting.fixpoint ? "true" : "false") << ',' << report.setting.seed << ','
      << format_double(report.overall_accuracy) << ',' << format_double(report.growth_ratio) << ','
      << report.oracle_calls << ',' << report.oracle_misses << ',' << report.ambiguous_inverses
      << ',' << report.conflicts << ',' << format_double(report.wall_time_seconds) << '\n';
  return out.str();
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "delta,accuracy,growth_ratio\n";
  for (const SweepRow& row : rows) {
    out << format_double(row.delta) << ',' << format_double(row.accuracy) << ','
        << format_double(row.growth_ratio) << '\n';
  }
  return out.str();
}

}  // namespace ruleke
