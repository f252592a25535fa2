#include "miner.hpp"

#include <algorithm>
#include <map>
#include <thread>
#include <tuple>

namespace ruleke {

namespace {

struct Candidate {
  double confidence;
  Relation head;
  Relation b1, b2;
};

// Sort key: confidence descending, then names ascending.
bool candidate_less(const Candidate& a, const Candidate& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  return std::tie(a.head, a.b1, a.b2) < std::tie(b.head, b.b1, b.b2);
}

// Relations holding between (subject, object), for closing body groundings
// into heads without scanning the relation list per grounding.
std::map<std::pair<EntityId, EntityId>, std::vector<Relation>> pair_index(
    const KnowledgeBase& kb) {
  std::map<std::pair<EntityId, EntityId>, std::vector<Relation>> index;
  for (const auto& f : kb.facts()) index[{f.subject, f.object}].push_back(f.relation);
  return index;
}

void mine_partition(const KnowledgeBase& kb, const std::vector<Relation>& relations,
                    size_t begin, size_t end,
                    const std::map<std::pair<EntityId, EntityId>, std::vector<Relation>>& pairs,
                    size_t min_support_count, double min_confidence,
                    std::vector<Candidate>& out) {
  for (size_t i = begin; i < end; ++i) {
    const Relation& r1 = relations[i];
    for (const auto& r2 : relations) {
      size_t body_count = 0;
      std::map<Relation, size_t> support;
      // Join on the shared variable: b is r1's object and r2's subject.
      for (const auto& f1 : kb.facts_for(r1)) {
        for (const auto& c : kb.lookup_objects(f1.object, r2)) {
          ++body_count;
          auto it = pairs.find({f1.subject, c});
          if (it == pairs.end()) continue;
          for (const auto& r3 : it->second) ++support[r3];
        }
      }
      if (body_count == 0) continue;
      for (const auto& [r3, count] : support) {
        if (count < min_support_count) continue;
        const double confidence =
            static_cast<double>(count) / static_cast<double>(body_count);
        if (confidence < min_confidence) continue;
        out.push_back({confidence, r3, r1, r2});
      }
    }
  }
}

}  // namespace

RuleSet mine_rules(const KnowledgeBase& kb, size_t min_support_count, double min_confidence,
                   unsigned jobs) {
  if (min_support_count < 1) throw Error(ErrorCode::Invalid, "min_support_count must be >= 1");
  const auto relations = kb.relations();
  const auto pairs = pair_index(kb);

  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, std::max<size_t>(relations.size(), 1));

  std::vector<std::vector<Candidate>> partials(jobs);
  if (jobs <= 1) {
    mine_partition(kb, relations, 0, relations.size(), pairs, min_support_count,
                   min_confidence, partials[0]);
  } else {
    std::vector<std::thread> workers;
    const size_t chunk = (relations.size() + jobs - 1) / jobs;
    for (unsigned w = 0; w < jobs; ++w) {
      const size_t begin = std::min(relations.size(), w * chunk);
      const size_t end = std::min(relations.size(), begin + chunk);
      workers.emplace_back([&, begin, end, w] {
        mine_partition(kb, relations, begin, end, pairs, min_support_count, min_confidence,
                       partials[w]);
      });
    }
    for (auto& t : workers) t.join();
  }

  std::vector<Candidate> all;
  for (auto& p : partials) all.insert(all.end(), p.begin(), p.end());
  std::sort(all.begin(), all.end(), candidate_less);

  RuleSet out;
  for (const auto& c : all) out.add(Rule{c.head, {c.b1, c.b2}, c.confidence});
  return out;
}

double rule_confidence(const KnowledgeBase& kb, const Rule& rule) {
  if (rule.body.size() != 2) {
    throw Error(ErrorCode::Invalid, "rule_confidence expects a length-2 body");
  }
  size_t body_count = 0;
  size_t support_count = 0;
  for (const auto& f1 : kb.facts_for(rule.body[0])) {
    for (const auto& c : kb.lookup_objects(f1.object, rule.body[1])) {
      ++body_count;
      if (kb.lookup_objects(f1.subject, rule.head).count(c)) ++support_count;
    }
  }
  if (body_count == 0) {
    throw Error(ErrorCode::Invalid, "no body groundings for " + render_rule(rule));
  }
  return static_cast<double>(support_count) / static_cast<double>(body_count);
}

}  // namespace ruleke
