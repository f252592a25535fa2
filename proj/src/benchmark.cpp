#include "benchmark.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "activation.hpp"
#include "eval.hpp"
#include "io.hpp"
#include "json.hpp"

namespace ruleke {

TemplateTable::TemplateTable(std::vector<RelationTemplate> rows) : rows_(std::move(rows)) {
  for (size_t i = 0; i < rows_.size(); ++i) {
    first_row_.emplace(rows_[i].relation, i);
    rows_of_[rows_[i].relation].push_back(i);
  }
}

std::vector<Relation> TemplateTable::relations() const {
  std::vector<Relation> out;
  std::set<Relation> seen;
  for (const RelationTemplate& row : rows_)
    if (seen.insert(row.relation).second) out.push_back(row.relation);
  return out;
}

const RelationTemplate& TemplateTable::primary(const Relation& r) const {
  auto it = first_row_.find(r);
  if (it == first_row_.end())
    throw Error(ErrorCode::NotFound, "no template for relation '" + r + "'");
  return rows_[it->second];
}

bool TemplateTable::compatible(const Relation& a, const Relation& b) const {
  auto ia = rows_of_.find(a);
  auto ib = rows_of_.find(b);
  if (ia == rows_of_.end() || ib == rows_of_.end()) return false;
  for (size_t ra : ia->second)
    for (size_t rb : ib->second)
      if (rows_[ra].range == rows_[rb].domain) return true;
  return false;
}

std::vector<Relation> TemplateTable::from_domain(const std::string& domain) const {
  std::vector<Relation> out;
  std::set<Relation> seen;
  for (const RelationTemplate& row : rows_)
    if (row.domain == domain && seen.insert(row.relation).second) out.push_back(row.relation);
  return out;
}

std::vector<std::string> TemplateTable::ranges_of(const Relation& r) const {
  std::vector<std::string> out;
  auto it = rows_of_.find(r);
  if (it == rows_of_.end()) return out;
  for (size_t i : it->second) out.push_back(rows_[i].range);
  return out;
}

TemplateTable load_relation_templates(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<RelationTemplate> rows;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (is_comment_or_blank(lines[i])) continue;
    const std::string where = path + ":" + std::to_string(i + 1);
    const auto fields = split_tabs(lines[i]);
    if (fields.size() != 5) {
      throw Error(ErrorCode::Parse, where + ": expected 5 tab-separated fields, got " +
                                        std::to_string(fields.size()));
    }
    RelationTemplate row;
    row.relation = normalize_relation(fields[0]);
    row.domain = trim(fields[1]);
    row.range = trim(fields[2]);
    row.wh = trim(fields[3]);
    row.phrase = trim(fields[4]);
    if (row.relation.empty() || row.domain.empty() || row.range.empty() || row.wh.empty() ||
        row.phrase.empty()) {
      throw Error(ErrorCode::Parse, where + ": empty field");
    }
    if (row.phrase.find("[S]") == std::string::npos)
      throw Error(ErrorCode::Parse, where + ": phrase lacks the [S] slot");
    rows.push_back(std::move(row));
  }
  return TemplateTable(std::move(rows));
}

namespace {

// Emits the current prefix, then every typed extension of it, so the output
// is ordered lexicographically by relation sequence.
void grow_templates(const TemplateTable& table, const std::vector<Relation>& rels,
                    size_t max_hops, PathTemplate& cur, std::vector<PathTemplate>& out) {
  out.push_back(cur);
  if (cur.relations.size() == max_hops) return;
  for (const Relation& r : rels) {
    for (const RelationTemplate& row : table.rows()) {
      if (row.relation != r || row.domain != cur.categories.back()) continue;
      cur.relations.push_back(r);
      cur.categories.push_back(row.range);
      grow_templates(table, rels, max_hops, cur, out);
      cur.relations.pop_back();
      cur.categories.pop_back();
    }
  }
}

}  // namespace

std::vector<PathTemplate> enumerate_path_templates(const TemplateTable& table,
                                                   const RuleSet& rules, size_t max_hops) {
  for (const Rule& rule : rules) {
    if (!table.has(rule.head))
      throw Error(ErrorCode::Invalid, "rule head '" + rule.head + "' has no template");
    for (const Relation& b : rule.body)
      if (!table.has(b))
        throw Error(ErrorCode::Invalid, "rule body relation '" + b + "' has no template");
  }
  std::vector<PathTemplate> out;
  if (max_hops == 0) return out;
  std::vector<Relation> rels = table.relations();
  std::sort(rels.begin(), rels.end());
  for (const Relation& r : rels) {
    for (const RelationTemplate& row : table.rows()) {
      if (row.relation != r) continue;
      PathTemplate cur{{r}, {row.domain, row.range}};
      grow_templates(table, rels, max_hops, cur, out);
    }
  }
  return out;
}

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::NoEdit: return "no-edit";
    case Scenario::LeftEdit: return "left-edit";
    case Scenario::RightEdit: return "right-edit";
    case Scenario::BothEdit: return "both-edit";
  }
  return "no-edit";
}

Scenario parse_scenario(const std::string& s) {
  if (s == "no-edit") return Scenario::NoEdit;
  if (s == "left-edit") return Scenario::LeftEdit;
  if (s == "right-edit") return Scenario::RightEdit;
  if (s == "both-edit") return Scenario::BothEdit;
  throw Error(ErrorCode::Parse, "unknown scenario '" + s + "'");
}

std::optional<std::vector<Fact>> generate_knowledge_path(const KnowledgeBase& kb,
                                                         const std::vector<Relation>& relations,
                                                         const EntityId& start, Rng& rng) {
  std::vector<Fact> out;
  out.reserve(relations.size());
  EntityId cur = start;
  for (const Relation& r : relations) {
    const auto objs = kb.lookup_objects(cur, r);
    if (objs.empty()) return std::nullopt;
    EntityId obj;
    if (objs.size() == 1) {
      obj = *objs.begin();  // no randomness spent on forced hops
    } else {
      std::vector<EntityId> v(objs.begin(), objs.end());
      obj = rng.pick(v);
    }
    out.push_back({r, cur, obj});
    cur = obj;
  }
  return out;
}

namespace {

bool alias_overlap(const AliasTable& aliases, const EntityId& a, const EntityId& b) {
  if (a == b) return true;
  const auto ea = aliases.expand(a);
  const auto eb = aliases.expand(b);
  for (const std::string& s : ea)
    if (eb.count(s)) return true;
  return false;
}

}  // namespace

std::optional<CounterfactualResult> inject_counterfactual(const KnowledgeBase& kb,
                                                          const std::vector<Fact>& path,
                                                          const std::set<size_t>& positions,
                                                          Rng& rng) {
  for (size_t p : positions)
    if (p >= path.size())
      throw Error(ErrorCode::Invalid,
                  "counterfactual position " + std::to_string(p) + " outside the path");
  CounterfactualResult result;
  result.edited_path.reserve(path.size());
  EntityId cur = path.empty() ? EntityId{} : path.front().subject;
  for (size_t i = 0; i < path.size(); ++i) {
    const Relation& r = path[i].relation;
    // What is true at this hop now. An untouched prefix keeps the original
    // resolution; re-chained positions resolve afresh from the fact store.
    std::optional<EntityId> truth;
    if (cur == path[i].subject) {
      truth = path[i].object;
    } else {
      const auto objs = kb.lookup_objects(cur, r);
      if (objs.size() == 1) {
        truth = *objs.begin();
      } else if (objs.size() > 1) {
        std::vector<EntityId> v(objs.begin(), objs.end());
        truth = rng.pick(v);
      }
    }
    if (positions.count(i)) {
      const auto current = kb.lookup_objects(cur, r);
      std::vector<EntityId> cands;
      for (const EntityId& o : kb.objects_of(r)) {
        bool banned = false;
        for (const EntityId& c : current)
          if (alias_overlap(kb.aliases(), o, c)) {
            banned = true;
            break;
          }
        if (!banned) cands.push_back(o);
      }
      if (cands.empty()) return std::nullopt;
      const EntityId novel = cands.size() == 1 ? cands.front() : rng.pick(cands);
      result.edits.push_back({r, cur, truth, novel});
      result.edited_path.push_back({r, cur, novel});
      cur = novel;
    } else {
      if (!truth) return std::nullopt;  // downstream hop dried up
      result.edited_path.push_back({r, cur, *truth});
      cur = *truth;
    }
  }
  return result;
}

std::optional<Composition> compose_with_rule(const std::vector<Relation>& fine,
                                             const RuleSet& rules) {
  for (size_t off = 0; off < fine.size(); ++off) {
    for (const Rule& rule : rules) {
      const size_t n = rule.body.size();
      if (n == 0 || off + n > fine.size()) continue;
      if (!std::equal(rule.body.begin(), rule.body.end(), fine.begin() + off)) continue;
      Composition c;
      c.coarse.assign(fine.begin(), fine.begin() + off);
      c.coarse.push_back(rule.head);
      c.coarse.insert(c.coarse.end(), fine.begin() + off + n, fine.end());
      c.rule = rule;
      c.offset = off;
      return c;
    }
  }
  return std::nullopt;
}

namespace {

struct GenContext {
  const KnowledgeBase& kb;
  const RuleSet& rules;
  const TemplateTable& table;
  const Encoder& enc;
  const GenerationOptions& opts;
  KbOracle oracle;
  Rng rng;
};

// Exactly one direct object whose closure answer agrees: the hop survives
// solving through the oracle unchanged.
std::optional<EntityId> unique_hop(const GenContext& g, const EntityId& cur, const Relation& r) {
  const auto objs = g.kb.lookup_objects(cur, r);
  if (objs.size() != 1) return std::nullopt;
  const auto closed = g.oracle.query_object(cur, r);
  if (!closed || *closed != *objs.begin()) return std::nullopt;
  return *objs.begin();
}

// Entity chain start, ... over rels, every hop unique. Position i holds the
// entity reached after i hops.
std::optional<std::vector<EntityId>> unique_walk(const GenContext& g, const EntityId& start,
                                                 const std::vector<Relation>& rels) {
  std::vector<EntityId> chain{start};
  for (const Relation& r : rels) {
    const auto nxt = unique_hop(g, chain.back(), r);
    if (!nxt) return std::nullopt;
    chain.push_back(*nxt);
  }
  return chain;
}

std::optional<EntityId> closure_walk(const GenContext& g, const EntityId& start,
                                     const std::vector<Relation>& rels) {
  EntityId cur = start;
  for (const Relation& r : rels) {
    const auto nxt = g.oracle.query_object(cur, r);
    if (!nxt) return std::nullopt;
    cur = *nxt;
  }
  return cur;
}

// Type-chained continuation after the rule head, drawn among relations that
// actually resolve from `from` in the unedited world so the truth walk never
// dies on a blind draw. nullopt when the chain dead-ends early.
std::optional<std::vector<Relation>> draw_posts(GenContext& g, const Relation& head,
                                                const EntityId& from, size_t count) {
  const auto ranges = g.table.ranges_of(head);
  if (ranges.empty()) return count == 0 ? std::make_optional(std::vector<Relation>{})
                                        : std::nullopt;
  std::string cat = ranges.front();
  EntityId cur = from;
  std::vector<Relation> posts;
  for (size_t i = 0; i < count; ++i) {
    std::vector<Relation> walkable;
    for (const Relation& r : g.table.from_domain(cat)) {
      if (unique_hop(g, cur, r)) walkable.push_back(r);
    }
    if (walkable.empty()) return std::nullopt;
    const Relation p = g.rng.pick(walkable);
    posts.push_back(p);
    cur = *unique_hop(g, cur, p);
    for (const RelationTemplate& row : g.table.rows()) {
      if (row.relation == p && row.domain == cat) {
        cat = row.range;
        break;
      }
    }
  }
  return posts;
}

// Fresh object for (subject, r): uniform over the relation's range minus
// everything currently true there and anything in `banned`, alias-aware.
std::optional<EntityId> draw_novel_object(GenContext& g, const EntityId& subject,
                                          const Relation& r,
                                          const std::vector<EntityId>& banned) {
  const auto current = g.kb.lookup_objects(subject, r);
  std::vector<EntityId> cands;
  for (const EntityId& o : g.kb.objects_of(r)) {
    bool bad = false;
    for (const EntityId& c : current)
      if (alias_overlap(g.kb.aliases(), o, c)) {
        bad = true;
        break;
      }
    for (size_t i = 0; !bad && i < banned.size(); ++i)
      if (alias_overlap(g.kb.aliases(), o, banned[i])) bad = true;
    if (!bad) cands.push_back(o);
  }
  if (cands.empty()) return std::nullopt;
  return g.rng.pick(cands);
}

bool all_distinct(const AliasTable& aliases, const std::vector<EntityId>& xs) {
  for (size_t i = 0; i < xs.size(); ++i)
    for (size_t j = i + 1; j < xs.size(); ++j)
      if (alias_overlap(aliases, xs[i], xs[j])) return false;
  return true;
}

std::string render_question(const TemplateTable& table, const std::vector<Relation>& path,
                            const EntityId& start) {
  std::string acc = start;
  for (const Relation& r : path) {
    std::string phrase = table.primary(r).phrase;
    phrase.replace(phrase.find("[S]"), 3, acc);
    acc = std::move(phrase);
  }
  return table.primary(path.back()).wh + " is " + acc + "?";
}

// One full attempt at an instance. Every returned draft has already passed
// the structural gates; the caller still runs end-to-end certification.
std::optional<BenchmarkInstance> attempt_instance(GenContext& g, Scenario sc, size_t hops,
                                                  const std::vector<Rule>& certified) {
  const Rule& rule = certified[g.rng.below(certified.size())];
  const size_t nb = rule.body.size();
  if (sc == Scenario::BothEdit && nb != 2) return std::nullopt;

  const auto& starts = g.kb.subjects_of(rule.body.front());
  if (starts.empty()) return std::nullopt;
  const EntityId z0 = starts[g.rng.below(starts.size())];

  const auto t_body = unique_walk(g, z0, rule.body);
  if (!t_body) return std::nullopt;
  const auto posts_opt = draw_posts(g, rule.head, t_body->back(), hops - 1);
  if (!posts_opt) return std::nullopt;
  const std::vector<Relation>& posts = *posts_opt;

  std::vector<Relation> fine = rule.body;
  fine.insert(fine.end(), posts.begin(), posts.end());
  std::vector<Relation> coarse{rule.head};
  coarse.insert(coarse.end(), posts.begin(), posts.end());

  // The unedited world must resolve the whole fine path uniquely and agree
  // with the coarse closure walk, so the stale answer is the true one.
  const auto truth = unique_walk(g, z0, fine);
  if (!truth) return std::nullopt;
  const std::vector<EntityId>& t = *truth;
  const auto stale = closure_walk(g, z0, coarse);
  if (!stale || !alias_overlap(g.kb.aliases(), *stale, t.back())) return std::nullopt;

  BenchmarkInstance inst;
  inst.scenario = sc;
  inst.start = z0;
  inst.question_path = coarse;
  inst.fine_path = fine;
  inst.rule = rule;
  inst.hops = coarse.size();

  std::vector<EntityId> chain;  // the gold derivation chain, for distinctness
  switch (sc) {
    case Scenario::NoEdit: {
      chain = t;
      break;
    }
    case Scenario::LeftEdit: {
      const auto o1p = draw_novel_object(g, z0, rule.body.front(), {});
      if (!o1p) return std::nullopt;
      std::vector<Relation> rest(fine.begin() + 1, fine.end());
      const auto gw = unique_walk(g, *o1p, rest);
      if (!gw) return std::nullopt;
      chain.push_back(z0);
      chain.insert(chain.end(), gw->begin(), gw->end());
      inst.edits.push_back({rule.body.front(), z0, t[1], *o1p});
      break;
    }
    case Scenario::RightEdit: {
      // Recovering z0 walks body inverses back from the edit; each step must
      // be unique, except the first when ambiguity is the point.
      for (size_t j = nb - 1; j >= 1; --j) {
        const auto subs = g.oracle.query_subjects(rule.body[j - 1], t[j]);
        const bool want_ambiguous = g.opts.allow_ambiguous && j == nb - 1;
        if (want_ambiguous) {
          if (subs.size() < 2) return std::nullopt;
        } else if (subs.size() != 1) {
          return std::nullopt;
        }
        bool holds_true_subject = false;
        for (const EntityId& s : subs)
          if (alias_overlap(g.kb.aliases(), s, t[j - 1])) holds_true_subject = true;
        if (!holds_true_subject) return std::nullopt;
      }
      const auto o2p = draw_novel_object(g, t[nb - 1], rule.body.back(), {});
      if (!o2p) return std::nullopt;
      const auto gw = unique_walk(g, *o2p, posts);
      if (!gw) return std::nullopt;
      chain.assign(t.begin(), t.begin() + nb);
      chain.insert(chain.end(), gw->begin(), gw->end());
      inst.edits.push_back({rule.body.back(), t[nb - 1], t[nb], *o2p});
      break;
    }
    case Scenario::BothEdit: {
      const auto o1p = draw_novel_object(g, z0, rule.body.front(), {});
      if (!o1p) return std::nullopt;
      // The second edit must introduce its fact, not overwrite one.
      if (g.oracle.query_object(*o1p, rule.body.back())) return std::nullopt;
      const auto o2p = draw_novel_object(g, *o1p, rule.body.back(), {z0, *o1p});
      if (!o2p) return std::nullopt;
      const auto gw = unique_walk(g, *o2p, posts);
      if (!gw) return std::nullopt;
      chain.push_back(z0);
      chain.push_back(*o1p);
      chain.insert(chain.end(), gw->begin(), gw->end());
      inst.edits.push_back({rule.body.front(), z0, t[1], *o1p});
      inst.edits.push_back({rule.body.back(), *o1p, std::nullopt, *o2p});
      break;
    }
  }

  if (!all_distinct(g.kb.aliases(), chain)) return std::nullopt;
  const EntityId& gold = chain.back();
  if (sc != Scenario::NoEdit && alias_overlap(g.kb.aliases(), *stale, gold)) return std::nullopt;

  inst.gold_answer = gold;
  for (const std::string& a : g.kb.alias_expand(gold))
    if (a != gold) inst.gold_aliases.insert(a);
  inst.rendered_question = render_question(g.table, coarse, z0);
  return inst;
}

// Baseline retrieval must miss (or hit, for no-edit) and the augmented run
// must land on gold; ambiguous right edits must trip the guard instead.
bool certify_instance(GenContext& g, const BenchmarkInstance& inst) {
  const bool ambiguous_right =
      g.opts.allow_ambiguous && inst.scenario == Scenario::RightEdit;
  const auto correct = [&](const Prediction& p) {
    return p.answer && (*p.answer == inst.gold_answer || inst.gold_aliases.count(*p.answer) > 0);
  };

  EditMemory baseline(g.kb.aliases(), g.enc);
  for (const Edit& e : inst.edits) baseline.insert(e);
  baseline.freeze();
  const bool base_ok = correct(solve(inst, baseline, g.oracle, g.opts.theta));
  if (inst.scenario == Scenario::NoEdit ? !base_ok : base_ok) return false;

  AugmentOptions ao;
  ao.delta = g.opts.delta;
  ao.theta = g.opts.theta;
  AugmentResult aug = augment(inst.edits, g.rules, g.oracle, g.enc, g.kb.aliases(), ao);
  aug.memory.freeze();
  const bool aug_ok = correct(solve(inst, aug.memory, g.oracle, g.opts.theta));
  if (ambiguous_right) return aug.stats.ambiguous_inverses > 0 && !aug_ok;
  return aug_ok;
}

std::string instance_id(size_t n) {
  std::ostringstream s;
  s << 'q' << std::setfill('0') << std::setw(4) << n;
  return s.str();
}

}  // namespace

Dataset generate_dataset(const KnowledgeBase& kb, const RuleSet& rules,
                         const TemplateTable& table, const ScenarioCounts& counts,
                         const Encoder& encoder, const GenerationOptions& opts) {
  if (opts.max_hops < 2) throw Error(ErrorCode::Invalid, "max_hops must be at least 2");
  Dataset ds;
  if (counts.total() == 0) return ds;

  MemoEncoder memo(encoder);
  GenContext g{kb, rules, table, memo, opts, KbOracle(kb, rules), Rng(opts.seed)};

  // A rule qualifies when an edit on any body atom activates it at that very
  // position, and no body atom would be mistaken for the head at retrieval.
  std::vector<Rule> certified;
  for (const Rule& rule : rules) {
    if (rule.body.size() < 2 || !table.has(rule.head)) continue;
    bool ok = true;
    const auto head_vec = memo.encode(rule.head);
    for (size_t i = 0; ok && i < rule.body.size(); ++i) {
      if (!table.has(rule.body[i])) ok = false;
      if (ok && cosine(memo.encode(rule.body[i]), head_vec) > opts.theta) ok = false;
      if (ok) {
        const auto act = is_activated(rule.body[i], rule, memo, opts.delta);
        if (!act || act->position != i + 1) ok = false;
      }
    }
    if (ok) certified.push_back(rule);
  }
  if (certified.empty()) {
    ds.warnings.push_back("no rule qualifies for generation at delta=" +
                          format_double(opts.delta) + " theta=" + format_double(opts.theta));
    return ds;
  }

  const size_t hop_span = opts.max_hops - 1;
  const auto emit_block = [&](Scenario sc, size_t want) {
    for (size_t slot = 0; slot < want; ++slot) {
      const size_t hops = 2 + slot % hop_span;
      bool done = false;
      for (size_t tr = 0; tr < opts.attempts_per_instance && !done; ++tr) {
        auto inst = attempt_instance(g, sc, hops, certified);
        if (!inst || !certify_instance(g, *inst)) continue;
        inst->id = instance_id(ds.instances.size() + 1);
        ds.instances.push_back(std::move(*inst));
        done = true;
      }
      if (!done) {
        ds.warnings.push_back(std::string(to_string(sc)) + " at " + std::to_string(hops) +
                              " hops: attempt budget exhausted");
      }
    }
  };
  emit_block(Scenario::NoEdit, counts.no_edit);
  emit_block(Scenario::LeftEdit, counts.left_edit);
  emit_block(Scenario::RightEdit, counts.right_edit);
  emit_block(Scenario::BothEdit, counts.both_edit);
  return ds;
}

std::map<Scenario, std::map<size_t, size_t>> dataset_stats(
    const std::vector<BenchmarkInstance>& instances) {
  std::map<Scenario, std::map<size_t, size_t>> out;
  for (const BenchmarkInstance& inst : instances) ++out[inst.scenario][inst.hops];
  return out;
}

std::string dataset_stats_json(const std::vector<BenchmarkInstance>& instances) {
  nlohmann::json j;
  j["total"] = instances.size();
  nlohmann::json scenarios = nlohmann::json::object();
  for (const auto& [sc, hops] : dataset_stats(instances)) {
    nlohmann::json one = nlohmann::json::object();
    for (const auto& [h, c] : hops) one[std::to_string(h)] = c;
    scenarios[to_string(sc)] = one;
  }
  j["scenarios"] = scenarios;
  return j.dump(2) + "\n";
}

void save_dataset(const std::vector<BenchmarkInstance>& instances, const std::string& path) {
  std::ostringstream out;
  for (const BenchmarkInstance& inst : instances) {
    nlohmann::json j;
    j["id"] = inst.id;
    j["scenario"] = to_string(inst.scenario);
    j["start"] = inst.start;
    j["question_path"] = inst.question_path;
    j["fine_path"] = inst.fine_path;
    j["rule"] = render_rule(inst.rule);
    nlohmann::json edits = nlohmann::json::array();
    for (const Edit& e : inst.edits) edits.push_back(nlohmann::json::parse(edit_to_json(e)));
    j["edits"] = edits;
    j["gold_answer"] = inst.gold_answer;
    j["gold_aliases"] = inst.gold_aliases;
    j["hops"] = inst.hops;
    j["question"] = inst.rendered_question;
    out << j.dump() << '\n';
  }
  write_file(path, out.str());
}

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* name, const std::string& where) {
  auto it = j.find(name);
  if (it == j.end()) throw Error(ErrorCode::Parse, where + ": missing field '" + name + "'");
  return *it;
}

std::string string_field(const nlohmann::json& j, const char* name, const std::string& where) {
  const nlohmann::json& v = field(j, name, where);
  if (!v.is_string() || v.get<std::string>().empty())
    throw Error(ErrorCode::Parse, where + ": field '" + name + "' must be a non-empty string");
  return v.get<std::string>();
}

std::vector<Relation> relation_list(const nlohmann::json& j, const char* name,
                                    const std::string& where) {
  const nlohmann::json& v = field(j, name, where);
  if (!v.is_array() || v.empty())
    throw Error(ErrorCode::Parse, where + ": field '" + name + "' must be a non-empty array");
  std::vector<Relation> out;
  for (const nlohmann::json& x : v) {
    if (!x.is_string())
      throw Error(ErrorCode::Parse, where + ": field '" + name + "' holds a non-string");
    const Relation r = normalize_relation(x.get<std::string>());
    if (r.empty()) throw Error(ErrorCode::Parse, where + ": empty relation in '" + name + "'");
    out.push_back(r);
  }
  return out;
}

}  // namespace

std::vector<BenchmarkInstance> load_dataset(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<BenchmarkInstance> out;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (is_comment_or_blank(lines[i])) continue;
    const std::string where = path + ":" + std::to_string(i + 1);
    nlohmann::json j = nlohmann::json::parse(lines[i], nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw Error(ErrorCode::Parse, where + ": malformed JSON object");

    BenchmarkInstance inst;
    inst.id = string_field(j, "id", where);
    inst.scenario = parse_scenario(string_field(j, "scenario", where));
    inst.start = normalize_entity(string_field(j, "start", where));
    inst.question_path = relation_list(j, "question_path", where);
    inst.fine_path = relation_list(j, "fine_path", where);
    inst.rule = parse_rule(string_field(j, "rule", where));

    const nlohmann::json& edits = field(j, "edits", where);
    if (!edits.is_array())
      throw Error(ErrorCode::Parse, where + ": field 'edits' must be an array");
    for (const nlohmann::json& e : edits) inst.edits.push_back(edit_from_line(e.dump(), where));

    inst.gold_answer = normalize_entity(string_field(j, "gold_answer", where));
    const nlohmann::json& aliases = field(j, "gold_aliases", where);
    if (!aliases.is_array())
      throw Error(ErrorCode::Parse, where + ": field 'gold_aliases' must be an array");
    for (const nlohmann::json& a : aliases) {
      if (!a.is_string())
        throw Error(ErrorCode::Parse, where + ": field 'gold_aliases' holds a non-string");
      inst.gold_aliases.insert(normalize_entity(a.get<std::string>()));
    }

    const nlohmann::json& hops = field(j, "hops", where);
    if (!hops.is_number_unsigned())
      throw Error(ErrorCode::Parse, where + ": field 'hops' must be a non-negative integer");
    inst.hops = hops.get<size_t>();
    if (inst.hops != inst.question_path.size())
      throw Error(ErrorCode::Parse, where + ": hops disagrees with question_path");

    const nlohmann::json& q = field(j, "question", where);
    if (!q.is_string()) throw Error(ErrorCode::Parse, where + ": field 'question' must be a string");
    inst.rendered_question = q.get<std::string>();

    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace ruleke
