#include "kg.hpp"

#include <algorithm>
#include <sstream>

#include "io.hpp"
#include "rules.hpp"

namespace ruleke {

void AliasTable::add(const EntityId& canonical, const std::vector<std::string>& aliases) {
  const EntityId canon = normalize_entity(canonical);
  if (canon.empty()) throw Error(ErrorCode::Invalid, "empty canonical id");

  std::vector<std::string> members{canon};
  for (const auto& a : aliases) {
    const std::string alias = normalize_entity(a);
    if (alias.empty()) throw Error(ErrorCode::Invalid, "empty alias for '" + canon + "'");
    members.push_back(alias);
  }
  for (const auto& m : members) {
    auto it = owner_.find(m);
    if (it != owner_.end() && it->second != canon) {
      throw Error(ErrorCode::Conflict,
                  "alias '" + m + "' claimed by both '" + it->second + "' and '" + canon + "'");
    }
  }
  auto& set = sets_[canon];
  for (const auto& m : members) {
    set.insert(m);
    owner_.emplace(m, canon);
  }
}

std::set<std::string> AliasTable::expand(const std::string& s) const {
  auto it = owner_.find(s);
  if (it == owner_.end()) return {s};
  return sets_.at(it->second);
}

std::optional<EntityId> AliasTable::canonical_of(const std::string& s) const {
  auto it = owner_.find(s);
  if (it == owner_.end()) return std::nullopt;
  return it->second;
}

KnowledgeBase::KnowledgeBase(std::vector<Fact> facts, AliasTable aliases)
    : aliases_(std::move(aliases)) {
  for (auto& f : facts) {
    if (f.subject.empty() || f.relation.empty() || f.object.empty()) {
      throw Error(ErrorCode::Invalid, "fact with empty field");
    }
    facts_.insert(std::move(f));
  }
  for (const auto& f : facts_) {
    entities_.insert(f.subject);
    entities_.insert(f.object);
    index_sr_[{f.subject, f.relation}].insert(f.object);
    index_ro_[{f.relation, f.object}].insert(f.subject);
    by_relation_[f.relation].push_back(f);
  }
  for (const auto& [rel, rel_facts] : by_relation_) {
    std::set<EntityId> objs, subs;
    for (const auto& f : rel_facts) {
      objs.insert(f.object);
      subs.insert(f.subject);
    }
    objects_of_[rel].assign(objs.begin(), objs.end());
    subjects_of_[rel].assign(subs.begin(), subs.end());
  }
}

std::vector<Relation> KnowledgeBase::relations() const {
  std::vector<Relation> out;
  out.reserve(by_relation_.size());
  for (const auto& [rel, _] : by_relation_) out.push_back(rel);
  return out;
}

const std::vector<Fact>& KnowledgeBase::facts_for(const Relation& r) const {
  static const std::vector<Fact> kEmpty;
  auto it = by_relation_.find(r);
  return it == by_relation_.end() ? kEmpty : it->second;
}

const std::vector<EntityId>& KnowledgeBase::objects_of(const Relation& r) const {
  static const std::vector<EntityId> kEmpty;
  auto it = objects_of_.find(r);
  return it == objects_of_.end() ? kEmpty : it->second;
}

const std::vector<EntityId>& KnowledgeBase::subjects_of(const Relation& r) const {
  static const std::vector<EntityId> kEmpty;
  auto it = subjects_of_.find(r);
  return it == subjects_of_.end() ? kEmpty : it->second;
}

std::set<EntityId> KnowledgeBase::lookup_objects(const EntityId& subject,
                                                 const Relation& r) const {
  auto it = index_sr_.find({subject, r});
  if (it == index_sr_.end()) return {};
  return it->second;
}

std::set<EntityId> KnowledgeBase::lookup_subjects(const Relation& r,
                                                  const EntityId& object) const {
  auto it = index_ro_.find({r, object});
  if (it == index_ro_.end()) return {};
  return it->second;
}

KnowledgeBase load_knowledge_base(const std::string& triples_path,
                                  const std::string& aliases_path) {
  const auto lines = read_lines(triples_path);
  std::vector<Fact> facts;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (is_comment_or_blank(lines[i])) continue;
    const auto fields = split_tabs(lines[i]);
    if (fields.size() != 3) {
      throw Error(ErrorCode::Parse, triples_path + ":" + std::to_string(i + 1) +
                                        ": expected subject<TAB>relation<TAB>object");
    }
    Fact f{normalize_relation(fields[1]), normalize_entity(fields[0]),
           normalize_entity(fields[2])};
    if (f.subject.empty() || f.relation.empty() || f.object.empty()) {
      throw Error(ErrorCode::Parse,
                  triples_path + ":" + std::to_string(i + 1) + ": empty field");
    }
    facts.push_back(std::move(f));
  }
  AliasTable aliases;
  if (!aliases_path.empty()) aliases = load_alias_table(aliases_path);
  return KnowledgeBase(std::move(facts), std::move(aliases));
}

AliasTable load_alias_table(const std::string& path) {
  const auto lines = read_lines(path);
  AliasTable table;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (is_comment_or_blank(lines[i])) continue;
    auto fields = split_tabs(lines[i]);
    if (fields.empty() || trim(fields[0]).empty()) {
      throw Error(ErrorCode::Parse, path + ":" + std::to_string(i + 1) + ": empty canonical id");
    }
    try {
      table.add(fields[0], {fields.begin() + 1, fields.end()});
    } catch (const Error& e) {
      throw Error(e.code(), path + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return table;
}

void save_knowledge_base(const KnowledgeBase& kb, const std::string& path) {
  std::ostringstream out;
  for (const auto& f : kb.facts()) {
    out << f.subject << '\t' << f.relation << '\t' << f.object << '\n';
  }
  write_file(path, out.str());
}

namespace {

// Forward chain of body relations starting from `frontier`.
std::set<EntityId> walk_forward(const KnowledgeBase& kb, const std::vector<Relation>& body,
                                std::set<EntityId> frontier) {
  for (const auto& rel : body) {
    std::set<EntityId> next;
    for (const auto& e : frontier) {
      auto objs = kb.lookup_objects(e, rel);
      next.insert(objs.begin(), objs.end());
    }
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  return frontier;
}

std::set<EntityId> walk_backward(const KnowledgeBase& kb, const std::vector<Relation>& body,
                                 std::set<EntityId> frontier) {
  for (auto it = body.rbegin(); it != body.rend(); ++it) {
    std::set<EntityId> prev;
    for (const auto& e : frontier) {
      auto subs = kb.lookup_subjects(*it, e);
      prev.insert(subs.begin(), subs.end());
    }
    frontier = std::move(prev);
    if (frontier.empty()) break;
  }
  return frontier;
}

}  // namespace

std::set<EntityId> derive_by_rules(const KnowledgeBase& kb, const RuleSet& rules,
                                   const EntityId& subject, const Relation& head) {
  std::set<EntityId> out = kb.lookup_objects(subject, head);
  for (const auto& rule : rules) {
    if (rule.head != head) continue;
    auto reached = walk_forward(kb, rule.body, {subject});
    out.insert(reached.begin(), reached.end());
  }
  return out;
}

std::set<EntityId> derive_subjects_by_rules(const KnowledgeBase& kb, const RuleSet& rules,
                                            const Relation& head, const EntityId& object) {
  std::set<EntityId> out = kb.lookup_subjects(head, object);
  for (const auto& rule : rules) {
    if (rule.head != head) continue;
    auto reached = walk_backward(kb, rule.body, {object});
    out.insert(reached.begin(), reached.end());
  }
  return out;
}

}  // namespace ruleke
