#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "types.hpp"

namespace ruleke {

class RuleSet;

// Maps surface forms to canonical entity ids. Every canonical id is a member
// of its own alias set, and alias sets are disjoint across canonical ids;
// add() rejects any string already claimed by a different canonical.
class AliasTable {
public:
  void add(const EntityId& canonical, const std::vector<std::string>& aliases);

  // Full alias set of the canonical id owning s, or {s} when s is unknown.
  std::set<std::string> expand(const std::string& s) const;

  std::optional<EntityId> canonical_of(const std::string& s) const;

  size_t size() const { return sets_.size(); }
  const std::map<EntityId, std::set<std::string>>& sets() const { return sets_; }

private:
  std::map<EntityId, std::set<std::string>> sets_;
  std::map<std::string, EntityId> owner_;
};

// Immutable fact store. Both indexes are derived from the fact set at
// construction and never diverge from it.
class KnowledgeBase {
public:
  KnowledgeBase() = default;
  KnowledgeBase(std::vector<Fact> facts, AliasTable aliases);

  const std::set<Fact>& facts() const { return facts_; }
  const AliasTable& aliases() const { return aliases_; }

  size_t fact_count() const { return facts_.size(); }
  size_t entity_count() const { return entities_.size(); }
  size_t relation_count() const { return by_relation_.size(); }

  const std::set<EntityId>& entities() const { return entities_; }
  std::vector<Relation> relations() const;
  const std::vector<Fact>& facts_for(const Relation& r) const;

  // Distinct objects (resp. subjects) appearing under r, sorted.
  const std::vector<EntityId>& objects_of(const Relation& r) const;
  const std::vector<EntityId>& subjects_of(const Relation& r) const;

  std::set<EntityId> lookup_objects(const EntityId& subject, const Relation& r) const;
  std::set<EntityId> lookup_subjects(const Relation& r, const EntityId& object) const;

  std::set<std::string> alias_expand(const std::string& s) const {
    return aliases_.expand(s);
  }

private:
  std::set<Fact> facts_;
  AliasTable aliases_;
  std::set<EntityId> entities_;
  std::map<std::pair<EntityId, Relation>, std::set<EntityId>> index_sr_;
  std::map<std::pair<Relation, EntityId>, std::set<EntityId>> index_ro_;
  std::map<Relation, std::vector<Fact>> by_relation_;
  std::map<Relation, std::vector<EntityId>> objects_of_;
  std::map<Relation, std::vector<EntityId>> subjects_of_;
};

// Triples file: one subject<TAB>relation<TAB>object per line, '#' comments.
// Alias file: canonical<TAB>alias... per line. Malformed input raises
// Error{Parse} naming the line; alias conflicts raise Error{Conflict}.
KnowledgeBase load_knowledge_base(const std::string& triples_path,
                                  const std::string& aliases_path = "");
AliasTable load_alias_table(const std::string& path);
void save_knowledge_base(const KnowledgeBase& kb, const std::string& path);

// Objects derivable for (subject, head) by one application of any rule whose
// head matches: chain the body relations through the fact indexes, then union
// with the direct facts. Empty rule set degenerates to lookup_objects.
std::set<EntityId> derive_by_rules(const KnowledgeBase& kb, const RuleSet& rules,
                                   const EntityId& subject, const Relation& head);

// Inverse of derive_by_rules: subjects from which (subject, head) derives object.
std::set<EntityId> derive_subjects_by_rules(const KnowledgeBase& kb,
                                            const RuleSet& rules,
                                            const Relation& head,
                                            const EntityId& object);

}  // namespace ruleke
