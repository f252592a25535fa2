#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "edit_memory.hpp"
#include "kg.hpp"
#include "rng.hpp"
#include "rules.hpp"
#include "tracking.hpp"

namespace ruleke {

// One relation's metadata: subject/object categories for chaining plus the
// two text fragments used to render questions. A relation may have several
// rows when it admits more than one typing (e.g. places and countries both
// sit inside continents); the first row wins for rendering.
struct RelationTemplate {
  Relation relation;
  std::string domain;
  std::string range;
  std::string wh;      // question opener, e.g. "Who", "Which country"
  std::string phrase;  // nesting form with an [S] slot, e.g. "the father of [S]"
};

class TemplateTable {
 public:
  TemplateTable() = default;
  explicit TemplateTable(std::vector<RelationTemplate> rows);

  const std::vector<RelationTemplate>& rows() const { return rows_; }
  std::vector<Relation> relations() const;  // distinct, in first-seen order
  bool has(const Relation& r) const { return first_row_.count(r) > 0; }
  const RelationTemplate& primary(const Relation& r) const;  // first row

  // a may be followed by b under some pairing of their typings
  bool compatible(const Relation& a, const Relation& b) const;
  // relations that may start from category `domain`
  std::vector<Relation> from_domain(const std::string& domain) const;
  // ranges relation r can produce (one per row)
  std::vector<std::string> ranges_of(const Relation& r) const;

 private:
  std::vector<RelationTemplate> rows_;
  std::map<Relation, size_t> first_row_;
  std::map<Relation, std::vector<size_t>> rows_of_;
};

// TSV: relation, domain, range, wh, phrase. '#' comments and blanks skipped.
TemplateTable load_relation_templates(const std::string& path);

// A type-checked relation sequence; categories is the typing chain that
// admitted it, one entry per position 0..n.
struct PathTemplate {
  std::vector<Relation> relations;
  std::vector<std::string> categories;
};

// Every type-compatible sequence of table relations with 1..max_hops hops,
// lexicographic by relation sequence. Each rule's relations must appear in
// the table (the composition step could not type its output otherwise);
// a missing one raises Error{Invalid}.
std::vector<PathTemplate> enumerate_path_templates(const TemplateTable& table,
                                                   const RuleSet& rules, size_t max_hops);

enum class Scenario { NoEdit, LeftEdit, RightEdit, BothEdit };
const char* to_string(Scenario s);
Scenario parse_scenario(const std::string& s);

struct BenchmarkInstance {
  std::string id;
  Scenario scenario = Scenario::NoEdit;
  EntityId start;
  std::vector<Relation> question_path;  // coarse path, contains the rule head
  std::vector<Relation> fine_path;      // body atoms spelled out
  Rule rule;
  std::vector<Edit> edits;
  EntityId gold_answer;
  std::set<std::string> gold_aliases;
  size_t hops = 0;  // question_path length
  std::string rendered_question;
};

// Walk `relations` from start; multi-valued hops are decided by rng, a dry
// hop ends the walk with nullopt and the caller retries elsewhere.
std::optional<std::vector<Fact>> generate_knowledge_path(const KnowledgeBase& kb,
                                                         const std::vector<Relation>& relations,
                                                         const EntityId& start, Rng& rng);

struct CounterfactualResult {
  std::vector<Edit> edits;        // one per requested position, in path order
  std::vector<Fact> edited_path;  // the path with edits applied downstream
};

// Replace the object at each requested position with a uniform draw from the
// relation's range, excluding everything currently true for that subject and
// its aliases, then re-resolve later hops from the replacement. Fails when no
// candidate remains or a downstream hop dries up.
std::optional<CounterfactualResult> inject_counterfactual(const KnowledgeBase& kb,
                                                          const std::vector<Fact>& path,
                                                          const std::set<size_t>& positions,
                                                          Rng& rng);

// Collapse the earliest contiguous body match into the rule head; rules are
// tried in set order at each start offset.
struct Composition {
  std::vector<Relation> coarse;
  Rule rule;
  size_t offset = 0;  // where the body matched in the fine path
};
std::optional<Composition> compose_with_rule(const std::vector<Relation>& fine,
                                             const RuleSet& rules);

struct ScenarioCounts {
  size_t no_edit = 0;
  size_t left_edit = 0;
  size_t right_edit = 0;
  size_t both_edit = 0;

  size_t total() const { return no_edit + left_edit + right_edit + both_edit; }
};

struct GenerationOptions {
  uint64_t seed = 0;
  size_t max_hops = 4;  // coarse hops per question, cycled 2..max_hops
  bool allow_ambiguous = false;  // right edits sit on many-to-1 inverses when set
  double delta = 0.8;
  double theta = 0.7;
  size_t attempts_per_instance = 500;
};

struct Dataset {
  std::vector<BenchmarkInstance> instances;
  std::vector<std::string> warnings;  // non-empty when counts fell short
};

// Construct instances whose labels follow from which body atoms carry edits.
// Every instance is certified before emission: the fine path replays to the
// gold answer under the edit overlay, the stale closure answer disagrees
// with gold on edited scenarios, and the end-to-end augment-and-solve run at
// (delta, theta) lands on gold. With allow_ambiguous, right edits are placed
// on many-to-1 inverses instead and certified to trip the ambiguity guard
// rather than to resolve.
Dataset generate_dataset(const KnowledgeBase& kb, const RuleSet& rules,
                         const TemplateTable& table, const ScenarioCounts& counts,
                         const Encoder& encoder, const GenerationOptions& opts = {});

// Per-scenario, per-hop instance counts.
std::map<Scenario, std::map<size_t, size_t>> dataset_stats(
    const std::vector<BenchmarkInstance>& instances);
std::string dataset_stats_json(const std::vector<BenchmarkInstance>& instances);

// JSONL, one instance per line, loaded back with full validation.
void save_dataset(const std::vector<BenchmarkInstance>& instances, const std::string& path);
std::vector<BenchmarkInstance> load_dataset(const std::string& path);

}  // namespace ruleke
