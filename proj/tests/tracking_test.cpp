#include "tracking.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "test_util.hpp"

using namespace ruleke;
using namespace ruleke::testing;

namespace {

// Distinct relations get orthogonal vectors, so similarity is exactly 0 or 1
// and activation / retrieval behave like symbolic matching.
class BasisEncoder : public Encoder {
 public:
  EmbeddingVector encode(const Relation& relation) const override {
    auto [it, fresh] = slots_.emplace(relation, slots_.size());
    (void)fresh;
    EmbeddingVector v(64, 0.0);
    v[it->second % v.size()] = 1.0;
    return v;
  }
  size_t dimension() const override { return 64; }

 private:
  mutable std::map<Relation, size_t> slots_;
};

// Oracle with no knowledge at all.
class EmptyOracle : public KnowledgeOracle {
 public:
  std::optional<EntityId> query_object(const EntityId&, const Relation&) const override {
    return std::nullopt;
  }
  std::vector<EntityId> query_subjects(const Relation&, const EntityId&) const override {
    return {};
  }
};

Rule boss_rule() { return parse_rule("company_is(z0,z1) & owner_is(z1,z2) -> boss_is(z0,z2)"); }

Rule first_lady_rule() {
  return parse_rule("head_of_state_is(z0,z1) & wife_is(z1,z2) -> the_First_Lady_is(z0,z2)");
}

KnowledgeBase base_graph() {
  AliasTable aliases;
  aliases.add("United States", {"USA", "America"});
  return KnowledgeBase(
      {
          {"company_is", "Tom", "Amazon"},
          {"owner_is", "Amazon", "Jeff Bezos"},
          {"head_of_state_is", "United States", "Joe Biden"},
          {"wife_is", "Albert Einstein", "Elsa Einstein"},
      },
      aliases);
}

// Follow a trace with the recorded sources and check every entity agrees.
void replay(const DerivedFact& df, const EditMemory& mem, const KnowledgeOracle& oracle,
            double theta) {
  const size_t n = df.rule.body.size();
  REQUIRE(df.trace.size() == n + 1);
  for (size_t i = 0; i < df.trace.size(); ++i) REQUIRE(df.trace[i].position == i);
  CHECK(df.fact.relation == df.rule.head);
  CHECK(df.fact.subject == df.trace.front().entity);
  CHECK(df.fact.object == df.trace.back().entity);
  CHECK(df.trace[df.position - 1].entity == df.trigger.subject);
  CHECK(df.trace[df.position].entity == df.trigger.new_object);

  for (size_t pos = df.position + 1; pos <= n; ++pos) {
    const auto& step = df.trace[pos];
    const auto& prev = df.trace[pos - 1].entity;
    if (step.source == TraceSource::EditMemory) {
      auto hit = mem.retrieve_forward(prev, step.relation, theta);
      REQUIRE(hit.has_value());
      CHECK(hit->edit.new_object == step.entity);
    } else {
      REQUIRE(step.source == TraceSource::Oracle);
      auto obj = oracle.query_object(prev, step.relation);
      REQUIRE(obj.has_value());
      CHECK(*obj == step.entity);
    }
  }
  for (size_t pos = df.position - 1; pos-- > 0;) {
    const auto& step = df.trace[pos];
    const auto& next = df.trace[pos + 1].entity;
    if (step.source == TraceSource::EditMemory) {
      auto hit = mem.retrieve_backward(next, step.relation, theta);
      REQUIRE(hit.has_value());
      CHECK(hit->edit.subject == step.entity);
    } else {
      REQUIRE(step.source == TraceSource::Oracle);
      auto subjects = oracle.query_subjects(step.relation, next);
      REQUIRE(subjects.size() == 1);
      CHECK(subjects.front() == step.entity);
    }
  }
}

}  // namespace

TEST_CASE("graph oracle answers direct facts, rule closure, and aliases") {
  auto kb = base_graph();
  RuleSet rules({boss_rule()});
  KbOracle oracle(kb, rules);

  CHECK(oracle.query_object("Tom", "company_is") == "Amazon");
  // composed relation answered through the rule, the stale pre-edit boss
  CHECK(oracle.query_object("Tom", "boss_is") == "Jeff Bezos");
  CHECK(!oracle.query_object("Tom", "wife_is").has_value());
  CHECK(oracle.query_object("USA", "head_of_state_is") == "Joe Biden");
  CHECK(oracle.query_object("America", "head_of_state_is") == "Joe Biden");

  CHECK(oracle.query_subjects("company_is", "Amazon") == std::vector<EntityId>{"Tom"});
  CHECK(oracle.query_subjects("boss_is", "Jeff Bezos") == std::vector<EntityId>{"Tom"});
  CHECK(oracle.query_subjects("owner_is", "Tesla").empty());
}

TEST_CASE("graph oracle collapses multiple answers to the smallest") {
  AliasTable aliases;
  KnowledgeBase kb(
      {
          {"r", "s", "zebra"},
          {"r", "s", "ant"},
      },
      aliases);
  RuleSet no_rules;
  KbOracle oracle(kb, no_rules);
  CHECK(oracle.query_object("s", "r") == "ant");
}

TEST_CASE("forward tracking walks the tail of the body") {
  auto kb = base_graph();
  RuleSet rules;
  KbOracle oracle(kb, rules);
  AliasTable aliases;
  HashedNgramEncoder enc;
  EditMemory mem(aliases, enc);

  auto got = forward_track(first_lady_rule(), 1, "Albert Einstein", mem, oracle, 0.7);
  REQUIRE(std::holds_alternative<EntityId>(got));
  CHECK(std::get<EntityId>(got) == "Elsa Einstein");

  // k = n: nothing left to resolve
  auto at_end = forward_track(first_lady_rule(), 2, "Elsa Einstein", mem, oracle, 0.7);
  CHECK(std::get<EntityId>(at_end) == "Elsa Einstein");

  auto miss = forward_track(first_lady_rule(), 1, "Isaac Newton", mem, oracle, 0.7);
  REQUIRE(std::holds_alternative<TrackingError>(miss));
  CHECK(std::get<TrackingError>(miss).kind == TrackingErrorKind::OracleMiss);

  auto bad = forward_track(first_lady_rule(), 3, "x", mem, oracle, 0.7);
  REQUIRE(std::holds_alternative<TrackingError>(bad));
  CHECK(std::get<TrackingError>(bad).kind == TrackingErrorKind::Empty);
}

TEST_CASE("memory beats the oracle at every forward step") {
  auto kb = base_graph();
  RuleSet rules;
  KbOracle inner(kb, rules);
  CountingOracle oracle(inner);
  AliasTable aliases;
  HashedNgramEncoder enc;
  EditMemory mem(aliases, enc);
  mem.insert({"wife_is", "Albert Einstein", EntityId("Elsa Einstein"), "Mileva Maric"});

  auto got = forward_track(first_lady_rule(), 1, "Albert Einstein", mem, oracle, 0.7);
  CHECK(std::get<EntityId>(got) == "Mileva Maric");
  CHECK(oracle.calls() == 0);

  EditMemory bare(aliases, enc);
  auto fallback = forward_track(first_lady_rule(), 1, "Albert Einstein", bare, oracle, 0.7);
  CHECK(std::get<EntityId>(fallback) == "Elsa Einstein");
  CHECK(oracle.object_calls() == 1);
}

TEST_CASE("back tracking needs a unique inverse") {
  AliasTable aliases;
  KnowledgeBase unique_kb({{"company_is", "Tom", "Twitter"}}, aliases);
  KnowledgeBase shared_kb(
      {
          {"company_is", "Tom", "Twitter"},
          {"company_is", "Jerry", "Twitter"},
      },
      aliases);
  RuleSet rules;
  HashedNgramEncoder enc;
  EditMemory mem(aliases, enc);

  KbOracle unique_oracle(unique_kb, rules);
  auto got = back_track(boss_rule(), 2, "Twitter", mem, unique_oracle, 0.7);
  REQUIRE(std::holds_alternative<EntityId>(got));
  CHECK(std::get<EntityId>(got) == "Tom");

  auto at_start = back_track(boss_rule(), 1, "Tom", mem, unique_oracle, 0.7);
  CHECK(std::get<EntityId>(at_start) == "Tom");

  KbOracle shared_oracle(shared_kb, rules);
  auto ambiguous = back_track(boss_rule(), 2, "Twitter", mem, shared_oracle, 0.7);
  REQUIRE(std::holds_alternative<TrackingError>(ambiguous));
  CHECK(std::get<TrackingError>(ambiguous).kind == TrackingErrorKind::AmbiguousInverse);

  KnowledgeBase empty_kb(std::vector<Fact>{}, aliases);
  KbOracle empty_oracle(empty_kb, rules);
  auto miss = back_track(boss_rule(), 2, "Twitter", mem, empty_oracle, 0.7);
  CHECK(std::get<TrackingError>(miss).kind == TrackingErrorKind::OracleMiss);
}

TEST_CASE("a memory edit resolves the inverse before the oracle is asked") {
  AliasTable aliases;
  KnowledgeBase shared_kb(
      {
          {"company_is", "Tom", "Twitter"},
          {"company_is", "Jerry", "Twitter"},
      },
      aliases);
  RuleSet rules;
  KbOracle inner(shared_kb, rules);
  CountingOracle oracle(inner);
  HashedNgramEncoder enc;
  EditMemory mem(aliases, enc);
  mem.insert({"company_is", "Spike", std::nullopt, "Twitter"});

  // the would-be many-to-1 failure is preempted by the edit
  auto got = back_track(boss_rule(), 2, "Twitter", mem, oracle, 0.7);
  REQUIRE(std::holds_alternative<EntityId>(got));
  CHECK(std::get<EntityId>(got) == "Spike");
  CHECK(oracle.calls() == 0);
}

TEST_CASE("both-edit composition never touches the oracle") {
  AliasTable aliases;
  HashedNgramEncoder enc;
  EditMemory mem(aliases, enc);
  Edit e1{"company_is", "Tom", EntityId("Amazon"), "Twitter"};
  Edit e2{"owner_is", "Twitter", EntityId("Jeff Bezos"), "Elon Musk"};
  mem.insert(e1);
  mem.insert(e2);

  EmptyOracle inner;
  CountingOracle oracle(inner);
  auto act = is_activated("company_is", boss_rule(), enc, 0.8);
  REQUIRE(act.has_value());
  REQUIRE(act->position == 1);

  auto outcome = infer_correlated(e1, *act, mem, oracle, 0.7);
  REQUIRE(std::holds_alternative<DerivedFact>(outcome));
  const auto& df = std::get<DerivedFact>(outcome);
  CHECK(df.fact == Fact{"boss_is", "Tom", "Elon Musk"});
  CHECK(df.trace[2].source == TraceSource::EditMemory);
  CHECK(oracle.calls() == 0);
  for (const auto& step : df.trace) CHECK(step.source != TraceSource::Oracle);
  replay(df, mem, oracle, 0.7);
}

TEST_CASE("single-edit inference pulls the missing hop from the oracle") {
  auto kb = base_graph();
  RuleSet rules;
  KbOracle oracle(kb, rules);
  AliasTable aliases;
  HashedNgramEncoder enc;
  EditMemory mem(aliases, enc);
  Edit edit{"head_of_state_is", "America", EntityId("Joe Biden"), "Albert Einstein"};
  mem.insert(edit);

  auto act = is_activated(edit.relation, first_lady_rule(), enc, 0.8);
  REQUIRE(act.has_value());
  auto outcome = infer_correlated(edit, *act, mem, oracle, 0.7);
  REQUIRE(std::holds_alternative<DerivedFact>(outcome));
  const auto& df = std::get<DerivedFact>(outcome);
  CHECK(df.fact == Fact{"the_first_lady_is", "America", "Elsa Einstein"});
  CHECK(df.trace[0].source == TraceSource::Trigger);
  CHECK(df.trace[1].source == TraceSource::Trigger);
  CHECK(df.trace[2].source == TraceSource::Oracle);
  replay(df, mem, oracle, 0.7);

  KnowledgeBase bare(std::vector<Fact>{}, AliasTable{});
  KbOracle blind(bare, rules);
  auto failed = infer_correlated(edit, *act, mem, blind, 0.7);
  REQUIRE(std::holds_alternative<TrackingError>(failed));
  CHECK(std::get<TrackingError>(failed).kind == TrackingErrorKind::OracleMiss);
}

TEST_CASE("derived facts become null-edits") {
  DerivedFact df;
  df.fact = Fact{"boss_is", "Tom", "Elon Musk"};
  Edit e = to_edit(df);
  CHECK(e.relation == "boss_is");
  CHECK(e.subject == "Tom");
  CHECK(!e.old_object.has_value());
  CHECK(e.new_object == "Elon Musk");
  CHECK(to_edit(df) == e);
}

TEST_CASE("augmenting the two-edit scenario yields the composed third edit") {
  auto kb = base_graph();
  RuleSet rules({boss_rule()});
  KbOracle oracle(kb, rules);
  HashedNgramEncoder enc;
  std::vector<Edit> edits = {
      {"company_is", "Tom", EntityId("Amazon"), "Twitter"},
      {"owner_is", "Twitter", EntityId("Jeff Bezos"), "Elon Musk"},
  };

  auto result = augment(edits, rules, oracle, enc, kb.aliases());
  CHECK(result.stats.originals == 2);
  CHECK(result.stats.derived == 1);
  CHECK(result.stats.growth_ratio == 1.5);
  CHECK(result.stats.conflicts == 0);
  REQUIRE(result.memory.size() == 3);
  CHECK(result.memory[0] == edits[0]);
  CHECK(result.memory[1] == edits[1]);
  CHECK(result.memory[2] == Edit{"boss_is", "Tom", std::nullopt, "Elon Musk"});
  // the first edit's own inference dangles: nobody owns Twitter pre-edit
  CHECK(result.stats.oracle_misses == 1);
  REQUIRE(result.derived.size() == 1);
  replay(result.derived[0], result.memory, oracle, 0.7);
}

TEST_CASE("augment stats count failure kinds") {
  AliasTable aliases;
  KnowledgeBase shared_kb(
      {
          {"company_is", "Tom", "Twitter"},
          {"company_is", "Jerry", "Twitter"},
      },
      aliases);
  RuleSet rules({boss_rule()});
  KbOracle oracle(shared_kb, rules);
  HashedNgramEncoder enc;
  std::vector<Edit> edits = {{"owner_is", "Twitter", std::nullopt, "Elon Musk"}};

  auto result = augment(edits, rules, oracle, enc, aliases);
  CHECK(result.derived.empty());
  CHECK(result.stats.ambiguous_inverses == 1);
  CHECK(result.stats.growth_ratio == 1.0);
}

TEST_CASE("augment keeps the originals as a prefix and respects the bound") {
  auto kb = base_graph();
  RuleSet rules({boss_rule(), first_lady_rule()});
  KbOracle oracle(kb, rules);
  HashedNgramEncoder enc;
  std::vector<Edit> edits = {
      {"head_of_state_is", "America", EntityId("Joe Biden"), "Albert Einstein"},
      {"company_is", "Tom", EntityId("Amazon"), "Twitter"},
      {"owner_is", "Twitter", EntityId("Jeff Bezos"), "Elon Musk"},
  };

  AugmentOptions opts;
  auto result = augment(edits, rules, oracle, enc, kb.aliases(), opts);
  REQUIRE(result.memory.size() >= edits.size());
  for (size_t i = 0; i < edits.size(); ++i) CHECK(result.memory[i] == edits[i]);
  std::set<Fact> derived;
  for (const auto& df : result.derived) derived.insert(df.fact);
  CHECK(derived.count({"the_first_lady_is", "America", "Elsa Einstein"}) == 1);
  CHECK(derived.count({"boss_is", "Tom", "Elon Musk"}) == 1);

  // nothing activates above the similarity bound
  opts.delta = 1.1;
  auto inert = augment(edits, rules, oracle, enc, kb.aliases(), opts);
  CHECK(inert.memory.size() == edits.size());
  CHECK(inert.derived.empty());
  CHECK(inert.stats.growth_ratio == 1.0);
}

TEST_CASE("empty input augments to an empty memory with ratio one") {
  RuleSet rules({boss_rule()});
  AliasTable aliases;
  KnowledgeBase kb(std::vector<Fact>{}, aliases);
  KbOracle oracle(kb, rules);
  HashedNgramEncoder enc;
  auto result = augment({}, rules, oracle, enc, aliases);
  CHECK(result.memory.size() == 0);
  CHECK(result.stats.growth_ratio == 1.0);
  CHECK(result.stats.rounds == 1);
}

TEST_CASE("duplicate derivations collapse and conflicts are flagged") {
  auto kb = base_graph();
  RuleSet rules({boss_rule()});
  KbOracle oracle(kb, rules);
  HashedNgramEncoder enc;
  // two owner edits for the same company: both derive a boss for Tom, the
  // second disagreeing with an original boss edit
  std::vector<Edit> edits = {
      {"company_is", "Tom", EntityId("Amazon"), "Twitter"},
      {"boss_is", "Tom", EntityId("Jeff Bezos"), "Jack Dorsey"},
      {"owner_is", "Twitter", EntityId("Jeff Bezos"), "Elon Musk"},
      {"owner_is", "Twitter", EntityId("Jeff Bezos"), "Elon Musk"},
  };

  auto result = augment(edits, rules, oracle, enc, kb.aliases());
  std::vector<Fact> facts;
  for (const auto& df : result.derived) facts.push_back(df.fact);
  CHECK(std::count(facts.begin(), facts.end(), Fact{"boss_is", "Tom", "Elon Musk"}) == 1);
  CHECK(result.stats.conflicts == 1);
  // originals precede derived edits, so the explicit boss edit wins ties
  auto hit = result.memory.retrieve_forward("Tom", "boss_is", 0.7);
  REQUIRE(hit.has_value());
  CHECK(hit->edit.new_object == "Jack Dorsey");
}

TEST_CASE("fixpoint closes derivation chains regardless of edit order") {
  auto r12 = parse_rule("r1(z0,z1) & r2(z1,z2) -> h12(z0,z2)");
  auto r123 = parse_rule("h12(z0,z1) & r3(z1,z2) -> h123(z0,z2)");
  RuleSet rules({r12, r123});
  BasisEncoder enc;
  EmptyOracle oracle;
  AliasTable aliases;
  std::vector<Edit> edits = {
      {"r1", "A", std::nullopt, "B"},
      {"r2", "B", std::nullopt, "C"},
      {"r3", "C", std::nullopt, "D"},
  };

  AugmentOptions opts;
  opts.fixpoint = true;
  const std::set<Fact> expected = {{"h12", "A", "C"}, {"h123", "A", "D"}};

  std::vector<size_t> order = {0, 1, 2};
  do {
    std::vector<Edit> permuted;
    for (size_t i : order) permuted.push_back(edits[i]);
    auto result = augment(permuted, rules, oracle, enc, aliases, opts);
    std::set<Fact> got;
    for (const auto& df : result.derived) got.insert(df.fact);
    CHECK(got == expected);
    CHECK(result.memory.size() == 5);
  } while (std::next_permutation(order.begin(), order.end()));

  // single pass misses the cascade when the chain head arrives last
  opts.fixpoint = false;
  auto shallow = augment({edits[2], edits[1], edits[0]}, rules, oracle, enc, aliases, opts);
  std::set<Fact> got;
  for (const auto& df : shallow.derived) got.insert(df.fact);
  CHECK(got == std::set<Fact>{{"h12", "A", "C"}});
}

TEST_CASE("fixpoint rounds stop at the cap") {
  auto chain = parse_rule("h(z0,z1) & h(z1,z2) -> h(z0,z2)");
  RuleSet rules({chain});
  BasisEncoder enc;
  EmptyOracle oracle;
  AliasTable aliases;
  // reverse chain order so each edit can resolve its successor hop
  std::vector<Edit> edits;
  for (char c = 'g'; c >= 'a'; --c) {
    edits.push_back({"h", std::string(1, c), std::nullopt, std::string(1, static_cast<char>(c + 1))});
  }

  AugmentOptions opts;
  opts.fixpoint = true;
  opts.max_rounds = 1;
  auto capped = augment(edits, rules, oracle, enc, aliases, opts);
  CHECK(capped.stats.rounds == 2);

  opts.max_rounds = 10;
  auto full = augment(edits, rules, oracle, enc, aliases, opts);
  CHECK(full.stats.rounds <= 11);
  CHECK(full.derived.size() > capped.derived.size());
  // transitive closure of a 7-link chain: all pairs strictly more than one apart
  CHECK(full.derived.size() == 7 * 8 / 2 - 7);
}
