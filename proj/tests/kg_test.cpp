#include "kg.hpp"

#include <doctest.h>

#include "rules.hpp"
#include "test_util.hpp"

using namespace ruleke;
using namespace ruleke::testing;

TEST_CASE("entity and relation normalization") {
  CHECK(normalize_entity("  Joe Biden ") == "Joe Biden");
  CHECK(normalize_entity("USA") == "USA");
  CHECK(normalize_relation(" The First  Lady is ") == "the_first_lady_is");
  CHECK(normalize_relation("wife_is") == "wife_is");
  // idempotent
  CHECK(normalize_relation(normalize_relation("Head Of State")) ==
        normalize_relation("Head Of State"));
  CHECK(normalize_entity(normalize_entity("  x ")) == normalize_entity("  x "));
}

TEST_CASE("load, dedupe, lookups, round-trip") {
  TempDir tmp;
  write_text(tmp.file("kb.tsv"),
             "# people\n"
             "Tom\tcompany_is\tAmazon\n"
             "Tom\tcompany_is\tAmazon\n"
             "Amazon\towner_is\tJeff Bezos\n"
             "\n"
             "America\tHead of State is\tJoe Biden\n");
  auto kb = load_knowledge_base(tmp.file("kb.tsv"));
  CHECK(kb.fact_count() == 3);
  CHECK(kb.entity_count() == 5);
  CHECK(kb.relation_count() == 3);
  CHECK(kb.lookup_objects("Tom", "company_is") == std::set<EntityId>{"Amazon"});
  CHECK(kb.lookup_objects("America", "head_of_state_is") == std::set<EntityId>{"Joe Biden"});
  CHECK(kb.lookup_subjects("owner_is", "Jeff Bezos") == std::set<EntityId>{"Amazon"});
  CHECK(kb.lookup_objects("Nobody", "company_is").empty());

  save_knowledge_base(kb, tmp.file("out.tsv"));
  auto kb2 = load_knowledge_base(tmp.file("out.tsv"));
  CHECK(kb2.facts() == kb.facts());
}

TEST_CASE("malformed triple line reports its line number") {
  TempDir tmp;
  write_text(tmp.file("bad.tsv"), "a\tr\tb\nonly two\tfields\n");
  try {
    load_knowledge_base(tmp.file("bad.tsv"));
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("alias table expand and conflicts") {
  AliasTable t;
  t.add("United States", {"USA", "America"});
  t.add("United Kingdom", {"UK"});
  CHECK(t.expand("USA") == std::set<std::string>{"America", "USA", "United States"});
  CHECK(t.expand("United States") == t.expand("America"));
  CHECK(t.expand("France") == std::set<std::string>{"France"});
  CHECK(t.canonical_of("UK") == EntityId("United Kingdom"));
  CHECK(!t.canonical_of("France").has_value());
  // same alias under a second canonical is a hard error
  CHECK_THROWS_AS(t.add("Union of States", {"USA"}), Error);
  // re-adding under the same canonical is fine
  t.add("United States", {"USA", "the US"});
  CHECK(t.expand("the US").count("USA") == 1);
}

TEST_CASE("alias file loads and rejects cross-canonical conflicts") {
  TempDir tmp;
  write_text(tmp.file("a.tsv"), "United States\tUSA\tAmerica\nUnited Kingdom\tUK\n");
  auto t = load_alias_table(tmp.file("a.tsv"));
  CHECK(t.expand("America").count("United States") == 1);

  write_text(tmp.file("bad.tsv"), "A\tX\nB\tX\n");
  try {
    load_alias_table(tmp.file("bad.tsv"));
    FAIL("expected conflict");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Conflict);
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("indexes agree with the fact set") {
  Rng rng(7);
  for (int round = 0; round < 20; ++round) {
    auto kb = random_kb(rng, 200, 40, 6);
    size_t via_sr = 0;
    for (const auto& f : kb.facts()) {
      auto objs = kb.lookup_objects(f.subject, f.relation);
      CHECK(objs.count(f.object) == 1);
      auto subs = kb.lookup_subjects(f.relation, f.object);
      CHECK(subs.count(f.subject) == 1);
    }
    for (const auto& s : kb.entities()) {
      for (const auto& r : kb.relations()) {
        for (const auto& o : kb.lookup_objects(s, r)) {
          CHECK(kb.facts().count(Fact{r, s, o}) == 1);
          ++via_sr;
        }
      }
    }
    CHECK(via_sr == kb.fact_count());
  }
}

TEST_CASE("derive_by_rules equals lookup when rule set is empty") {
  Rng rng(11);
  auto kb = random_kb(rng, 300, 50, 8);
  RuleSet empty;
  for (const auto& s : kb.entities()) {
    for (const auto& r : kb.relations()) {
      CHECK(derive_by_rules(kb, empty, s, r) == kb.lookup_objects(s, r));
    }
  }
}

TEST_CASE("derive_by_rules matches brute-force scan on random KBs") {
  Rng rng(13);
  for (int round = 0; round < 10; ++round) {
    auto kb = random_kb(rng, 100 + rng.below(900), 30 + rng.below(40), 2 + rng.below(6));
    RuleSet rules;
    rules.add(parse_rule("r0(z0,z1) & r1(z1,z2) -> r2(z0,z2)"));
    rules.add(parse_rule("r1(z0,z1) & r1(z1,z2) -> r3(z0,z2)"));
    rules.add(parse_rule("r2(z0,z1) & r0(z1,z2) & r1(z2,z3) -> r0(z0,z3)"));
    for (const auto& s : kb.entities()) {
      for (const auto& r : kb.relations()) {
        CHECK(derive_by_rules(kb, rules, s, r) == brute_derive(kb, rules, s, r));
      }
    }
  }
}

TEST_CASE("derive example: composed head plus direct facts") {
  KnowledgeBase kb(
      {
          {"father_is", "Tom", "John"},
          {"wife_is", "John", "Amy"},
          {"mother_is", "Tom", "Amy"},
          {"mother_is", "Sue", "Jane"},
      },
      {});
  RuleSet rules;
  rules.add(parse_rule("father_is(z0,z1) & wife_is(z1,z2) -> mother_is(z0,z2)"));
  CHECK(derive_by_rules(kb, rules, "Tom", "mother_is") == std::set<EntityId>{"Amy"});
  CHECK(derive_by_rules(kb, rules, "Sue", "mother_is") == std::set<EntityId>{"Jane"});
  CHECK(derive_subjects_by_rules(kb, rules, "mother_is", "Amy") == std::set<EntityId>{"Tom"});
}
