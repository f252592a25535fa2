// Exercises the C interface through ruleke.h alone: no core C++ headers, so
// this binary proves the exported ABI is self-sufficient.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ruleke.h"

namespace {

const std::string kDataDir = RULEKE_DATA_DIR;

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("ruleke_capi_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Takes ownership of a library string for the scope of an assertion.
std::string take(char* s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  rk_string_free(s);
  return out;
}

char* c_copy(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Callback backend over a fixed fact list.
struct ScriptedWorld {
  std::map<std::pair<std::string, std::string>, std::string> objects;
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> subjects;
  int object_calls = 0;
  int subject_calls = 0;
};

char* scripted_object(void* user, const char* subject, const char* relation) {
  auto* world = static_cast<ScriptedWorld*>(user);
  ++world->object_calls;
  auto it = world->objects.find({subject, relation});
  return it == world->objects.end() ? nullptr : c_copy(it->second);
}

char** scripted_subjects(void* user, const char* relation, const char* object) {
  auto* world = static_cast<ScriptedWorld*>(user);
  ++world->subject_calls;
  auto it = world->subjects.find({relation, object});
  if (it == world->subjects.end()) return nullptr;
  char** out = static_cast<char**>(std::malloc(sizeof(char*) * (it->second.size() + 1)));
  for (size_t i = 0; i < it->second.size(); ++i) out[i] = c_copy(it->second[i]);
  out[it->second.size()] = nullptr;
  return out;
}

}  // namespace

TEST_CASE("version and error slot behave") {
  CHECK(std::string(rk_version()) == "0.1.0");
  rk_kb* kb = nullptr;
  CHECK(rk_kb_load("/nonexistent/kb.tsv", nullptr, &kb) == RK_ERR_IO);
  CHECK(std::string(rk_last_error()).find("/nonexistent/kb.tsv") != std::string::npos);
  CHECK(kb == nullptr);

  CHECK(rk_kb_load(nullptr, nullptr, &kb) == RK_ERR_INVALID);
  CHECK(std::string(rk_last_error()).find("null") != std::string::npos);

  rk_string_free(nullptr);
  rk_kb_free(nullptr);
  rk_rules_free(nullptr);
  rk_edits_free(nullptr);
  rk_templates_free(nullptr);
  rk_dataset_free(nullptr);
  rk_oracle_free(nullptr);
}

TEST_CASE("knowledge bases round-trip through the handle API") {
  TempDir dir;
  write_text(dir.file("kb.tsv"),
             "Tom\tcompany_is\tTwitter\n"
             "Twitter\towner_is\tElon Musk\n"
             "Tom\tcompany_is\tTwitter\n");
  write_text(dir.file("aliases.tsv"), "Elon Musk\tMusk\n");

  rk_kb* kb = nullptr;
  REQUIRE(rk_kb_load(dir.file("kb.tsv").c_str(), dir.file("aliases.tsv").c_str(), &kb) == RK_OK);
  CHECK(std::string(rk_last_error()).empty());
  CHECK(rk_kb_fact_count(kb) == 2);  // the duplicate line collapses
  CHECK(rk_kb_entity_count(kb) == 3);
  CHECK(rk_kb_relation_count(kb) == 2);

  REQUIRE(rk_kb_save(kb, dir.file("out.tsv").c_str()) == RK_OK);
  rk_kb* back = nullptr;
  REQUIRE(rk_kb_load(dir.file("out.tsv").c_str(), nullptr, &back) == RK_OK);
  CHECK(rk_kb_fact_count(back) == 2);
  rk_kb_free(back);
  rk_kb_free(kb);

  CHECK(rk_kb_fact_count(nullptr) == 0);
}

TEST_CASE("parse failures carry the offending line") {
  TempDir dir;
  write_text(dir.file("kb.tsv"), "only two\tfields\n");
  rk_kb* kb = nullptr;
  CHECK(rk_kb_load(dir.file("kb.tsv").c_str(), nullptr, &kb) == RK_ERR_PARSE);
  CHECK(std::string(rk_last_error()).find(":1") != std::string::npos);
}

TEST_CASE("rules load, render, mine and save") {
  TempDir dir;
  write_text(dir.file("rules.txt"),
             "company_is(z0,z1) & owner_is(z1,z2) -> boss_is(z0,z2)\n"
             "father_is(z0,z1) & wife_is(z1,z2) -> mother_is(z0,z2) @0.9\n");
  rk_rules* rules = nullptr;
  REQUIRE(rk_rules_load(dir.file("rules.txt").c_str(), &rules) == RK_OK);
  CHECK(rk_rules_count(rules) == 2);

  char* text = nullptr;
  REQUIRE(rk_rules_render(rules, 0, &text) == RK_OK);
  CHECK(take(text) == "company_is(z0,z1) & owner_is(z1,z2) -> boss_is(z0,z2)");
  text = nullptr;
  REQUIRE(rk_rules_render(rules, 1, &text) == RK_OK);
  CHECK(take(text) == "father_is(z0,z1) & wife_is(z1,z2) -> mother_is(z0,z2) @0.9");
  CHECK(rk_rules_render(rules, 2, &text) == RK_ERR_NOT_FOUND);

  REQUIRE(rk_rules_save(rules, dir.file("back.txt").c_str()) == RK_OK);
  CHECK(read_text(dir.file("back.txt")) ==
        "company_is(z0,z1) & owner_is(z1,z2) -> boss_is(z0,z2)\n"
        "father_is(z0,z1) & wife_is(z1,z2) -> mother_is(z0,z2) @0.9\n");
  rk_rules_free(rules);

  write_text(dir.file("kb.tsv"),
             "Tom\tcompany_is\tAmazon\n"
             "Amazon\towner_is\tJeff\n"
             "Tom\tboss_is\tJeff\n"
             "Ann\tcompany_is\tTesla\n"
             "Tesla\towner_is\tElon\n"
             "Ann\tboss_is\tElon\n");
  rk_kb* kb = nullptr;
  REQUIRE(rk_kb_load(dir.file("kb.tsv").c_str(), nullptr, &kb) == RK_OK);
  rk_rules* mined = nullptr;
  REQUIRE(rk_rules_mine(kb, 2, 0.9, 1, &mined) == RK_OK);
  bool found = false;
  for (size_t i = 0; i < rk_rules_count(mined); ++i) {
    char* r = nullptr;
    REQUIRE(rk_rules_render(mined, i, &r) == RK_OK);
    if (take(r) == "company_is(z0,z1) & owner_is(z1,z2) -> boss_is(z0,z2)") found = true;
  }
  CHECK(found);
  rk_rules_free(mined);
  rk_kb_free(kb);
}

TEST_CASE("edit sets round-trip through files") {
  TempDir dir;
  const std::string lines =
      "{\"new_object\":\"Twitter\",\"old_object\":\"Amazon\",\"relation\":\"company_is\","
      "\"subject\":\"Tom\"}\n"
      "{\"new_object\":\"Elon Musk\",\"old_object\":null,\"relation\":\"owner_is\","
      "\"subject\":\"Twitter\"}\n";
  write_text(dir.file("edits.jsonl"), lines);
  rk_edits* edits = nullptr;
  REQUIRE(rk_edits_load(dir.file("edits.jsonl").c_str(), &edits) == RK_OK);
  CHECK(rk_edits_count(edits) == 2);
  REQUIRE(rk_edits_save(edits, dir.file("back.jsonl").c_str()) == RK_OK);
  CHECK(read_text(dir.file("back.jsonl")) == lines);
  rk_edits_free(edits);
}

TEST_CASE("augmenting the ownership-change pair derives the new boss") {
  TempDir dir;
  write_text(dir.file("kb.tsv"),
             "Tom\tcompany_is\tAmazon\n"
             "Amazon\towner_is\tJeff Bezos\n");
  write_text(dir.file("rules.txt"), "company_is(z0,z1) & owner_is(z1,z2) -> boss_is(z0,z2)\n");
  write_text(dir.file("edits.jsonl"),
             "{\"relation\":\"company_is\",\"subject\":\"Tom\",\"old_object\":\"Amazon\","
             "\"new_object\":\"Twitter\"}\n"
             "{\"relation\":\"owner_is\",\"subject\":\"Twitter\",\"old_object\":\"Jeff Bezos\","
             "\"new_object\":\"Elon Musk\"}\n");

  rk_kb* kb = nullptr;
  rk_rules* rules = nullptr;
  rk_edits* edits = nullptr;
  REQUIRE(rk_kb_load(dir.file("kb.tsv").c_str(), nullptr, &kb) == RK_OK);
  REQUIRE(rk_rules_load(dir.file("rules.txt").c_str(), &rules) == RK_OK);
  REQUIRE(rk_edits_load(dir.file("edits.jsonl").c_str(), &edits) == RK_OK);

  rk_augment_options opts;
  rk_augment_options_init(&opts);
  CHECK(opts.delta == 0.8);
  CHECK(opts.theta == 0.7);
  CHECK(opts.fixpoint == 0);
  CHECK(opts.max_rounds == 10);

  rk_edits* out = nullptr;
  rk_augment_stats stats;
  REQUIRE(rk_augment(kb, rules, edits, nullptr, &opts, &out, &stats) == RK_OK);
  CHECK(stats.originals == 2);
  CHECK(stats.derived == 1);
  CHECK(stats.growth_ratio == 1.5);
  CHECK(stats.rounds == 1);
  REQUIRE(rk_edits_count(out) == 3);

  REQUIRE(rk_edits_save(out, dir.file("aug.jsonl").c_str()) == RK_OK);
  const std::string saved = read_text(dir.file("aug.jsonl"));
  CHECK(saved.find("\"relation\":\"boss_is\"") != std::string::npos);
  CHECK(saved.find("\"subject\":\"Tom\"") != std::string::npos);
  CHECK(saved.find("\"new_object\":\"Elon Musk\"") != std::string::npos);

  rk_edits_free(out);
  rk_edits_free(edits);
  rk_rules_free(rules);
  rk_kb_free(kb);
}

TEST_CASE("a callback oracle stands in for the graph") {
  TempDir dir;
  write_text(dir.file("kb.tsv"), "ignored\tfiller_rel\tignored2\n");  // aliases only
  write_text(dir.file("rules.txt"), "b1(z0,z1) & b2(z1,z2) -> h(z0,z2)\n");
  write_text(dir.file("edits.jsonl"),
             "{\"relation\":\"b1\",\"subject\":\"S\",\"old_object\":null,"
             "\"new_object\":\"N\"}\n");

  rk_kb* kb = nullptr;
  rk_rules* rules = nullptr;
  rk_edits* edits = nullptr;
  REQUIRE(rk_kb_load(dir.file("kb.tsv").c_str(), nullptr, &kb) == RK_OK);
  REQUIRE(rk_rules_load(dir.file("rules.txt").c_str(), &rules) == RK_OK);
  REQUIRE(rk_edits_load(dir.file("edits.jsonl").c_str(), &edits) == RK_OK);

  ScriptedWorld world;
  world.objects[{"N", "b2"}] = "Z";  // completes the chain after the edit
  rk_oracle_callbacks callbacks{scripted_object, scripted_subjects, &world};
  rk_oracle* oracle = nullptr;
  REQUIRE(rk_oracle_from_callbacks(&callbacks, &oracle) == RK_OK);

  rk_edits* out = nullptr;
  rk_augment_stats stats;
  REQUIRE(rk_augment(kb, rules, edits, oracle, nullptr, &out, &stats) == RK_OK);
  CHECK(stats.originals == 1);
  CHECK(stats.derived == 1);
  CHECK(world.object_calls > 0);
  REQUIRE(rk_edits_count(out) == 2);
  REQUIRE(rk_edits_save(out, dir.file("aug.jsonl").c_str()) == RK_OK);
  const std::string saved = read_text(dir.file("aug.jsonl"));
  CHECK(saved.find("\"relation\":\"h\"") != std::string::npos);
  CHECK(saved.find("\"new_object\":\"Z\"") != std::string::npos);
  rk_edits_free(out);
  rk_oracle_free(oracle);

  // An edit on the second body atom back-tracks; two candidate subjects trip
  // the ambiguity guard and the derivation is dropped.
  write_text(dir.file("edits2.jsonl"),
             "{\"relation\":\"b2\",\"subject\":\"N\",\"old_object\":null,"
             "\"new_object\":\"Z2\"}\n");
  rk_edits* edits2 = nullptr;
  REQUIRE(rk_edits_load(dir.file("edits2.jsonl").c_str(), &edits2) == RK_OK);
  world.subjects[{"b1", "N"}] = {"S", "S2"};
  REQUIRE(rk_oracle_from_callbacks(&callbacks, &oracle) == RK_OK);
  out = nullptr;
  REQUIRE(rk_augment(kb, rules, edits2, oracle, nullptr, &out, &stats) == RK_OK);
  CHECK(stats.derived == 0);
  CHECK(stats.ambiguous_inverses == 1);
  CHECK(world.subject_calls > 0);
  rk_edits_free(out);
  rk_oracle_free(oracle);

  rk_edits_free(edits2);
  rk_edits_free(edits);
  rk_rules_free(rules);
  rk_kb_free(kb);
}

TEST_CASE("benchmark generation and evaluation run through the C surface") {
  rk_kb* kb = nullptr;
  rk_rules* rules = nullptr;
  rk_templates* templates = nullptr;
  REQUIRE(rk_kb_load((kDataDir + "/kb_rke.tsv").c_str(), (kDataDir + "/aliases_rke.tsv").c_str(),
                     &kb) == RK_OK);
  REQUIRE(rk_rules_load((kDataDir + "/rules_rke.txt").c_str(), &rules) == RK_OK);
  REQUIRE(rk_templates_load((kDataDir + "/relations_rke.tsv").c_str(), &templates) == RK_OK);

  rk_generation_options gen;
  rk_generation_options_init(&gen);
  CHECK(gen.seed == 0);
  CHECK(gen.max_hops == 4);
  CHECK(gen.allow_ambiguous == 0);
  CHECK(gen.delta == 0.8);
  CHECK(gen.theta == 0.7);
  CHECK(gen.attempts_per_instance == 500);

  rk_dataset* dataset = nullptr;
  char* warnings = nullptr;
  REQUIRE(rk_dataset_generate(kb, rules, templates, 2, 2, 2, 2, &gen, &dataset, &warnings) ==
          RK_OK);
  CHECK(take(warnings).empty());
  REQUIRE(rk_dataset_count(dataset) == 8);

  char* stats_json = nullptr;
  REQUIRE(rk_dataset_stats_json(dataset, &stats_json) == RK_OK);
  CHECK(take(stats_json).find("\"total\": 8") != std::string::npos);

  TempDir dir;
  REQUIRE(rk_dataset_save(dataset, dir.file("ds.jsonl").c_str()) == RK_OK);
  rk_dataset* loaded = nullptr;
  REQUIRE(rk_dataset_load(dir.file("ds.jsonl").c_str(), &loaded) == RK_OK);
  CHECK(rk_dataset_count(loaded) == 8);
  REQUIRE(rk_dataset_save(loaded, dir.file("ds2.jsonl").c_str()) == RK_OK);
  CHECK(read_text(dir.file("ds.jsonl")) == read_text(dir.file("ds2.jsonl")));
  rk_dataset_free(loaded);

  rk_experiment_options eval;
  rk_experiment_options_init(&eval);
  CHECK(eval.batch == 0);
  CHECK(eval.augmented == 1);
  CHECK(eval.jobs == 1);
  eval.batch = 1;

  char* json = nullptr;
  char* csv = nullptr;
  REQUIRE(rk_evaluate(kb, rules, dataset, &eval, &json, &csv) == RK_OK);
  const std::string report = take(json);
  CHECK(report.find("\"overall_accuracy\": 1.0") != std::string::npos);
  CHECK(report.find("\"no-edit\": 1.0") != std::string::npos);
  CHECK(take(csv).find("batch,delta,theta") == 0);

  eval.augmented = 0;
  json = nullptr;
  REQUIRE(rk_evaluate(kb, rules, dataset, &eval, &json, nullptr) == RK_OK);
  CHECK(take(json).find("\"overall_accuracy\": 0.25") != std::string::npos);

  const double deltas[] = {0.8, 1.1};
  char* sweep = nullptr;
  REQUIRE(rk_sweep(kb, rules, dataset, deltas, 2, &eval, &sweep) == RK_OK);
  const std::string sweep_csv = take(sweep);
  CHECK(sweep_csv.find("delta,accuracy,growth_ratio\n") == 0);
  CHECK(sweep_csv.find("\n0.8,1,") != std::string::npos);       // augmented everywhere
  CHECK(sweep_csv.find("\n1.1,0.25,1\n") != std::string::npos); // degenerates to baseline

  rk_dataset_free(dataset);
  rk_templates_free(templates);
  rk_rules_free(rules);
  rk_kb_free(kb);
}

TEST_CASE("dataset parsing failures surface as parse status") {
  TempDir dir;
  write_text(dir.file("bad.jsonl"), "{broken\n");
  rk_dataset* dataset = nullptr;
  CHECK(rk_dataset_load(dir.file("bad.jsonl").c_str(), &dataset) == RK_ERR_PARSE);
  CHECK(std::string(rk_last_error()).find(":1") != std::string::npos);
}
