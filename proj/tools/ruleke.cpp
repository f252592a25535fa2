// Command-line front end over the C interface. Subcommands cover the whole
// pipeline: ingest, mine, augment, gen-bench, eval, sweep, stats. Every
// fallible step goes through ruleke.h; this file owns only flag plumbing.
//
// Exit codes: 0 success, 1 usage error, 2 data error. Progress goes to
// standard error; machine output goes to files or standard output.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ruleke.h"

namespace {

struct KbDeleter {
  void operator()(rk_kb* p) const { rk_kb_free(p); }
};
struct RulesDeleter {
  void operator()(rk_rules* p) const { rk_rules_free(p); }
};
struct EditsDeleter {
  void operator()(rk_edits* p) const { rk_edits_free(p); }
};
struct TemplatesDeleter {
  void operator()(rk_templates* p) const { rk_templates_free(p); }
};
struct DatasetDeleter {
  void operator()(rk_dataset* p) const { rk_dataset_free(p); }
};

using KbPtr = std::unique_ptr<rk_kb, KbDeleter>;
using RulesPtr = std::unique_ptr<rk_rules, RulesDeleter>;
using EditsPtr = std::unique_ptr<rk_edits, EditsDeleter>;
using TemplatesPtr = std::unique_ptr<rk_templates, TemplatesDeleter>;
using DatasetPtr = std::unique_ptr<rk_dataset, DatasetDeleter>;

std::string take(char* s) {
  std::string out = s == nullptr ? std::string{} : std::string(s);
  rk_string_free(s);
  return out;
}

// Data-layer failure: report and signal exit 2 to the caller.
int fail_data(const std::string& what) {
  std::fprintf(stderr, "error: %s: %s\n", what.c_str(), rk_last_error());
  return 2;
}

int fail_usage(const std::string& message) {
  std::fprintf(stderr, "error: %s\n", message.c_str());
  return 1;
}

KbPtr load_kb(const std::string& kb_path, const std::string& aliases_path, int& rc) {
  rk_kb* kb = nullptr;
  if (rk_kb_load(kb_path.c_str(), aliases_path.empty() ? nullptr : aliases_path.c_str(), &kb) !=
      RK_OK) {
    rc = fail_data("loading knowledge base " + kb_path);
    return nullptr;
  }
  std::fprintf(stderr, "loaded %zu facts, %zu entities, %zu relations from %s\n",
               rk_kb_fact_count(kb), rk_kb_entity_count(kb), rk_kb_relation_count(kb),
               kb_path.c_str());
  return KbPtr(kb);
}

RulesPtr load_rules_file(const std::string& path, int& rc) {
  rk_rules* rules = nullptr;
  if (rk_rules_load(path.c_str(), &rules) != RK_OK) {
    rc = fail_data("loading rules " + path);
    return nullptr;
  }
  std::fprintf(stderr, "loaded %zu rules from %s\n", rk_rules_count(rules), path.c_str());
  return RulesPtr(rules);
}

DatasetPtr load_dataset_file(const std::string& path, int& rc) {
  rk_dataset* ds = nullptr;
  if (rk_dataset_load(path.c_str(), &ds) != RK_OK) {
    rc = fail_data("loading dataset " + path);
    return nullptr;
  }
  std::fprintf(stderr, "loaded %zu instances from %s\n", rk_dataset_count(ds), path.c_str());
  return DatasetPtr(ds);
}

int write_file_or_fail(const std::string& path, const std::string& content,
                       const std::string& what) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.flush();
  if (!out) {
    std::fprintf(stderr, "error: writing %s to %s\n", what.c_str(), path.c_str());
    return 2;
  }
  return 0;
}

// "all" or a non-negative integer; 0 means all instances in one batch.
bool parse_batch(const std::string& text, size_t& out) {
  if (text == "all") {
    out = 0;
    return true;
  }
  try {
    size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) return false;
    out = static_cast<size_t>(v);
    return true;
  } catch (...) {
    return false;
  }
}

// RULEKE_SEED replaces the built-in default; an explicit --seed or config
// value still wins. Malformed values are usage errors.
bool apply_env_seed(const CLI::Option* seed_opt, uint64_t& seed, int& rc) {
  if (seed_opt->count() > 0) return true;
  const char* env = std::getenv("RULEKE_SEED");
  if (env == nullptr) return true;
  const std::string text(env);
  try {
    size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    seed = static_cast<uint64_t>(v);
    return true;
  } catch (...) {
    rc = fail_usage("RULEKE_SEED is not an unsigned integer: '" + text + "'");
    return false;
  }
}

// Re-indents a pretty-printed JSON document to sit inside a wrapper object.
std::string nest_json(const std::string& doc) {
  std::string body = doc;
  while (!body.empty() && body.back() == '\n') body.pop_back();
  std::string out;
  for (size_t i = 0; i < body.size(); ++i) {
    out += body[i];
    if (body[i] == '\n') out += "  ";
  }
  return out;
}

// Rows of a CSV document without its header line.
std::string csv_rows(const std::string& csv) {
  const size_t eol = csv.find('\n');
  return eol == std::string::npos ? std::string{} : csv.substr(eol + 1);
}

std::string trimmed(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  const size_t e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

// Expands a per-subcommand `--config file` of key=value lines into regular
// tokens spliced in right after the subcommand name. Keys whose flag also
// appears explicitly are dropped, so the command line wins. Unknown keys
// surface as ordinary parse errors.
bool expand_config(std::vector<std::string>& tokens, size_t sub_index, std::string& error) {
  size_t config_at = tokens.size();
  std::string path;
  for (size_t i = sub_index + 1; i < tokens.size(); ++i) {
    if (tokens[i] == "--config") {
      if (i + 1 >= tokens.size()) {
        error = "--config needs a file path";
        return false;
      }
      config_at = i;
      path = tokens[i + 1];
      tokens.erase(tokens.begin() + static_cast<long>(i), tokens.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (tokens[i].rfind("--config=", 0) == 0) {
      config_at = i;
      path = tokens[i].substr(9);
      tokens.erase(tokens.begin() + static_cast<long>(i));
      break;
    }
  }
  if (config_at == tokens.size() && path.empty()) return true;

  std::ifstream in(path);
  if (!in) {
    error = "cannot open config file " + path;
    return false;
  }
  std::vector<std::string> injected;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trimmed(line);
    if (text.empty() || text[0] == '#' || text[0] == ';') continue;
    const size_t eq = text.find('=');
    if (eq == std::string::npos || trimmed(text.substr(0, eq)).empty()) {
      error = path + ":" + std::to_string(line_no) + ": expected key=value, got '" + text + "'";
      return false;
    }
    const std::string key = trimmed(text.substr(0, eq));
    std::string value = trimmed(text.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    const std::string flag = "--" + key;
    bool explicit_too = false;
    for (size_t i = sub_index + 1; i < tokens.size(); ++i)
      if (tokens[i] == flag || tokens[i].rfind(flag + "=", 0) == 0) {
        explicit_too = true;
        break;
      }
    if (!explicit_too) injected.push_back(flag + "=" + value);
  }
  tokens.insert(tokens.begin() + static_cast<long>(sub_index) + 1, injected.begin(),
                injected.end());
  return true;
}

void add_config_flag(CLI::App* cmd) {
  static std::string sink;
  cmd->add_option("--config", sink, "Defaults file of key=value lines; explicit flags win");
}

struct CommonEvalFlags {
  std::string dataset_path;
  std::string kb_path;
  std::string aliases_path;
  std::string rules_path;
  std::string batch_text = "all";
  double delta = 0.8;
  double theta = 0.7;
  uint64_t seed = 0;
  bool fixpoint = false;
  size_t jobs = 0;  // 0 = available cores
};

void add_common_eval_flags(CLI::App* cmd, CommonEvalFlags& f) {
  cmd->add_option("--dataset", f.dataset_path, "Benchmark instances, one JSON per line")
      ->required();
  cmd->add_option("--kb", f.kb_path, "Knowledge triples TSV")->required();
  cmd->add_option("--aliases", f.aliases_path, "Entity alias TSV");
  cmd->add_option("--rules", f.rules_path, "Rule file")->required();
  cmd->add_option("--batch", f.batch_text, "Edits per shared memory: a count or 'all'")
      ->capture_default_str();
  cmd->add_option("--delta", f.delta, "Rule activation threshold")->capture_default_str();
  cmd->add_option("--theta", f.theta, "Retrieval similarity threshold")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Batch shuffle seed")->capture_default_str();
  cmd->add_flag("--fixpoint", f.fixpoint, "Rescan derived edits until closure");
  cmd->add_option("--jobs", f.jobs, "Parallel batches; 0 uses all cores")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rule-based knowledge editing pipeline"};
  app.set_version_flag("--version", rk_version());
  app.require_subcommand(1);

  // ---- ingest ----
  struct {
    std::string kb_path, aliases_path, out_path;
  } ingest;
  CLI::App* ingest_cmd =
      app.add_subcommand("ingest", "Load and validate a knowledge base, print its stats");
  add_config_flag(ingest_cmd);
  ingest_cmd->add_option("--kb", ingest.kb_path, "Knowledge triples TSV")->required();
  ingest_cmd->add_option("--aliases", ingest.aliases_path, "Entity alias TSV");
  ingest_cmd->add_option("--out", ingest.out_path, "Write the normalized triples here");

  // ---- mine ----
  struct {
    std::string kb_path, aliases_path, out_path;
    size_t min_support = 2;
    double min_confidence = 0.5;
    size_t jobs = 0;
  } mine;
  CLI::App* mine_cmd = app.add_subcommand("mine", "Mine composition rules from a knowledge base");
  add_config_flag(mine_cmd);
  mine_cmd->add_option("--kb", mine.kb_path, "Knowledge triples TSV")->required();
  mine_cmd->add_option("--aliases", mine.aliases_path, "Entity alias TSV");
  mine_cmd->add_option("--out", mine.out_path, "Rule output file")->required();
  mine_cmd->add_option("--min-support", mine.min_support, "Minimum body groundings")
      ->capture_default_str();
  mine_cmd->add_option("--min-confidence", mine.min_confidence, "Minimum rule confidence")
      ->capture_default_str();
  mine_cmd->add_option("--jobs", mine.jobs, "Mining threads; 0 uses all cores")
      ->capture_default_str();

  // ---- augment ----
  struct {
    std::string kb_path, aliases_path, rules_path, edits_path, out_path;
    double delta = 0.8;
    double theta = 0.7;
    bool fixpoint = false;
    size_t max_rounds = 10;
  } augment;
  CLI::App* augment_cmd =
      app.add_subcommand("augment", "Derive correlated edits for an edit set");
  add_config_flag(augment_cmd);
  augment_cmd->add_option("--kb", augment.kb_path, "Knowledge triples TSV")->required();
  augment_cmd->add_option("--aliases", augment.aliases_path, "Entity alias TSV");
  augment_cmd->add_option("--rules", augment.rules_path, "Rule file")->required();
  augment_cmd->add_option("--edits", augment.edits_path, "Edits, one JSON per line")->required();
  augment_cmd->add_option("--out", augment.out_path, "Augmented edits output")->required();
  augment_cmd->add_option("--delta", augment.delta, "Rule activation threshold")
      ->capture_default_str();
  augment_cmd->add_option("--theta", augment.theta, "Retrieval similarity threshold")
      ->capture_default_str();
  augment_cmd->add_flag("--fixpoint", augment.fixpoint, "Rescan derived edits until closure");
  augment_cmd->add_option("--max-rounds", augment.max_rounds, "Extra fixpoint passes allowed")
      ->capture_default_str();

  // ---- gen-bench ----
  struct {
    std::string kb_path, aliases_path, rules_path, templates_path, out_path;
    std::vector<size_t> counts{50, 50, 50, 50};
    uint64_t seed = 0;
    size_t max_hops = 4;
    bool allow_ambiguous = false;
    double delta = 0.8;
    double theta = 0.7;
    size_t attempts = 500;
  } gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-bench", "Generate a four-scenario benchmark");
  add_config_flag(gen_cmd);
  gen_cmd->add_option("--kb", gen.kb_path, "Knowledge triples TSV")->required();
  gen_cmd->add_option("--aliases", gen.aliases_path, "Entity alias TSV");
  gen_cmd->add_option("--rules", gen.rules_path, "Rule file")->required();
  gen_cmd->add_option("--templates", gen.templates_path, "Relation template TSV")->required();
  gen_cmd->add_option("--out", gen.out_path, "Dataset output, one JSON per line")->required();
  gen_cmd
      ->add_option("--counts", gen.counts,
                   "Instances per scenario: no-edit,left-edit,right-edit,both-edit")
      ->delimiter(',')
      ->capture_default_str();
  CLI::Option* gen_seed_opt =
      gen_cmd->add_option("--seed", gen.seed, "Generation seed")->capture_default_str();
  gen_cmd->add_option("--max-hops", gen.max_hops, "Questions cycle 2..max-hops")
      ->capture_default_str();
  gen_cmd->add_flag("--allow-ambiguous", gen.allow_ambiguous,
                    "Place right edits on many-to-1 inverses");
  gen_cmd->add_option("--delta", gen.delta, "Rule activation threshold")->capture_default_str();
  gen_cmd->add_option("--theta", gen.theta, "Retrieval similarity threshold")
      ->capture_default_str();
  gen_cmd->add_option("--attempts", gen.attempts, "Draw attempts per instance")
      ->capture_default_str();

  // ---- eval ----
  CommonEvalFlags eval;
  bool eval_no_augment = false;
  bool eval_compare = false;
  bool eval_timings = false;
  std::string eval_report_path;
  std::string eval_csv_path;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Run the batched editing experiment");
  add_config_flag(eval_cmd);
  add_common_eval_flags(eval_cmd, eval);
  CLI::Option* eval_seed_opt = eval_cmd->get_option("--seed");
  eval_cmd->add_flag("--no-augment", eval_no_augment, "Solve against raw edits only");
  eval_cmd->add_flag("--compare", eval_compare, "Report baseline and augmented side by side");
  eval_cmd->add_flag("--timings", eval_timings,
                     "Record wall time (makes reports run-dependent)");
  eval_cmd->add_option("--report", eval_report_path, "Write the JSON report here");
  eval_cmd->add_option("--csv", eval_csv_path, "Write the CSV report here");

  // ---- sweep ----
  CommonEvalFlags sweep;
  std::vector<double> sweep_deltas{0.0, 0.4, 0.8, 1.0, 1.1};
  std::string sweep_csv_path;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Evaluate augmented accuracy across activation thresholds");
  add_config_flag(sweep_cmd);
  add_common_eval_flags(sweep_cmd, sweep);
  CLI::Option* sweep_seed_opt = sweep_cmd->get_option("--seed");
  sweep_cmd->get_option("--delta")->description("Ignored; the sweep sets it per run");
  sweep_cmd->add_option("--deltas", sweep_deltas, "Activation thresholds to sweep")
      ->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_option("--csv", sweep_csv_path, "Write the sweep CSV here");

  // ---- stats ----
  std::string stats_dataset_path;
  CLI::App* stats_cmd = app.add_subcommand("stats", "Per-scenario, per-hop dataset counts");
  add_config_flag(stats_cmd);
  stats_cmd->add_option("--dataset", stats_dataset_path, "Benchmark instances file")->required();

  std::vector<std::string> tokens(argv, argv + argc);
  static const std::vector<std::string> kSubNames = {"ingest", "mine",  "augment", "gen-bench",
                                                     "eval",   "sweep", "stats"};
  size_t sub_index = tokens.size();
  for (size_t i = 1; i < tokens.size() && sub_index == tokens.size(); ++i)
    for (const std::string& name : kSubNames)
      if (tokens[i] == name) sub_index = i;
  if (sub_index < tokens.size()) {
    std::string error;
    if (!expand_config(tokens, sub_index, error)) return fail_usage(error);
  }
  std::vector<const char*> parse_argv;
  parse_argv.reserve(tokens.size());
  for (const std::string& t : tokens) parse_argv.push_back(t.c_str());

  try {
    app.parse(static_cast<int>(parse_argv.size()), parse_argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  int rc = 0;

  if (app.got_subcommand(ingest_cmd)) {
    const KbPtr kb = load_kb(ingest.kb_path, ingest.aliases_path, rc);
    if (!kb) return rc;
    if (!ingest.out_path.empty()) {
      if (rk_kb_save(kb.get(), ingest.out_path.c_str()) != RK_OK)
        return fail_data("saving knowledge base to " + ingest.out_path);
      std::fprintf(stderr, "wrote normalized triples to %s\n", ingest.out_path.c_str());
    }
    std::printf("{\"facts\": %zu, \"entities\": %zu, \"relations\": %zu}\n",
                rk_kb_fact_count(kb.get()), rk_kb_entity_count(kb.get()),
                rk_kb_relation_count(kb.get()));
    return 0;
  }

  if (app.got_subcommand(mine_cmd)) {
    const KbPtr kb = load_kb(mine.kb_path, mine.aliases_path, rc);
    if (!kb) return rc;
    rk_rules* mined = nullptr;
    if (rk_rules_mine(kb.get(), mine.min_support, mine.min_confidence, mine.jobs, &mined) !=
        RK_OK)
      return fail_data("mining rules");
    const RulesPtr rules(mined);
    if (rk_rules_save(rules.get(), mine.out_path.c_str()) != RK_OK)
      return fail_data("saving rules to " + mine.out_path);
    std::fprintf(stderr, "mined %zu rules into %s\n", rk_rules_count(rules.get()),
                 mine.out_path.c_str());
    return 0;
  }

  if (app.got_subcommand(augment_cmd)) {
    const KbPtr kb = load_kb(augment.kb_path, augment.aliases_path, rc);
    if (!kb) return rc;
    const RulesPtr rules = load_rules_file(augment.rules_path, rc);
    if (!rules) return rc;
    rk_edits* loaded = nullptr;
    if (rk_edits_load(augment.edits_path.c_str(), &loaded) != RK_OK)
      return fail_data("loading edits " + augment.edits_path);
    const EditsPtr edits(loaded);

    rk_augment_options opts;
    rk_augment_options_init(&opts);
    opts.delta = augment.delta;
    opts.theta = augment.theta;
    opts.fixpoint = augment.fixpoint ? 1 : 0;
    opts.max_rounds = augment.max_rounds;

    rk_edits* out = nullptr;
    rk_augment_stats stats;
    if (rk_augment(kb.get(), rules.get(), edits.get(), nullptr, &opts, &out, &stats) != RK_OK)
      return fail_data("augmenting edits");
    const EditsPtr augmented(out);
    if (rk_edits_save(augmented.get(), augment.out_path.c_str()) != RK_OK)
      return fail_data("saving augmented edits to " + augment.out_path);
    std::fprintf(stderr, "augmented %zu edits to %zu (+%zu derived) into %s\n", stats.originals,
                 rk_edits_count(augmented.get()), stats.derived, augment.out_path.c_str());
    std::printf(
        "{\"originals\": %zu, \"derived\": %zu, \"growth_ratio\": %g, \"oracle_misses\": %zu, "
        "\"ambiguous_inverses\": %zu, \"empties\": %zu, \"conflicts\": %zu, \"rounds\": %zu}\n",
        stats.originals, stats.derived, stats.growth_ratio, stats.oracle_misses,
        stats.ambiguous_inverses, stats.empties, stats.conflicts, stats.rounds);
    return 0;
  }

  if (app.got_subcommand(gen_cmd)) {
    if (gen.counts.size() != 4)
      return fail_usage("--counts needs exactly four values, got " +
                        std::to_string(gen.counts.size()));
    if (!apply_env_seed(gen_seed_opt, gen.seed, rc)) return rc;
    const KbPtr kb = load_kb(gen.kb_path, gen.aliases_path, rc);
    if (!kb) return rc;
    const RulesPtr rules = load_rules_file(gen.rules_path, rc);
    if (!rules) return rc;
    rk_templates* loaded = nullptr;
    if (rk_templates_load(gen.templates_path.c_str(), &loaded) != RK_OK)
      return fail_data("loading templates " + gen.templates_path);
    const TemplatesPtr templates(loaded);

    rk_generation_options opts;
    rk_generation_options_init(&opts);
    opts.seed = gen.seed;
    opts.max_hops = gen.max_hops;
    opts.allow_ambiguous = gen.allow_ambiguous ? 1 : 0;
    opts.delta = gen.delta;
    opts.theta = gen.theta;
    opts.attempts_per_instance = gen.attempts;

    rk_dataset* out = nullptr;
    char* warnings = nullptr;
    if (rk_dataset_generate(kb.get(), rules.get(), templates.get(), gen.counts[0], gen.counts[1],
                            gen.counts[2], gen.counts[3], &opts, &out, &warnings) != RK_OK)
      return fail_data("generating benchmark");
    const DatasetPtr dataset(out);
    const std::string warn_text = take(warnings);
    if (!warn_text.empty()) std::fprintf(stderr, "warning: %s\n", warn_text.c_str());
    if (rk_dataset_save(dataset.get(), gen.out_path.c_str()) != RK_OK)
      return fail_data("saving dataset to " + gen.out_path);
    std::fprintf(stderr, "generated %zu instances into %s\n", rk_dataset_count(dataset.get()),
                 gen.out_path.c_str());
    char* stats_json = nullptr;
    if (rk_dataset_stats_json(dataset.get(), &stats_json) != RK_OK)
      return fail_data("computing dataset stats");
    std::fputs(take(stats_json).c_str(), stdout);
    return 0;
  }

  if (app.got_subcommand(eval_cmd) || app.got_subcommand(sweep_cmd)) {
    const bool is_eval = app.got_subcommand(eval_cmd);
    CommonEvalFlags& f = is_eval ? eval : sweep;
    if (!apply_env_seed(is_eval ? eval_seed_opt : sweep_seed_opt, f.seed, rc)) return rc;
    size_t batch = 0;
    if (!parse_batch(f.batch_text, batch))
      return fail_usage("--batch needs a count or 'all', got '" + f.batch_text + "'");

    const KbPtr kb = load_kb(f.kb_path, f.aliases_path, rc);
    if (!kb) return rc;
    const RulesPtr rules = load_rules_file(f.rules_path, rc);
    if (!rules) return rc;
    const DatasetPtr dataset = load_dataset_file(f.dataset_path, rc);
    if (!dataset) return rc;

    rk_experiment_options opts;
    rk_experiment_options_init(&opts);
    opts.batch = batch;
    opts.delta = f.delta;
    opts.theta = f.theta;
    opts.fixpoint = f.fixpoint ? 1 : 0;
    opts.seed = f.seed;
    opts.jobs = f.jobs;

    if (!is_eval) {
      char* csv = nullptr;
      if (rk_sweep(kb.get(), rules.get(), dataset.get(), sweep_deltas.data(),
                   sweep_deltas.size(), &opts, &csv) != RK_OK)
        return fail_data("sweeping thresholds");
      const std::string text = take(csv);
      std::fprintf(stderr, "swept %zu thresholds\n", sweep_deltas.size());
      if (!sweep_csv_path.empty())
        return write_file_or_fail(sweep_csv_path, text, "sweep CSV");
      std::fputs(text.c_str(), stdout);
      return 0;
    }

    opts.timings = eval_timings ? 1 : 0;
    std::string json_doc;
    std::string csv_doc;
    if (eval_compare) {
      char* base_json = nullptr;
      char* base_csv = nullptr;
      char* aug_json = nullptr;
      char* aug_csv = nullptr;
      opts.augmented = 0;
      if (rk_evaluate(kb.get(), rules.get(), dataset.get(), &opts, &base_json, &base_csv) !=
          RK_OK)
        return fail_data("evaluating baseline");
      opts.augmented = 1;
      if (rk_evaluate(kb.get(), rules.get(), dataset.get(), &opts, &aug_json, &aug_csv) !=
          RK_OK) {
        rk_string_free(base_json);
        rk_string_free(base_csv);
        return fail_data("evaluating augmented run");
      }
      json_doc = "{\n  \"baseline\": " + nest_json(take(base_json)) + ",\n  \"augmented\": " +
                 nest_json(take(aug_json)) + "\n}\n";
      const std::string base_csv_text = take(base_csv);
      csv_doc = base_csv_text + csv_rows(take(aug_csv));
    } else {
      opts.augmented = eval_no_augment ? 0 : 1;
      char* json = nullptr;
      char* csv = nullptr;
      if (rk_evaluate(kb.get(), rules.get(), dataset.get(), &opts, &json, &csv) != RK_OK)
        return fail_data("evaluating");
      json_doc = take(json);
      csv_doc = take(csv);
    }
    std::fprintf(stderr, "evaluated %zu instances\n", rk_dataset_count(dataset.get()));
    if (!eval_csv_path.empty()) {
      if (int code = write_file_or_fail(eval_csv_path, csv_doc, "CSV report")) return code;
    }
    if (!eval_report_path.empty())
      return write_file_or_fail(eval_report_path, json_doc, "JSON report");
    std::fputs(json_doc.c_str(), stdout);
    return 0;
  }

  if (app.got_subcommand(stats_cmd)) {
    const DatasetPtr dataset = load_dataset_file(stats_dataset_path, rc);
    if (!dataset) return rc;
    char* stats_json = nullptr;
    if (rk_dataset_stats_json(dataset.get(), &stats_json) != RK_OK)
      return fail_data("computing dataset stats");
    std::fputs(take(stats_json).c_str(), stdout);
    return 0;
  }

  return fail_usage("no subcommand given");
}
