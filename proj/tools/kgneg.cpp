// Copyright 2026 The kgneg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: train, eval, stats, synth.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "kgneg/kgneg.hpp"

namespace {

namespace fs = std::filesystem;
using namespace kgneg;

// Flags of `train` that map onto config keys. Only flags given on the command
// line override the config file.
struct ConfigFlag {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr ConfigFlag kTrainFlags[] = {
    {"--data", "data", "dataset directory (train.txt, valid.txt, test.txt)"},
    {"--types", "types", "type file (default <data>/types.txt when present)"},
    {"--preset", "preset", "hyperparameter preset: none | freebase | wordnet"},
    {"--model", "model", "rescal | transe | distmult | complex"},
    {"--sampler", "sampler", "random | corrupt | typed | relational | nn | nmiss"},
    {"--num-negatives", "num_negatives", "negatives per positive per side; comma list runs a grid"},
    {"--dim", "dim", "embedding dimension"},
    {"--lr", "lr", "Adam learning rate"},
    {"--l2", "l2", "L2 coefficient"},
    {"--margin", "margin", "hinge margin"},
    {"--seed", "seed", "random seed"},
    {"--frozen", "frozen", "checkpoint of the frozen negative-sampling model (nn, nmiss)"},
    {"--init", "init", "starting checkpoint for nn / nmiss fine-tuning"},
    {"--out", "out", "output directory"},
    {"--batch-size", "batch_size", "positives per batch"},
    {"--epochs", "max_epochs", "maximum training epochs"},
    {"--patience", "patience", "dev evaluations without improvement before stopping"},
    {"--eval-every", "eval_every", "epochs between dev evaluations"},
    {"--fine-tune-epochs", "fine_tune_epochs", "epochs of nn / nmiss fine-tuning"},
    {"--dev-eval-limit", "dev_eval_limit", "dev triples scored per evaluation (0 = all)"},
    {"--threads", "threads", "evaluation threads (0 = hardware)"},
    {"--hits", "hits", "hits@K cut-offs, comma list"},
    {"--comparator", "comparator", "hits comparator: strict | inclusive"},
};

int run_train(const std::string& config_path, const std::vector<std::pair<const ConfigFlag*, CLI::Option*>>& flags,
              const std::vector<std::string>& values, bool quiet) {
  ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i].second->count() > 0) apply_setting(cfg, flags[i].first->key, values[i]);
  }
  const auto outcome = run_experiment(cfg, quiet ? nullptr : &std::cerr);
  {
    std::ofstream saved(fs::path(cfg.out) / "config.txt");
    saved << serialize_config(cfg);
  }
  for (const auto& r : outcome.reports) {
    std::cout << r.model << ' ' << r.sampler << " n_s=" << r.n_s << " test mrr=" << std::setprecision(6)
              << r.metrics.mrr;
    for (const auto& [k, v] : r.metrics.hits) std::cout << " hits@" << k << '=' << v;
    std::cout << '\n';
  }
  std::cout << "reports written to " << cfg.out << '\n';
  return 0;
}

std::vector<std::size_t> parse_list(const std::string& text) {
  ExperimentConfig tmp;
  apply_setting(tmp, "hits", text);
  return tmp.hits;
}

int run_eval(const std::string& ckpt, const std::string& data, const std::string& hits, const std::string& comparator,
             const std::string& split_name, std::size_t threads, const std::string& out) {
  const auto params = load_checkpoint(ckpt);
  const auto store = load_dataset(data);
  if (params.num_entities != store.num_entities() || params.num_relations != store.num_relations()) {
    throw Error("checkpoint has " + std::to_string(params.num_entities) + " entities / " +
                std::to_string(params.num_relations) + " relations, dataset has " +
                std::to_string(store.num_entities()) + " / " + std::to_string(store.num_relations()));
  }
  const auto split = parse_split(split_name);
  if (!split) throw ConfigError("unknown split '" + split_name + "'");
  const auto cmp = parse_comparator(comparator);
  if (!cmp) throw ConfigError("unknown comparator '" + comparator + "'");
  EvalOptions opts;
  opts.ks = parse_list(hits);
  opts.comparator = *cmp;
  opts.threads = threads;
  const auto stats = compute_stats(store);
  auto report = evaluate(params, store, *split, stats, opts);

  std::cout << std::setprecision(6) << "model=" << family_name(params.family) << " split=" << split_name
            << " triples=" << report.n_evaluated << " comparator=" << comparator_name(*cmp) << '\n';
  std::cout << "mrr=" << report.mrr;
  for (const auto& [k, v] : report.hits) std::cout << " hits@" << k << '=' << v;
  std::cout << '\n';
  for (const auto& [g, m] : report.per_slice) {
    std::cout << "  " << slice_label(g) << " ranks=" << m.n_ranks << " mrr=" << m.mrr;
    for (const auto& [k, v] : m.hits) std::cout << " hits@" << k << '=' << v;
    std::cout << '\n';
  }
  if (!out.empty()) {
    report.rankings.clear();
    emit_report({ExperimentReport{family_name(params.family), "eval", 0, split_name, 0, report}}, out);
  }
  return 0;
}

int run_stats(const std::string& data, const std::string& out) {
  const auto store = load_dataset(data);
  const auto stats = compute_stats(store);
  std::cout << "entities " << store.num_entities() << '\n'
            << "relations " << store.num_relations() << '\n'
            << "train " << store.train().size() << '\n'
            << "dev " << store.dev().size() << '\n'
            << "test " << store.test().size() << '\n'
            << "average_degree " << std::setprecision(6) << stats.average_degree() << '\n';
  for (const auto& [g, rels] : stats.oom_groups) std::cout << slice_label(g) << ' ' << rels.size() << '\n';
  if (!out.empty()) {
    export_stats(out, stats, store);
    std::cout << "statistics written to " << out << '\n';
  }
  return 0;
}

int run_synth(const std::string& out, std::uint64_t seed) {
  SyntheticConfig cfg;
  cfg.seed = seed;
  const auto kg = generate_synthetic_kg(cfg);
  save_dataset(out, kg.store);
  write_type_catalog(fs::path(out) / "types.txt", kg.catalog, kg.store);
  std::cout << "synthetic KG: " << kg.store.num_entities() << " entities, " << kg.store.num_relations()
            << " relations, " << kg.store.train().size() << '/' << kg.store.dev().size() << '/'
            << kg.store.test().size() << " train/dev/test triples in " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-graph embedding training with pluggable negative sampling"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "train one model per n_s and evaluate it on the test split");
  std::string config_path;
  bool quiet = false;
  train->add_option("--config", config_path, "key=value config file; explicit flags override it")
      ->check(CLI::ExistingFile);
  train->add_flag("--quiet", quiet, "suppress per-epoch progress");
  std::vector<std::string> values(std::size(kTrainFlags));
  std::vector<std::pair<const ConfigFlag*, CLI::Option*>> flags;
  for (std::size_t i = 0; i < std::size(kTrainFlags); ++i) {
    flags.emplace_back(&kTrainFlags[i], train->add_option(kTrainFlags[i].flag, values[i], kTrainFlags[i].help));
  }

  auto* eval = app.add_subcommand("eval", "filtered link-prediction metrics for a checkpoint");
  std::string ckpt, eval_data, hits = "1,10", comparator = "inclusive", split = "test", eval_out;
  std::size_t threads = 0;
  eval->add_option("--ckpt", ckpt, "model checkpoint")->required()->check(CLI::ExistingFile);
  eval->add_option("--data", eval_data, "dataset directory")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--hits", hits, "hits@K cut-offs, comma list")->capture_default_str();
  eval->add_option("--comparator", comparator, "strict | inclusive")->capture_default_str();
  eval->add_option("--split", split, "train | dev | test")->capture_default_str();
  eval->add_option("--threads", threads, "worker threads (0 = hardware)");
  eval->add_option("--out", eval_out, "write metrics.csv / slices.csv here");

  auto* stats = app.add_subcommand("stats", "dataset sizes, average degree and relation-frequency groups");
  std::string stats_data, stats_out;
  stats->add_option("--data", stats_data, "dataset directory")->required()->check(CLI::ExistingDirectory);
  stats->add_option("--out", stats_out, "write relation_stats.csv / entity_degree.csv here");

  auto* synth = app.add_subcommand("synth", "write the synthetic typed benchmark KG");
  std::string synth_out;
  std::uint64_t synth_seed = 7;
  synth->add_option("--out", synth_out, "output dataset directory")->required();
  synth->add_option("--seed", synth_seed, "generator seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*train) return run_train(config_path, flags, values, quiet);
    if (*eval) return run_eval(ckpt, eval_data, hits, comparator, split, threads, eval_out);
    if (*stats) return run_stats(stats_data, stats_out);
    if (*synth) return run_synth(synth_out, synth_seed);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 1;
}
