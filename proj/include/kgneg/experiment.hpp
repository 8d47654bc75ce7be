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

#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "kgneg/checkpoint.hpp"
#include "kgneg/dataset_stats.hpp"
#include "kgneg/error.hpp"
#include "kgneg/evaluator.hpp"
#include "kgneg/model.hpp"
#include "kgneg/samplers.hpp"
#include "kgneg/trainer.hpp"
#include "kgneg/triple_store.hpp"
#include "kgneg/type_catalog.hpp"

namespace kgneg {

enum class DatasetPreset : std::uint8_t { kNone, kFreebase, kWordnet };

inline const char* preset_name(DatasetPreset p) {
  switch (p) {
    case DatasetPreset::kNone: return "none";
    case DatasetPreset::kFreebase: return "freebase";
    case DatasetPreset::kWordnet: return "wordnet";
  }
  return "?";
}

inline std::optional<DatasetPreset> parse_preset(std::string_view s) {
  if (s == "none") return DatasetPreset::kNone;
  if (s == "freebase" || s == "fb15k") return DatasetPreset::kFreebase;
  if (s == "wordnet" || s == "wn18") return DatasetPreset::kWordnet;
  return std::nullopt;
}

struct Hyperparameters {
  double lr;
  double l2_lambda;
};

// Published per-dataset learning rates and L2 coefficients. Wordnet rates
// depend on whether n_s is below 10.
inline std::optional<Hyperparameters> preset_hyperparameters(DatasetPreset preset, Family family, std::size_t n_s) {
  switch (preset) {
    case DatasetPreset::kNone: return std::nullopt;
    case DatasetPreset::kFreebase:
      switch (family) {
        case Family::kComplEx: return Hyperparameters{0.001, 1.31e-06};
        case Family::kDistMult: return Hyperparameters{0.001, 4.93e-06};
        case Family::kRescal: return Hyperparameters{0.001, 0.0002084};
        case Family::kTransE: return Hyperparameters{0.001, 0.00024036};
      }
      break;
    case DatasetPreset::kWordnet: {
      const double lr = n_s < 10 ? 0.005 : 0.01;
      switch (family) {
        case Family::kComplEx: return Hyperparameters{lr, 2.82e-05};
        case Family::kDistMult: return Hyperparameters{lr, 3.12e-06};
        case Family::kRescal: return Hyperparameters{lr, 7.48e-05};
        case Family::kTransE: return Hyperparameters{lr, 0.0001863777692};
      }
      break;
    }
  }
  return std::nullopt;
}

inline constexpr double kDefaultLearningRate = 0.001;

struct ExperimentConfig {
  std::string data;
  std::string types;  // empty: <data>/types.txt when present
  DatasetPreset preset = DatasetPreset::kNone;
  Family model = Family::kDistMult;
  SamplerKind sampler = SamplerKind::kRandom;
  std::vector<std::size_t> ns_grid{1, 2, 5, 10, 20, 50, 100};
  std::size_t dim = 100;
  std::optional<double> lr;
  std::optional<double> l2;
  double margin = 1.0;
  std::uint64_t seed = 0;
  std::string frozen;  // checkpoint of the negative-sampling model
  std::string init;    // starting checkpoint for nn / nmiss fine-tuning
  std::string out = "runs";
  std::size_t batch_size = 512;
  std::size_t max_epochs = 100;
  std::size_t patience = 3;
  std::size_t eval_every = 1;
  std::size_t fine_tune_epochs = 5;
  std::size_t dev_eval_limit = 1000;
  std::size_t threads = 0;
  std::vector<std::size_t> hits{1, 10};
  HitsComparator comparator = HitsComparator::kInclusive;

  bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("invalid value for " + std::string(key) + ": '" + std::string(text) + "'");
  }
  return v;
}

inline std::vector<std::size_t> parse_size_list(std::string_view key, std::string_view text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto pos = text.find(',', start);
    if (pos == std::string_view::npos) pos = text.size();
    const auto item = trim(text.substr(start, pos - start));
    if (item.empty()) throw ConfigError("empty item in list for " + std::string(key));
    out.push_back(parse_number<std::size_t>(key, item));
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

// Flat key=value form, one key per line in a fixed order; unset optional
// values are omitted.
inline std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "data=" << c.data << '\n';
  if (!c.types.empty()) out << "types=" << c.types << '\n';
  out << "preset=" << preset_name(c.preset) << '\n';
  out << "model=" << family_name(c.model) << '\n';
  out << "sampler=" << sampler_name(c.sampler) << '\n';
  out << "num_negatives=" << detail::join_sizes(c.ns_grid) << '\n';
  out << "dim=" << c.dim << '\n';
  if (c.lr) out << "lr=" << detail::format_double(*c.lr) << '\n';
  if (c.l2) out << "l2=" << detail::format_double(*c.l2) << '\n';
  out << "margin=" << detail::format_double(c.margin) << '\n';
  out << "seed=" << c.seed << '\n';
  if (!c.frozen.empty()) out << "frozen=" << c.frozen << '\n';
  if (!c.init.empty()) out << "init=" << c.init << '\n';
  out << "out=" << c.out << '\n';
  out << "batch_size=" << c.batch_size << '\n';
  out << "max_epochs=" << c.max_epochs << '\n';
  out << "patience=" << c.patience << '\n';
  out << "eval_every=" << c.eval_every << '\n';
  out << "fine_tune_epochs=" << c.fine_tune_epochs << '\n';
  out << "dev_eval_limit=" << c.dev_eval_limit << '\n';
  out << "threads=" << c.threads << '\n';
  out << "hits=" << detail::join_sizes(c.hits) << '\n';
  out << "comparator=" << comparator_name(c.comparator) << '\n';
  return out.str();
}

// Applies one key=value setting.
inline void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view value) {
  auto bad = [&](const char* what) {
    return ConfigError("invalid " + std::string(what) + " '" + std::string(value) + "'");
  };
  if (key == "data") c.data = value;
  else if (key == "types") c.types = value;
  else if (key == "preset") {
    auto p = parse_preset(value);
    if (!p) throw bad("preset");
    c.preset = *p;
  } else if (key == "model") {
    auto f = parse_family(value);
    if (!f) throw bad("model");
    c.model = *f;
  } else if (key == "sampler") {
    auto s = parse_sampler(value);
    if (!s) throw bad("sampler");
    c.sampler = *s;
  } else if (key == "num_negatives") c.ns_grid = detail::parse_size_list(key, value);
  else if (key == "dim") c.dim = detail::parse_number<std::size_t>(key, value);
  else if (key == "lr") c.lr = detail::parse_number<double>(key, value);
  else if (key == "l2") c.l2 = detail::parse_number<double>(key, value);
  else if (key == "margin") c.margin = detail::parse_number<double>(key, value);
  else if (key == "seed") c.seed = detail::parse_number<std::uint64_t>(key, value);
  else if (key == "frozen") c.frozen = value;
  else if (key == "init") c.init = value;
  else if (key == "out") c.out = value;
  else if (key == "batch_size") c.batch_size = detail::parse_number<std::size_t>(key, value);
  else if (key == "max_epochs") c.max_epochs = detail::parse_number<std::size_t>(key, value);
  else if (key == "patience") c.patience = detail::parse_number<std::size_t>(key, value);
  else if (key == "eval_every") c.eval_every = detail::parse_number<std::size_t>(key, value);
  else if (key == "fine_tune_epochs") c.fine_tune_epochs = detail::parse_number<std::size_t>(key, value);
  else if (key == "dev_eval_limit") c.dev_eval_limit = detail::parse_number<std::size_t>(key, value);
  else if (key == "threads") c.threads = detail::parse_number<std::size_t>(key, value);
  else if (key == "hits") c.hits = detail::parse_size_list(key, value);
  else if (key == "comparator") {
    auto cmp = parse_comparator(value);
    if (!cmp) throw bad("comparator");
    c.comparator = *cmp;
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

// Parses key=value lines over `base`. Blank lines and '#' comments are ignored.
inline ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {}) {
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    apply_setting(base, detail::trim(std::string_view(line).substr(0, eq)),
                  detail::trim(std::string_view(line).substr(eq + 1)));
  }
  return base;
}

inline ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {}) {
  std::istringstream in(text);
  return parse_config(in, std::move(base));
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return parse_config(in);
}

// 64-bit FNV-1a over the serialized config, as 16 hex digits.
inline std::string config_fingerprint(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

inline std::string resolved_type_file(const ExperimentConfig& c) {
  if (!c.types.empty()) return c.types;
  if (c.data.empty()) return {};
  const auto candidate = std::filesystem::path(c.data) / "types.txt";
  return std::filesystem::exists(candidate) ? candidate.string() : std::string{};
}

// Every violated constraint, empty when the config is usable.
inline std::vector<std::string> config_violations(const ExperimentConfig& c) {
  std::vector<std::string> v;
  if (c.data.empty()) v.emplace_back("data directory is required");
  if (c.out.empty()) v.emplace_back("output directory is required");
  if (c.ns_grid.empty()) v.emplace_back("num_negatives grid is empty");
  for (auto n : c.ns_grid) {
    if (n < 1) v.emplace_back("num_negatives entries must be >= 1");
  }
  if (c.dim < 1) v.emplace_back("dim must be >= 1");
  if (!(c.margin > 0.0)) v.emplace_back("margin must be > 0");
  if (c.lr && !(*c.lr > 0.0)) v.emplace_back("lr must be > 0");
  if (c.l2 && *c.l2 < 0.0) v.emplace_back("l2 must be >= 0");
  if (c.batch_size < 1) v.emplace_back("batch_size must be >= 1");
  if (c.eval_every < 1) v.emplace_back("eval_every must be >= 1");
  if (c.hits.empty()) v.emplace_back("hits list is empty");
  for (auto k : c.hits) {
    if (k < 1) v.emplace_back("hits entries must be >= 1");
  }
  if (is_embedding_sampler(c.sampler) && c.frozen.empty()) {
    v.emplace_back(std::string(sampler_name(c.sampler)) + " sampling requires a frozen checkpoint (frozen=)");
  }
  if (c.sampler == SamplerKind::kTyped && resolved_type_file(c).empty()) {
    v.emplace_back("typed sampling requires a type file (types= or <data>/types.txt)");
  }
  return v;
}

inline void validate_config(const ExperimentConfig& c) {
  const auto v = config_violations(c);
  if (v.empty()) return;
  std::string msg = "invalid experiment config: ";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) msg += "; ";
    msg += v[i];
  }
  throw ConfigError(msg);
}

// Explicit values win over presets; presets win over defaults.
inline Hyperparameters resolve_hyperparameters(const ExperimentConfig& c, std::size_t n_s) {
  const auto preset = preset_hyperparameters(c.preset, c.model, n_s);
  return {c.lr.value_or(preset ? preset->lr : kDefaultLearningRate), c.l2.value_or(preset ? preset->l2_lambda : 0.0)};
}

struct ExperimentReport {
  std::string model;
  std::string sampler;
  std::size_t n_s = 0;
  std::string split;
  std::uint64_t seed = 0;
  MetricsReport metrics;
};

namespace detail {

inline void write_metric_rows(std::ostream& out, const ExperimentReport& r, const std::string& slice, double mrr_value,
                              const std::map<std::size_t, double>& hits) {
  const auto prefix = r.model + ',' + r.sampler + ',' + std::to_string(r.n_s) + ',' + r.split + ',';
  const auto suffix = ',' + std::to_string(r.seed) + ',' + r.metrics.config_fingerprint + ',' +
                      comparator_name(r.metrics.comparator) + '\n';
  out << prefix << "mrr," << slice << ',' << format_double(mrr_value) << suffix;
  for (const auto& [k, v] : hits) out << prefix << "hits@" << k << ',' << slice << ',' << format_double(v) << suffix;
}

inline constexpr const char* kMetricsHeader = "model,sampler,n_s,split,metric,slice,value,seed,config_fingerprint,comparator\n";

}  // namespace detail

// Writes metrics.csv (overall), slices.csv (per order-of-magnitude slice) and
// plot_series.csv ((n_s, MRR) series per model/sampler; n_s is plotted on a
// log axis).
inline void emit_report(const std::vector<ExperimentReport>& reports, const std::filesystem::path& out_dir) {
  if (reports.empty()) throw Error("emit_report: no reports");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::ofstream metrics(out_dir / "metrics.csv");
  std::ofstream slices(out_dir / "slices.csv");
  std::ofstream plot(out_dir / "plot_series.csv");
  if (!metrics || !slices || !plot) throw IoError("cannot write reports under " + out_dir.string());

  metrics << detail::kMetricsHeader;
  slices << detail::kMetricsHeader;
  for (const auto& r : reports) {
    detail::write_metric_rows(metrics, r, "all", r.metrics.mrr, r.metrics.hits);
    for (const auto& [g, m] : r.metrics.per_slice) detail::write_metric_rows(slices, r, slice_label(g), m.mrr, m.hits);
  }

  std::map<std::string, std::map<std::size_t, double>> series;
  for (const auto& r : reports) series[r.model + "/" + r.sampler][r.n_s] = r.metrics.mrr;
  plot << "# x=n_s (log scale), y=MRR\n";
  plot << "series,n_s,mrr\n";
  for (const auto& [name, points] : series) {
    for (const auto& [ns, v] : points) plot << name << ',' << ns << ',' << detail::format_double(v) << '\n';
  }
  if (!metrics || !slices || !plot) throw IoError("write failed under " + out_dir.string());
}

inline std::string checkpoint_name(const ExperimentConfig& c, std::size_t n_s) {
  return std::string(family_name(c.model)) + "_" + sampler_name(c.sampler) + "_ns" + std::to_string(n_s);
}

struct ExperimentOutcome {
  std::vector<ExperimentReport> reports;
  std::vector<std::filesystem::path> checkpoints;
};

// Trains (or fine-tunes, for nn/nmiss) one model per n_s in the grid,
// evaluates it on the test split, and persists checkpoint, training log and
// reports after every grid point.
inline ExperimentOutcome run_experiment(const ExperimentConfig& c, std::ostream* progress = nullptr) {
  validate_config(c);
  const auto store = load_dataset(c.data);
  if (store.test().empty()) throw ConfigError("dataset has no test split");
  const auto stats = compute_stats(store);
  std::optional<TypeCatalog> catalog;
  if (const auto type_file = resolved_type_file(c); !type_file.empty()) {
    catalog = load_type_catalog(type_file, store);
  }
  std::shared_ptr<const FrozenSamplerModel> frozen;
  if (is_embedding_sampler(c.sampler)) frozen = std::make_shared<const FrozenSamplerModel>(load_checkpoint(c.frozen));
  const auto sampler = make_sampler(c.sampler, store, catalog ? &*catalog : nullptr, frozen, kTrainDev);

  const auto fingerprint = config_fingerprint(c);
  const std::filesystem::path out_dir(c.out);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());

  ExperimentOutcome outcome;
  for (std::size_t n_s : c.ns_grid) {
    const auto hp = resolve_hyperparameters(c, n_s);
    TrainConfig tc;
    tc.n_s = n_s;
    tc.batch_size = c.batch_size;
    tc.max_epochs = c.max_epochs;
    tc.patience = c.patience;
    tc.eval_every = c.eval_every;
    tc.seed = c.seed;
    tc.fine_tune_epochs = c.fine_tune_epochs;
    tc.dev_eval_limit = c.dev_eval_limit;
    tc.threads = c.threads;
    tc.loss = {c.margin, hp.l2_lambda};
    tc.adam.lr = hp.lr;

    auto log_epoch = [&](const EpochRecord& r) {
      if (!progress) return;
      *progress << "[n_s=" << n_s << "] epoch " << r.epoch << " loss " << r.mean_loss;
      if (r.dev_mrr) *progress << " dev_mrr " << *r.dev_mrr;
      *progress << '\n';
    };

    TrainResult result;
    if (is_embedding_sampler(c.sampler)) {
      ModelParams start = !c.init.empty() ? load_checkpoint(c.init) : frozen->params();
      if (start.family != c.model || start.dim != c.dim) {
        throw ConfigError("fine-tuning start checkpoint does not match model=" + std::string(family_name(c.model)) +
                          " dim=" + std::to_string(c.dim) + "; pass init=<checkpoint>");
      }
      result = fine_tune(store, std::move(start), *sampler, tc, log_epoch);
    } else {
      result = train(store, init_params(c.model, c.dim, store.num_entities(), store.num_relations(), c.seed), *sampler,
                     tc, log_epoch);
    }

    const auto base = out_dir / checkpoint_name(c, n_s);
    auto ckpt = base;
    ckpt += ".ckpt";
    save_checkpoint(ckpt, result.params);
    outcome.checkpoints.push_back(ckpt);
    {
      auto log_path = base;
      log_path += "_train_log.csv";
      std::ofstream log(log_path);
      result.log.write_csv(log);
    }

    EvalOptions eo;
    eo.ks = c.hits;
    eo.comparator = c.comparator;
    eo.filter = kAllSplits;
    eo.threads = c.threads;
    ExperimentReport rep;
    rep.model = family_name(c.model);
    rep.sampler = sampler_name(c.sampler);
    rep.n_s = n_s;
    rep.split = "test";
    rep.seed = c.seed;
    rep.metrics = evaluate(result.params, store, Split::kTest, stats, eo);
    rep.metrics.config_fingerprint = fingerprint;
    rep.metrics.rankings.clear();
    outcome.reports.push_back(std::move(rep));
    emit_report(outcome.reports, out_dir);
    if (progress) {
      *progress << "[n_s=" << n_s << "] test mrr " << outcome.reports.back().metrics.mrr << '\n';
    }
  }
  return outcome;
}

}  // namespace kgneg
