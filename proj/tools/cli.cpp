// Copyright 2026 The pairsim Authors. All Rights Reserved.
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

#include "cli.hpp"

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pairsim/dataio.hpp"
#include "pairsim/error.hpp"
#include "pairsim/evalkit.hpp"
#include "pairsim/geometry.hpp"

namespace pairsim::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flag storage for the training knobs shared by `train` and `sweep`.
struct TrainFlags {
  std::string paradigm = "pair_wise";
  std::string loss = "circle";
  double gamma = 256.0;
  double m = 0.25;
  double lr = 0.1;
  std::string lr_schedule = "0.5:0.1,0.7:0.1,0.9:0.1";
  int iterations = 2000;
  int batch = 64;
  int classes_per_batch = 16;
  int samples_per_class = 5;
  int embed_dim = 32;
  int hidden = 128;
  std::string activation = "tanh";
};

struct Common {
  std::uint64_t seed = 0;
  std::string out_dir = "runs";
  std::string config;
  std::string tag;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "RNG seed");
  app->add_option("--out-dir", c.out_dir, "Parent directory for run directories");
  app->add_option("--config", c.config, "JSON file merged over the resolved configuration");
  app->add_option("--tag", c.tag, "Run directory prefix");
}

void add_train_flags(CLI::App* app, TrainFlags& f) {
  app->add_option("--paradigm", f.paradigm, "class_level | pair_wise");
  app->add_option("--loss", f.loss, "circle | am_softmax | normface | softmax | triplet | unified");
  app->add_option("--gamma", f.gamma, "Scale factor");
  app->add_option("--m", f.m, "Margin / relaxation factor");
  app->add_option("--lr", f.lr, "Base learning rate");
  app->add_option("--lr-schedule", f.lr_schedule, "Comma list of fraction:multiplier steps ('' for none)");
  app->add_option("--iterations", f.iterations, "SGD iterations");
  app->add_option("--batch", f.batch, "Class-level batch size");
  app->add_option("--P", f.classes_per_batch, "Pair-wise classes per batch");
  app->add_option("--K", f.samples_per_class, "Pair-wise samples per class");
  app->add_option("--embed-dim", f.embed_dim, "Embedding dimension");
  app->add_option("--hidden", f.hidden, "Hidden width (0 for a single linear layer)");
  app->add_option("--activation", f.activation, "none | relu | tanh");
}

std::vector<LrStep> parse_schedule(const std::string& text) {
  std::vector<LrStep> steps;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw UsageError("malformed --lr-schedule entry '" + item + "'");
    try {
      steps.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
    } catch (const std::exception&) {
      throw UsageError("malformed --lr-schedule entry '" + item + "'");
    }
  }
  return steps;
}

LossId parse_loss_or_throw(const std::string& name) {
  const auto id = parse_loss_id(name);
  if (!id) throw UsageError("unknown loss '" + name + "' (valid: " + std::string(loss_id_names()) + ")");
  return *id;
}

TrainConfig to_config(const TrainFlags& f, std::uint64_t seed) {
  TrainConfig c;
  const auto paradigm = parse_paradigm(f.paradigm);
  if (!paradigm) throw UsageError("unknown paradigm '" + f.paradigm + "' (valid: class_level,pair_wise)");
  const auto act = parse_activation(f.activation);
  if (!act) throw UsageError("unknown activation '" + f.activation + "' (valid: none,relu,tanh)");
  c.paradigm = *paradigm;
  c.loss = {parse_loss_or_throw(f.loss), f.gamma, f.m};
  c.lr = f.lr;
  c.lr_schedule = parse_schedule(f.lr_schedule);
  c.iterations = f.iterations;
  c.batch_size = f.batch;
  c.classes_per_batch = f.classes_per_batch;
  c.samples_per_class = f.samples_per_class;
  c.seed = seed;
  c.embed_dim = f.embed_dim;
  if (f.hidden > 0) c.hidden_dim = f.hidden;
  else c.hidden_dim.reset();
  c.activation = *act;
  return c;
}

// The --config file is a JSON merge patch applied over the flag values.
json apply_config_file(json resolved, const std::string& path) {
  if (path.empty()) return resolved;
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::io, "cannot open config " + path);
  json patch;
  try {
    patch = json::parse(is);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, "malformed config " + path + ": " + e.what());
  }
  resolved.merge_patch(patch);
  return resolved;
}

std::string config_hash(const json& resolved) {
  // FNV-1a over the canonical dump.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : resolved.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (int k = 0; k < 8; ++k) out += kHex[(h >> (60 - 4 * k)) & 0xF];
  return out;
}

fs::path make_run_dir(const std::string& out_dir, const std::string& tag, const json& resolved) {
  const fs::path dir = fs::path(out_dir) / (tag + "-" + config_hash(resolved));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create run directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
  return os;
}

void write_json(const fs::path& path, const json& doc) { open_out(path) << doc.dump(2) << '\n'; }

std::string detail_format(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string tag_or(const Common& c, const char* fallback) { return c.tag.empty() ? fallback : c.tag; }

// ---------------------------------------------------------------- gen

struct GenFlags {
  int classes = 16;
  int per_class = 20;
  int dim = 32;
  double sigma = 0.1;
  double center_scale = 1.0;
  std::string output;
};

int cmd_gen(const GenFlags& f, const Common& common, std::ostream& out) {
  ClusterSpec spec{f.classes, f.per_class, f.dim, f.center_scale, f.sigma, common.seed};
  json resolved = {{"command", "gen"}, {"output", f.output}, {"clusters", to_json(spec)}};
  resolved = apply_config_file(resolved, common.config);
  const auto& c = resolved.at("clusters");
  spec = {c.at("n_classes").get<int>(), c.at("per_class").get<int>(), c.at("dim").get<int>(),
          c.at("center_scale").get<double>(), c.at("noise_sigma").get<double>(), c.at("seed").get<std::uint64_t>()};
  const fs::path output = resolved.at("output").get<std::string>();
  if (output.has_parent_path()) fs::create_directories(output.parent_path());
  save_dataset(output, gen_clusters(spec));
  fs::path echo = output;
  echo += ".config.json";
  write_json(echo, resolved);
  out << output.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------- train

int cmd_train(const TrainFlags& f, const std::string& data, const Common& common, std::ostream& out) {
  json resolved = {{"command", "train"}, {"data", data}, {"train", to_json(to_config(f, common.seed))}};
  resolved = apply_config_file(resolved, common.config);
  const TrainConfig config = train_config_from_json(resolved.at("train"));
  const LabeledDataset ds = load_dataset(fs::path(resolved.at("data").get<std::string>()));

  const fs::path dir = make_run_dir(common.out_dir, tag_or(common, "train"), resolved);
  write_json(dir / "config.json", resolved);
  const RunRecord record = train(ds, config);
  save_checkpoint(dir / "checkpoint.json", Checkpoint{record.model, config.paradigm, resolved});
  save_record(dir / "record.csv", record);
  out << dir.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------- eval

struct EvalFlags {
  std::string checkpoint;
  std::string data;
  std::vector<int> ks{1, 2, 4, 8};
  std::vector<double> fars{0.1, 0.01, 0.001};
  bool scatter = false;
  bool all_pairs = false;
};

int cmd_eval(const EvalFlags& f, const Common& common, std::ostream& out) {
  json resolved = {{"command", "eval"}, {"checkpoint", f.checkpoint}, {"data", f.data}, {"ks", f.ks},
                   {"far", f.fars},     {"scatter", f.scatter},        {"all_pairs", f.all_pairs}};
  resolved = apply_config_file(resolved, common.config);
  const fs::path ck_path = resolved.at("checkpoint").get<std::string>();
  if (!fs::exists(ck_path)) throw Error(ErrorKind::io, "missing checkpoint " + ck_path.string());
  const Checkpoint ck = read_checkpoint(ck_path);
  const LabeledDataset ds = load_dataset(fs::path(resolved.at("data").get<std::string>()));
  if (ds.dim() != ck.model.input_dim()) {
    throw Error(ErrorKind::invalid_argument, "dimension mismatch: data has " + std::to_string(ds.dim()) +
                                                 " features, checkpoint expects " + std::to_string(ck.model.input_dim()));
  }
  const auto ks = resolved.at("ks").get<std::vector<int>>();
  const auto fars = resolved.at("far").get<std::vector<double>>();
  const MetricsReport report = evaluate(ck.model, ds, ks, fars);

  const fs::path dir = make_run_dir(common.out_dir, tag_or(common, "eval"), resolved);
  write_json(dir / "config.json", resolved);
  {
    auto os = open_out(dir / "metrics.csv");
    write_metrics_csv(os, report);
  }
  write_json(dir / "summary.json", to_json(report));
  if (resolved.at("scatter").get<bool>()) {
    const auto sc = similarity_scatter(ck.model, ds, resolved.at("all_pairs").get<bool>());
    auto os = open_out(dir / "scatter.csv");
    write_scatter_csv(os, sc.points);
  }
  out << dir.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------- gradfield

struct FieldFlags {
  std::vector<std::string> losses{"triplet", "am_softmax", "circle"};
  std::vector<double> gammas;
  std::vector<double> ms;
  int resolution = 101;
  std::vector<double> sn_range{0.0, 1.0};
  std::vector<double> sp_range{0.0, 1.0};
};

LossConfig default_field_config(LossId id) {
  switch (id) {
    case LossId::circle: return {id, 256.0, 0.25};
    case LossId::triplet: return {id, 1.0, 0.35};
    default: return {id, 64.0, 0.35};
  }
}

int cmd_gradfield(const FieldFlags& f, const Common& common, std::ostream& out) {
  if (f.resolution < 2) throw UsageError("--resolution must be >= 2");
  if (f.sn_range.size() != 2 || f.sp_range.size() != 2) throw UsageError("ranges take two values lo,hi");
  json resolved = {{"command", "gradfield"}, {"losses", f.losses}, {"gamma", f.gammas}, {"m", f.ms},
                   {"resolution", f.resolution}, {"sn_range", f.sn_range}, {"sp_range", f.sp_range}};
  resolved = apply_config_file(resolved, common.config);
  const GridSpec grid{resolved.at("sn_range")[0].get<double>(), resolved.at("sn_range")[1].get<double>(),
                      resolved.at("sp_range")[0].get<double>(), resolved.at("sp_range")[1].get<double>(),
                      resolved.at("resolution").get<int>()};
  if (grid.resolution < 2) throw UsageError("--resolution must be >= 2");

  std::vector<LossConfig> panels;
  for (const auto& name : resolved.at("losses").get<std::vector<std::string>>()) {
    const LossConfig base = default_field_config(parse_loss_or_throw(name));
    auto gammas = resolved.at("gamma").get<std::vector<double>>();
    auto ms = resolved.at("m").get<std::vector<double>>();
    if (gammas.empty()) gammas.push_back(base.gamma);
    if (ms.empty()) ms.push_back(base.m);
    for (double g : gammas) {
      for (double m : ms) panels.push_back({base.id, g, m});
    }
  }
  if (panels.empty()) throw UsageError("no losses selected");
  for (const auto& p : panels) {
    if (p.id == LossId::circle) (void)CircleParams::reduced(p.gamma, p.m);
    else (void)loss_value(p, SimilarityGroup{{0.5}, {0.5}});
  }

  const fs::path dir = make_run_dir(common.out_dir, tag_or(common, "gradfield"), resolved);
  write_json(dir / "config.json", resolved);
  for (const auto& p : panels) {
    const auto rows = gradient_field(p, grid);
    const fs::path file = dir / ("gradfield_" + std::string(to_string(p.id)) + "_g" + detail_format(p.gamma) + "_m" +
                                 detail_format(p.m) + ".csv");
    auto os = open_out(file);
    write_gradient_field_csv(os, rows);
    out << file.string() << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- sweep

struct SweepFlags {
  std::string data;
  std::string eval_data;
  std::string axis = "gamma";
  std::vector<std::string> values;
  int jobs = 1;
};

std::vector<double> parse_values(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& item : items) {
    if (item.empty()) continue;
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc() || res.ptr != item.data() + item.size()) {
      throw UsageError("malformed --values entry '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("--values needs at least one value");
  return out;
}

int cmd_sweep(const SweepFlags& sf, const TrainFlags& tf, const Common& common, std::ostream& out) {
  const std::vector<double> given = parse_values(sf.values);
  if (sf.axis != "gamma" && sf.axis != "m") throw UsageError("unknown axis '" + sf.axis + "' (valid: gamma,m)");
  json resolved = {{"command", "sweep"}, {"data", sf.data},    {"eval_data", sf.eval_data.empty() ? sf.data : sf.eval_data},
                   {"axis", sf.axis},    {"values", given}, {"jobs", sf.jobs},
                   {"train", to_json(to_config(tf, common.seed))}};
  resolved = apply_config_file(resolved, common.config);
  const auto values = resolved.at("values").get<std::vector<double>>();
  if (values.empty()) throw UsageError("--values needs at least one value");
  const auto axis_name = resolved.at("axis").get<std::string>();
  if (axis_name != "gamma" && axis_name != "m") throw UsageError("unknown axis '" + axis_name + "' (valid: gamma,m)");
  const SweepAxis axis = axis_name == "gamma" ? SweepAxis::gamma : SweepAxis::m;
  const TrainConfig config = train_config_from_json(resolved.at("train"));
  const LabeledDataset train_set = load_dataset(fs::path(resolved.at("data").get<std::string>()));
  const LabeledDataset eval_set = load_dataset(fs::path(resolved.at("eval_data").get<std::string>()));

  const fs::path dir = make_run_dir(common.out_dir, tag_or(common, "sweep"), resolved);
  write_json(dir / "config.json", resolved);
  const auto rows = sweep(train_set, eval_set, config, axis, values, resolved.at("jobs").get<int>());
  auto os = open_out(dir / "sweep.csv");
  write_sweep_csv(os, axis, rows);
  out << (dir / "sweep.csv").string() << '\n';
  return 0;
}

std::string one_line(std::string s) {
  for (char& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pair-similarity losses: data generation, training, evaluation and analysis"};
  app.require_subcommand(1);
  Common common;

  GenFlags gen_flags;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic clustered dataset");
  add_common(gen, common);
  gen->add_option("--classes", gen_flags.classes, "Number of classes");
  gen->add_option("--per-class", gen_flags.per_class, "Samples per class");
  gen->add_option("--dim", gen_flags.dim, "Feature dimension");
  gen->add_option("--sigma", gen_flags.sigma, "Isotropic noise standard deviation");
  gen->add_option("--center-scale", gen_flags.center_scale, "Radius of the sphere holding class centers");
  gen->add_option("-o,--output", gen_flags.output, "Output CSV")->required();

  TrainFlags train_flags;
  std::string train_data;
  auto* train_cmd = app.add_subcommand("train", "Train an embedding model");
  add_common(train_cmd, common);
  add_train_flags(train_cmd, train_flags);
  train_cmd->add_option("--data", train_data, "Training dataset CSV")->required();

  EvalFlags eval_flags;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  add_common(eval, common);
  eval->add_option("--checkpoint", eval_flags.checkpoint, "Checkpoint JSON")->required();
  eval->add_option("--data", eval_flags.data, "Dataset CSV")->required();
  eval->add_option("--ks", eval_flags.ks, "Recall@k values")->delimiter(',');
  eval->add_option("--far", eval_flags.fars, "FAR targets")->delimiter(',');
  eval->add_flag("--scatter", eval_flags.scatter, "Also write the hardest-pair scatter CSV");
  eval->add_flag("--all-pairs", eval_flags.all_pairs, "Scatter every (sn, sp) pair instead of the hardest");

  FieldFlags field_flags;
  auto* field = app.add_subcommand("gradfield", "Emit single-pair loss/gradient fields as CSV");
  add_common(field, common);
  field->add_option("--loss", field_flags.losses, "Losses to evaluate")->delimiter(',');
  field->add_option("--gamma", field_flags.gammas, "Scale factors (default per loss)")->delimiter(',');
  field->add_option("--m", field_flags.ms, "Margins (default per loss); several give one panel each")->delimiter(',');
  field->add_option("--resolution", field_flags.resolution, "Grid points per axis");
  field->add_option("--sn-range", field_flags.sn_range, "sn lo,hi")->delimiter(',');
  field->add_option("--sp-range", field_flags.sp_range, "sp lo,hi")->delimiter(',');

  SweepFlags sweep_flags;
  TrainFlags sweep_train;
  auto* sweep_cmd = app.add_subcommand("sweep", "Train once per hyper-parameter value and report R@1");
  add_common(sweep_cmd, common);
  add_train_flags(sweep_cmd, sweep_train);
  sweep_cmd->add_option("--data", sweep_flags.data, "Training dataset CSV")->required();
  sweep_cmd->add_option("--eval-data", sweep_flags.eval_data, "Evaluation dataset CSV (default: --data)");
  sweep_cmd->add_option("--axis", sweep_flags.axis, "gamma | m");
  sweep_cmd->add_option("--values", sweep_flags.values, "Values to sweep")->delimiter(',')->required();
  sweep_cmd->add_option("--jobs", sweep_flags.jobs, "Concurrent training runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_flags, common, out);
    if (train_cmd->parsed()) return cmd_train(train_flags, train_data, common, out);
    if (eval->parsed()) return cmd_eval(eval_flags, common, out);
    if (field->parsed()) return cmd_gradfield(field_flags, common, out);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_flags, sweep_train, common, out);
  } catch (const UsageError& e) {
    err << "error: usage: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << one_line(e.what()) << '\n';
    return 1;
  } catch (const json::exception& e) {
    err << "error: parse: " << one_line(e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: internal: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 2;
}

}  // namespace pairsim::cli
