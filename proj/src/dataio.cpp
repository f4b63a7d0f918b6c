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

#include "pairsim/dataio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "format.hpp"
#include "pairsim/error.hpp"

namespace pairsim {
namespace {

using nlohmann::json;

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& msg) {
  throw Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + msg);
}

double parse_double(std::string_view field, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size() || !std::isfinite(v)) {
    parse_error(line, "malformed number '" + std::string(field) + "'");
  }
  return v;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
  return os;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::io, "cannot open " + path.string());
  return is;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (rows < 1 || cols < 1 || data.size() != static_cast<std::size_t>(rows * cols)) {
    throw Error(ErrorKind::parse, "checkpoint matrix has inconsistent shape");
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++].get<double>();
  }
  return m;
}

}  // namespace

void validate(const LabeledDataset& dataset) {
  const auto m = dataset.size();
  if (static_cast<std::size_t>(m) != dataset.labels.size()) {
    throw Error(ErrorKind::invalid_argument, "label count does not match feature rows");
  }
  if (dataset.num_classes < 2 || m < dataset.num_classes) {
    throw Error(ErrorKind::invalid_argument, "dataset needs M >= N >= 2");
  }
  std::vector<int> seen(static_cast<std::size_t>(dataset.num_classes), 0);
  for (int y : dataset.labels) {
    if (y < 0 || y >= dataset.num_classes) {
      throw Error(ErrorKind::invalid_argument, "label " + std::to_string(y) + " out of range");
    }
    ++seen[static_cast<std::size_t>(y)];
  }
  for (std::size_t c = 0; c < seen.size(); ++c) {
    if (seen[c] == 0) throw Error(ErrorKind::invalid_argument, "class " + std::to_string(c) + " has no samples");
  }
  if (!dataset.features.allFinite()) throw Error(ErrorKind::numeric, "non-finite feature value");
}

void validate(const ClusterSpec& spec) {
  if (spec.n_classes < 2 || spec.per_class < 1 || spec.dim < 1) {
    throw Error(ErrorKind::invalid_argument, "cluster spec needs >= 2 classes, >= 1 sample per class, dim >= 1");
  }
  if (!(spec.center_scale > 0.0) || !std::isfinite(spec.center_scale)) {
    throw Error(ErrorKind::invalid_argument, "center scale must be positive");
  }
  if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma)) {
    throw Error(ErrorKind::invalid_argument, "noise sigma must be non-negative");
  }
}

LabeledDataset gen_clusters(const ClusterSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);

  Eigen::MatrixXd centers(spec.n_classes, spec.dim);
  for (int c = 0; c < spec.n_classes; ++c) {
    double norm = 0.0;
    while (!(norm > 1e-12)) {
      for (int d = 0; d < spec.dim; ++d) centers(c, d) = unit_normal(rng);
      norm = centers.row(c).norm();
    }
    centers.row(c) *= spec.center_scale / norm;
  }

  LabeledDataset ds;
  ds.num_classes = spec.n_classes;
  ds.features.resize(static_cast<Eigen::Index>(spec.n_classes) * spec.per_class, spec.dim);
  ds.labels.reserve(static_cast<std::size_t>(ds.features.rows()));
  Eigen::Index row = 0;
  for (int c = 0; c < spec.n_classes; ++c) {
    for (int s = 0; s < spec.per_class; ++s, ++row) {
      for (int d = 0; d < spec.dim; ++d) {
        ds.features(row, d) = centers(c, d) + spec.noise_sigma * unit_normal(rng);
      }
      ds.labels.push_back(c);
    }
  }
  return ds;
}

void save_dataset(std::ostream& os, const LabeledDataset& dataset) {
  validate(dataset);
  os << "label";
  for (Eigen::Index d = 0; d < dataset.dim(); ++d) os << ",f" << d;
  os << '\n';
  for (Eigen::Index r = 0; r < dataset.size(); ++r) {
    os << dataset.labels[static_cast<std::size_t>(r)];
    for (Eigen::Index d = 0; d < dataset.dim(); ++d) os << ',' << detail::format_exact(dataset.features(r, d));
    os << '\n';
  }
}

void save_dataset(const std::filesystem::path& path, const LabeledDataset& dataset) {
  auto os = open_for_write(path);
  save_dataset(os, dataset);
}

LabeledDataset load_dataset(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(is, line)) throw Error(ErrorKind::parse, "no rows");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv(line);
  if (header.size() < 2 || header[0] != "label") parse_error(line_no, "header must be label,f0,f1,...");
  for (std::size_t k = 1; k < header.size(); ++k) {
    if (header[k] != "f" + std::to_string(k - 1)) parse_error(line_no, "unexpected header column '" + std::string(header[k]) + "'");
  }
  const std::size_t dim = header.size() - 1;

  std::vector<double> values;
  std::vector<int> labels;
  std::vector<std::size_t> label_lines;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != dim + 1) {
      parse_error(line_no, "expected " + std::to_string(dim + 1) + " columns, got " + std::to_string(fields.size()));
    }
    int label = -1;
    const auto res = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), label);
    if (res.ec != std::errc() || res.ptr != fields[0].data() + fields[0].size() || label < 0) {
      parse_error(line_no, "unknown label '" + std::string(fields[0]) + "'");
    }
    labels.push_back(label);
    label_lines.push_back(line_no);
    for (std::size_t k = 1; k < fields.size(); ++k) values.push_back(parse_double(fields[k], line_no));
  }
  if (labels.empty()) throw Error(ErrorKind::parse, "no rows");

  LabeledDataset ds;
  ds.labels = std::move(labels);
  ds.num_classes = *std::max_element(ds.labels.begin(), ds.labels.end()) + 1;
  ds.features.resize(static_cast<Eigen::Index>(ds.labels.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < ds.labels.size(); ++r) {
    for (std::size_t d = 0; d < dim; ++d) {
      ds.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d)) = values[r * dim + d];
    }
  }
  std::vector<bool> seen(static_cast<std::size_t>(ds.num_classes), false);
  for (int y : ds.labels) seen[static_cast<std::size_t>(y)] = true;
  for (std::size_t c = 0; c < seen.size(); ++c) {
    if (!seen[c]) {
      const auto at = std::find(ds.labels.begin(), ds.labels.end(), ds.num_classes - 1) - ds.labels.begin();
      parse_error(label_lines[static_cast<std::size_t>(at)],
                  "unknown label " + std::to_string(ds.num_classes - 1) + ": class " + std::to_string(c) +
                      " has no samples");
    }
  }
  if (ds.num_classes < 2) throw Error(ErrorKind::parse, "dataset needs at least two classes");
  return ds;
}

LabeledDataset load_dataset(const std::filesystem::path& path) {
  auto is = open_for_read(path);
  return load_dataset(is);
}

json to_json(const Checkpoint& ck) {
  validate(ck.model);
  json layers = json::array();
  for (const auto& w : ck.model.layers) layers.push_back(matrix_to_json(w));
  json doc;
  doc["format"] = kCheckpointFormat;
  doc["paradigm"] = to_string(ck.paradigm);
  doc["input_dim"] = ck.model.input_dim();
  doc["embed_dim"] = ck.model.embed_dim();
  doc["hidden_dim"] = ck.model.hidden_dim() ? json(*ck.model.hidden_dim()) : json(nullptr);
  doc["num_classes"] = ck.model.num_classes() ? json(*ck.model.num_classes()) : json(nullptr);
  doc["activation"] = to_string(ck.model.activation);
  doc["layers"] = std::move(layers);
  doc["class_weights"] = ck.model.class_weights ? matrix_to_json(*ck.model.class_weights) : json(nullptr);
  doc["config"] = ck.config;
  return doc;
}

Checkpoint checkpoint_from_json(const json& doc) {
  try {
    const auto format = doc.at("format").get<std::string>();
    if (format != kCheckpointFormat) {
      throw Error(ErrorKind::version, "unsupported checkpoint format '" + format + "' (expected " +
                                          std::string(kCheckpointFormat) + ")");
    }
    Checkpoint ck;
    const auto paradigm = parse_paradigm(doc.at("paradigm").get<std::string>());
    const auto act = parse_activation(doc.at("activation").get<std::string>());
    if (!paradigm || !act) throw Error(ErrorKind::parse, "checkpoint has unknown paradigm or activation");
    ck.paradigm = *paradigm;
    ck.model.activation = *act;
    for (const auto& l : doc.at("layers")) ck.model.layers.push_back(matrix_from_json(l));
    if (!doc.at("class_weights").is_null()) ck.model.class_weights = matrix_from_json(doc.at("class_weights"));
    ck.config = doc.value("config", json::object());
    validate(ck.model);
    const bool dims_ok =
        doc.at("input_dim").get<int>() == ck.model.input_dim() && doc.at("embed_dim").get<int>() == ck.model.embed_dim() &&
        (doc.at("hidden_dim").is_null() ? !ck.model.hidden_dim() : ck.model.hidden_dim() == doc.at("hidden_dim").get<int>()) &&
        (doc.at("num_classes").is_null() ? !ck.model.num_classes()
                                         : ck.model.num_classes() == doc.at("num_classes").get<int>());
    if (!dims_ok) throw Error(ErrorKind::parse, "checkpoint dimensions disagree with parameter arrays");
    return ck;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  auto os = open_for_write(path);
  os << to_json(checkpoint).dump(2) << '\n';
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  auto is = open_for_read(path);
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, "malformed checkpoint " + path.string() + ": " + e.what());
  }
  return checkpoint_from_json(doc);
}

void load_checkpoint(const std::filesystem::path& path, EmbeddingModel& model) {
  Checkpoint ck = read_checkpoint(path);
  const auto& got = ck.model;
  auto mismatch = [](const std::string& what, long want, long have) {
    throw Error(ErrorKind::invalid_argument, "dimension mismatch: " + what + " expected " + std::to_string(want) +
                                                 ", checkpoint has " + std::to_string(have));
  };
  if (got.input_dim() != model.input_dim()) mismatch("input_dim", model.input_dim(), got.input_dim());
  if (got.embed_dim() != model.embed_dim()) mismatch("embed_dim", model.embed_dim(), got.embed_dim());
  if (got.hidden_dim() != model.hidden_dim()) mismatch("hidden_dim", model.hidden_dim().value_or(0), got.hidden_dim().value_or(0));
  if (got.num_classes() != model.num_classes()) mismatch("num_classes", model.num_classes().value_or(0), got.num_classes().value_or(0));
  model = std::move(ck.model);
}

void save_record(std::ostream& os, const RunRecord& record) {
  os << "iter,mean_sp,mean_sn,loss,lr\n";
  for (const auto& r : record.rows) {
    os << r.iteration << ',' << detail::format_exact(r.mean_sp) << ',' << detail::format_exact(r.mean_sn) << ','
       << detail::format_exact(r.loss) << ',' << detail::format_exact(r.lr) << '\n';
  }
}

void save_record(const std::filesystem::path& path, const RunRecord& record) {
  auto os = open_for_write(path);
  save_record(os, record);
}

json to_json(const TrainConfig& c) {
  json schedule = json::array();
  for (const auto& s : c.lr_schedule) schedule.push_back({{"at_fraction", s.at_fraction}, {"multiplier", s.multiplier}});
  return {
      {"paradigm", to_string(c.paradigm)},
      {"loss", to_string(c.loss.id)},
      {"gamma", c.loss.gamma},
      {"m", c.loss.m},
      {"lr", c.lr},
      {"lr_schedule", std::move(schedule)},
      {"iterations", c.iterations},
      {"batch_size", c.batch_size},
      {"classes_per_batch", c.classes_per_batch},
      {"samples_per_class", c.samples_per_class},
      {"seed", c.seed},
      {"embed_dim", c.embed_dim},
      {"hidden_dim", c.hidden_dim ? json(*c.hidden_dim) : json(nullptr)},
      {"activation", to_string(c.activation)},
  };
}

TrainConfig train_config_from_json(const json& doc) {
  try {
    TrainConfig c;
    const auto paradigm = parse_paradigm(doc.at("paradigm").get<std::string>());
    const auto loss = parse_loss_id(doc.at("loss").get<std::string>());
    const auto act = parse_activation(doc.at("activation").get<std::string>());
    if (!paradigm || !loss || !act) throw Error(ErrorKind::parse, "config has unknown paradigm, loss or activation");
    c.paradigm = *paradigm;
    c.loss = {*loss, doc.at("gamma").get<double>(), doc.at("m").get<double>()};
    c.lr = doc.at("lr").get<double>();
    c.lr_schedule.clear();
    for (const auto& s : doc.at("lr_schedule")) {
      c.lr_schedule.push_back({s.at("at_fraction").get<double>(), s.at("multiplier").get<double>()});
    }
    c.iterations = doc.at("iterations").get<int>();
    c.batch_size = doc.at("batch_size").get<int>();
    c.classes_per_batch = doc.at("classes_per_batch").get<int>();
    c.samples_per_class = doc.at("samples_per_class").get<int>();
    c.seed = doc.at("seed").get<std::uint64_t>();
    c.embed_dim = doc.at("embed_dim").get<int>();
    if (doc.at("hidden_dim").is_null()) {
      c.hidden_dim.reset();
    } else {
      c.hidden_dim = doc.at("hidden_dim").get<int>();
    }
    c.activation = *act;
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, std::string("malformed training config: ") + e.what());
  }
}

json to_json(const ClusterSpec& s) {
  return {{"n_classes", s.n_classes}, {"per_class", s.per_class}, {"dim", s.dim},
          {"center_scale", s.center_scale}, {"noise_sigma", s.noise_sigma}, {"seed", s.seed}};
}

}  // namespace pairsim
