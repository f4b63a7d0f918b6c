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

#include "pairsim/evalkit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <thread>

#include "format.hpp"
#include "pairsim/error.hpp"

namespace pairsim {
namespace {

Eigen::MatrixXd cosine_matrix(const Eigen::MatrixXd& embeddings) {
  const Eigen::MatrixXd unit = normalize_rows(embeddings);
  Eigen::MatrixXd sims = unit * unit.transpose();
  return sims.unaryExpr([](double s) { return clamp_similarity(s); });
}

}  // namespace

std::map<int, double> recall_at_k(const Eigen::MatrixXd& embeddings, std::span<const int> labels,
                                  std::span<const int> ks) {
  const auto m = embeddings.rows();
  if (m < 2 || static_cast<std::size_t>(m) != labels.size()) {
    throw Error(ErrorKind::invalid_argument, "recall@k needs >= 2 labelled samples");
  }
  if (ks.empty()) throw Error(ErrorKind::invalid_argument, "no k values");
  for (int k : ks) {
    if (k < 1 || k >= m) {
      throw Error(ErrorKind::invalid_argument, "k = " + std::to_string(k) + " must lie in [1, corpus size)");
    }
  }
  const Eigen::MatrixXd sims = cosine_matrix(embeddings);
  const int kmax = *std::max_element(ks.begin(), ks.end());

  // First neighbour rank (0-based) holding a same-class item, per query.
  std::vector<int> first_hit(static_cast<std::size_t>(m), std::numeric_limits<int>::max());
  std::vector<int> order(static_cast<std::size_t>(m - 1));
  for (Eigen::Index q = 0; q < m; ++q) {
    std::size_t w = 0;
    for (Eigen::Index o = 0; o < m; ++o) {
      if (o != q) order[w++] = static_cast<int>(o);
    }
    std::partial_sort(order.begin(), order.begin() + kmax, order.end(), [&](int a, int b) {
      const double sa = sims(q, a);
      const double sb = sims(q, b);
      return sa != sb ? sa > sb : a < b;
    });
    for (int r = 0; r < kmax; ++r) {
      if (labels[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] == labels[static_cast<std::size_t>(q)]) {
        first_hit[static_cast<std::size_t>(q)] = r;
        break;
      }
    }
  }
  std::map<int, double> out;
  for (int k : ks) {
    const auto hits = std::count_if(first_hit.begin(), first_hit.end(), [k](int r) { return r < k; });
    out[k] = static_cast<double>(hits) / static_cast<double>(m);
  }
  return out;
}

std::map<double, double> tar_at_far(std::span<const double> genuine, std::span<const double> impostor,
                                    std::span<const double> far_targets) {
  if (genuine.empty() || impostor.empty()) {
    throw Error(ErrorKind::invalid_argument, "TAR@FAR needs genuine and impostor scores");
  }
  std::vector<double> imp(impostor.begin(), impostor.end());
  std::sort(imp.begin(), imp.end(), std::greater<>());
  const double n_imp = static_cast<double>(imp.size());
  std::map<double, double> out;
  for (double far : far_targets) {
    if (!(far > 0.0 && far <= 1.0)) throw Error(ErrorKind::invalid_argument, "FAR targets must lie in (0, 1]");
    if (far < 1.0 / n_imp) throw Error(ErrorKind::invalid_argument, "insufficient impostor pairs");
    const auto allowed = static_cast<std::size_t>(std::floor(far * n_imp + 1e-9));
    // Smallest inclusive threshold accepting at most `allowed` impostors:
    // just above the (allowed + 1)-th largest impostor score.
    const double threshold = allowed >= imp.size() ? -std::numeric_limits<double>::infinity()
                                                   : std::nextafter(imp[allowed], std::numeric_limits<double>::infinity());
    const auto accepted = std::count_if(genuine.begin(), genuine.end(), [threshold](double s) { return s >= threshold; });
    out[far] = static_cast<double>(accepted) / static_cast<double>(genuine.size());
  }
  return out;
}

ScatterResult similarity_scatter(const EmbeddingModel& model, const LabeledDataset& dataset, bool all_pairs) {
  const Eigen::MatrixXd sims = cosine_matrix(model.embed(dataset.features));
  const auto m = dataset.size();
  ScatterResult out;
  for (Eigen::Index a = 0; a < m; ++a) {
    const int y = dataset.labels[static_cast<std::size_t>(a)];
    std::vector<double> sp;
    std::vector<double> sn;
    for (Eigen::Index o = 0; o < m; ++o) {
      if (o == a) continue;
      (dataset.labels[static_cast<std::size_t>(o)] == y ? sp : sn).push_back(sims(a, o));
    }
    if (sp.empty() || sn.empty()) {
      ++out.skipped;
      continue;
    }
    if (all_pairs) {
      for (double p : sp) {
        for (double n : sn) out.points.push_back({n, p});
      }
    } else {
      out.points.push_back({*std::max_element(sn.begin(), sn.end()), *std::min_element(sp.begin(), sp.end())});
    }
  }
  return out;
}

Concentration concentration(std::span<const SimilarityPoint> points) {
  Concentration c;
  if (points.empty()) return c;
  const double n = static_cast<double>(points.size());
  for (const auto& p : points) {
    c.mean_sn += p.sn;
    c.mean_sp += p.sp;
  }
  c.mean_sn /= n;
  c.mean_sp /= n;
  for (const auto& p : points) {
    c.variance += (p.sn - c.mean_sn) * (p.sn - c.mean_sn) + (p.sp - c.mean_sp) * (p.sp - c.mean_sp);
  }
  c.variance /= n;
  return c;
}

PairScores pair_scores(const Eigen::MatrixXd& embeddings, std::span<const int> labels) {
  const Eigen::MatrixXd sims = cosine_matrix(embeddings);
  PairScores out;
  for (Eigen::Index i = 0; i < sims.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < sims.rows(); ++j) {
      (labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)] ? out.genuine : out.impostor)
          .push_back(sims(i, j));
    }
  }
  return out;
}

MetricsReport evaluate(const EmbeddingModel& model, const LabeledDataset& dataset, std::span<const int> ks,
                       std::span<const double> far_targets) {
  validate(dataset);
  const Eigen::MatrixXd emb = model.embed(dataset.features);
  MetricsReport r;
  std::vector<int> all_ks(ks.begin(), ks.end());
  if (std::find(all_ks.begin(), all_ks.end(), 1) == all_ks.end()) all_ks.push_back(1);
  r.recall_at_k = recall_at_k(emb, dataset.labels, all_ks);
  r.rank1 = r.recall_at_k.at(1);
  if (!far_targets.empty()) {
    const auto scores = pair_scores(emb, dataset.labels);
    r.tar_at_far = tar_at_far(scores.genuine, scores.impostor, far_targets);
  }
  r.pair_scatter = similarity_scatter(model, dataset).points;
  r.concentration = concentration(r.pair_scatter);
  return r;
}

void write_metrics_csv(std::ostream& os, const MetricsReport& r) {
  os << "metric,key,value\n";
  for (const auto& [k, v] : r.recall_at_k) os << "recall_at_k," << k << ',' << detail::format_exact(v) << '\n';
  os << "rank1,," << detail::format_exact(r.rank1) << '\n';
  for (const auto& [far, tar] : r.tar_at_far) {
    os << "tar_at_far," << detail::format_exact(far) << ',' << detail::format_exact(tar) << '\n';
  }
  os << "scatter,count," << r.pair_scatter.size() << '\n';
  os << "scatter,mean_sn," << detail::format_exact(r.concentration.mean_sn) << '\n';
  os << "scatter,mean_sp," << detail::format_exact(r.concentration.mean_sp) << '\n';
  os << "scatter,variance," << detail::format_exact(r.concentration.variance) << '\n';
}

nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json recall = nlohmann::json::object();
  for (const auto& [k, v] : r.recall_at_k) recall[std::to_string(k)] = v;
  nlohmann::json tar = nlohmann::json::object();
  for (const auto& [far, v] : r.tar_at_far) tar[detail::format_exact(far)] = v;
  return {{"recall_at_k", recall},
          {"rank1", r.rank1},
          {"tar_at_far", tar},
          {"scatter",
           {{"count", r.pair_scatter.size()},
            {"mean_sn", r.concentration.mean_sn},
            {"mean_sp", r.concentration.mean_sp},
            {"variance", r.concentration.variance}}}};
}

void write_scatter_csv(std::ostream& os, std::span<const SimilarityPoint> points) {
  os << "sn,sp\n";
  for (const auto& p : points) os << detail::format_exact(p.sn) << ',' << detail::format_exact(p.sp) << '\n';
}

std::vector<SweepRow> sweep(const LabeledDataset& train_set, const LabeledDataset& eval_set,
                            const TrainConfig& base_config, SweepAxis axis, std::span<const double> values, int jobs) {
  if (values.empty()) throw Error(ErrorKind::invalid_argument, "sweep needs at least one value");
  validate(train_set);
  validate(eval_set);
  std::vector<TrainConfig> configs;
  for (double v : values) {
    TrainConfig c = base_config;
    (axis == SweepAxis::gamma ? c.loss.gamma : c.loss.m) = v;
    validate(c);
    configs.push_back(c);
  }

  std::vector<SweepRow> rows(values.size());
  std::vector<std::exception_ptr> errors(values.size());
  const int one = 1;
  auto run = [&](std::size_t k) {
    try {
      const RunRecord rec = train(train_set, configs[k]);
      const auto r1 = recall_at_k(rec.model.embed(eval_set.features), eval_set.labels, std::span<const int>(&one, 1));
      rows[k] = {values[k], r1.at(1)};
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, static_cast<int>(values.size())));
  if (workers == 1) {
    for (std::size_t k = 0; k < values.size(); ++k) run(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < values.size(); k = next++) run(k);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, SweepAxis axis, std::span<const SweepRow> rows) {
  os << (axis == SweepAxis::gamma ? "gamma" : "m") << ",recall_at_1\n";
  for (const auto& r : rows) os << detail::format_exact(r.value) << ',' << detail::format_exact(r.recall_at_1) << '\n';
}

}  // namespace pairsim
