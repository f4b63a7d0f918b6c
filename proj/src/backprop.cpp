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

#include "pairsim/backprop.hpp"

#include <cmath>
#include <string>

#include "pairsim/error.hpp"

namespace pairsim {
namespace {

struct Forward {
  Eigen::MatrixXd pre;     // first-layer output before the activation (two-layer only)
  Eigen::MatrixXd hidden;  // after the activation (two-layer only)
  Eigen::MatrixXd raw;     // B x D embeddings
  Eigen::VectorXd norms;
  Eigen::MatrixXd unit;
  Eigen::MatrixXd class_unit;
  Eigen::VectorXd class_norms;
};

Eigen::VectorXd row_norms(const Eigen::MatrixXd& m) { return m.rowwise().norm(); }

Forward forward(const EmbeddingModel& model, const Batch& batch, Paradigm paradigm, SimilarityKind kind) {
  validate(model);
  if (batch.features.rows() != static_cast<Eigen::Index>(batch.labels.size())) {
    throw Error(ErrorKind::invalid_argument, "batch labels do not match feature rows");
  }
  if (batch.features.cols() != model.input_dim()) {
    throw Error(ErrorKind::invalid_argument,
                "batch dimension " + std::to_string(batch.features.cols()) +
                    " does not match model input dimension " + std::to_string(model.input_dim()));
  }
  if (paradigm == Paradigm::class_level && !model.class_weights) {
    throw Error(ErrorKind::invalid_argument, "class-level paradigm needs class weights");
  }
  if (paradigm == Paradigm::pair_wise && kind == SimilarityKind::inner_product) {
    throw Error(ErrorKind::invalid_argument, "inner-product similarity is class-level only");
  }

  Forward f;
  if (model.layers.size() == 2) {
    f.pre = batch.features * model.layers[0].transpose();
    switch (model.activation) {
      case Activation::none: f.hidden = f.pre; break;
      case Activation::relu: f.hidden = f.pre.cwiseMax(0.0); break;
      case Activation::tanh: f.hidden = f.pre.array().tanh().matrix(); break;
    }
    f.raw = f.hidden * model.layers[1].transpose();
  } else {
    f.raw = batch.features * model.layers[0].transpose();
  }
  if (kind == SimilarityKind::cosine) {
    f.norms = row_norms(f.raw);
    f.unit = normalize_rows(f.raw);
    if (paradigm == Paradigm::class_level) {
      f.class_norms = row_norms(*model.class_weights);
      f.class_unit = normalize_rows(*model.class_weights);
    }
  }
  return f;
}

std::vector<AnchorGroup> groups_from(const Forward& f, const EmbeddingModel& model, const Batch& batch,
                                     Paradigm paradigm, SimilarityKind kind) {
  const auto b = static_cast<int>(batch.labels.size());
  std::vector<AnchorGroup> out;
  out.reserve(static_cast<std::size_t>(b));
  if (paradigm == Paradigm::class_level) {
    const auto n = static_cast<int>(model.class_weights->rows());
    for (int a = 0; a < b; ++a) {
      const int y = batch.labels[static_cast<std::size_t>(a)];
      if (y < 0 || y >= n) throw Error(ErrorKind::invalid_argument, "label " + std::to_string(y) + " out of range");
      AnchorGroup g;
      g.anchor = a;
      for (int j = 0; j < n; ++j) {
        const double s = kind == SimilarityKind::cosine
                             ? clamp_similarity(f.unit.row(a).dot(f.class_unit.row(j)))
                             : f.raw.row(a).dot(model.class_weights->row(j));
        if (j == y) {
          g.positives.push_back(j);
          g.group.sp.push_back(s);
        } else {
          g.negatives.push_back(j);
          g.group.sn.push_back(s);
        }
      }
      out.push_back(std::move(g));
    }
    return out;
  }
  for (int a = 0; a < b; ++a) {
    AnchorGroup g;
    g.anchor = a;
    for (int o = 0; o < b; ++o) {
      if (o == a) continue;
      const double s = clamp_similarity(f.unit.row(a).dot(f.unit.row(o)));
      if (batch.labels[static_cast<std::size_t>(o)] == batch.labels[static_cast<std::size_t>(a)]) {
        g.positives.push_back(o);
        g.group.sp.push_back(s);
      } else {
        g.negatives.push_back(o);
        g.group.sn.push_back(s);
      }
    }
    if (g.positives.empty() || g.negatives.empty()) continue;
    out.push_back(std::move(g));
  }
  return out;
}

// Projects a gradient on unit vectors back onto the raw vectors.
Eigen::MatrixXd through_normalization(const Eigen::MatrixXd& d_unit, const Eigen::MatrixXd& unit,
                                      const Eigen::VectorXd& norms) {
  Eigen::MatrixXd d_raw(d_unit.rows(), d_unit.cols());
  for (Eigen::Index r = 0; r < d_unit.rows(); ++r) {
    const double radial = d_unit.row(r).dot(unit.row(r));
    d_raw.row(r) = (d_unit.row(r) - radial * unit.row(r)) / norms(r);
  }
  return d_raw;
}

}  // namespace

std::string_view to_string(Paradigm p) {
  return p == Paradigm::class_level ? "class_level" : "pair_wise";
}

std::optional<Paradigm> parse_paradigm(std::string_view name) {
  if (name == "class_level") return Paradigm::class_level;
  if (name == "pair_wise") return Paradigm::pair_wise;
  return std::nullopt;
}

SimilarityKind similarity_kind_for(LossId id) {
  return id == LossId::softmax ? SimilarityKind::inner_product : SimilarityKind::cosine;
}

std::vector<AnchorGroup> batch_groups(const EmbeddingModel& model, const Batch& batch, Paradigm paradigm,
                                      SimilarityKind kind) {
  const Forward f = forward(model, batch, paradigm, kind);
  return groups_from(f, model, batch, paradigm, kind);
}

BatchGrad backprop_to_params(const EmbeddingModel& model, const Batch& batch, Paradigm paradigm,
                             SimilarityKind kind, const GroupLoss& loss) {
  const Forward f = forward(model, batch, paradigm, kind);
  const auto groups = groups_from(f, model, batch, paradigm, kind);
  if (groups.empty()) {
    throw Error(ErrorKind::invalid_argument, "batch has no anchor with both positives and negatives");
  }

  const bool cosine = kind == SimilarityKind::cosine;
  const Eigen::MatrixXd& emb = cosine ? f.unit : f.raw;
  Eigen::MatrixXd d_emb = Eigen::MatrixXd::Zero(emb.rows(), emb.cols());
  Eigen::MatrixXd d_cls;
  const Eigen::MatrixXd* cls = nullptr;
  if (paradigm == Paradigm::class_level) {
    cls = cosine ? &f.class_unit : &*model.class_weights;
    d_cls = Eigen::MatrixXd::Zero(cls->rows(), cls->cols());
  }

  BatchGrad out;
  std::size_t n_sp = 0;
  std::size_t n_sn = 0;
  for (const auto& g : groups) {
    const LossGrad lg = loss(g.group);
    if (!std::isfinite(lg.value)) {
      throw Error(ErrorKind::numeric, "non-finite loss at anchor " + std::to_string(g.anchor));
    }
    if (lg.d_sp.size() != g.group.k() || lg.d_sn.size() != g.group.l()) {
      throw Error(ErrorKind::invalid_argument, "loss gradient has wrong shape");
    }
    out.loss += lg.value;
    for (double s : g.group.sp) out.mean_sp += s;
    for (double s : g.group.sn) out.mean_sn += s;
    n_sp += g.group.k();
    n_sn += g.group.l();

    auto accumulate = [&](const std::vector<int>& others, const std::vector<double>& d) {
      for (std::size_t k = 0; k < others.size(); ++k) {
        const int o = others[k];
        const double gk = d[k];
        if (gk == 0.0) continue;
        if (cls != nullptr) {
          d_emb.row(g.anchor) += gk * cls->row(o);
          d_cls.row(o) += gk * emb.row(g.anchor);
        } else {
          d_emb.row(g.anchor) += gk * emb.row(o);
          d_emb.row(o) += gk * emb.row(g.anchor);
        }
      }
    };
    accumulate(g.positives, lg.d_sp);
    accumulate(g.negatives, lg.d_sn);
  }
  out.anchors = groups.size();
  const double inv = 1.0 / static_cast<double>(groups.size());
  out.loss *= inv;
  out.mean_sp /= static_cast<double>(n_sp);
  out.mean_sn /= static_cast<double>(n_sn);

  Eigen::MatrixXd d_raw = cosine ? through_normalization(d_emb, f.unit, f.norms) : d_emb;
  d_raw *= inv;

  out.grads = ModelGrads::zeros_like(model);
  if (cls != nullptr) {
    d_cls *= inv;
    *out.grads.class_weights = cosine ? through_normalization(d_cls, f.class_unit, f.class_norms) : d_cls;
  }
  if (model.layers.size() == 2) {
    out.grads.layers[1] = d_raw.transpose() * f.hidden;
    Eigen::MatrixXd d_hidden = d_raw * model.layers[1];
    switch (model.activation) {
      case Activation::none: break;
      case Activation::relu: d_hidden = d_hidden.cwiseProduct((f.pre.array() > 0.0).cast<double>().matrix()); break;
      case Activation::tanh: d_hidden = d_hidden.cwiseProduct((1.0 - f.hidden.array().square()).matrix()); break;
    }
    out.grads.layers[0] = d_hidden.transpose() * batch.features;
  } else {
    out.grads.layers[0] = d_raw.transpose() * batch.features;
  }
  return out;
}

BatchGrad backprop_to_params(const EmbeddingModel& model, const Batch& batch, Paradigm paradigm,
                             const LossConfig& cfg) {
  return backprop_to_params(model, batch, paradigm, similarity_kind_for(cfg.id),
                            [&cfg](const SimilarityGroup& g) { return loss_and_grad(cfg, g); });
}

}  // namespace pairsim
