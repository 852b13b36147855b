// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "volseq/probe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "volseq/autodiff.hpp"
#include "volseq/errors.hpp"
#include "volseq/mask.hpp"

namespace volseq {

std::vector<double> encode(const ParamStore& params, const ModelConfig& cfg,
                           const TokenSequence& ts) {
  Tape tape(&params);
  const int toks = tape.input(tokens_to_matrix(ts));
  const int feats = features_graph(tape, cfg, toks, bidirectional_mask(cfg.seq_len));
  const Matrix& f = tape.value(feats);
  std::vector<double> out(static_cast<std::size_t>(f.cols), 0.0);
  for (int r = 0; r < f.rows; ++r) {
    for (int c = 0; c < f.cols; ++c) out[static_cast<std::size_t>(c)] += f(r, c);
  }
  for (double& v : out) v /= f.rows;
  return out;
}

std::vector<double> encode_volume(const ParamStore& params, const ModelConfig& mcfg,
                                  const Volume& v, const SequencerConfig& scfg,
                                  const TokenConfig& tcfg) {
  const int span = (scfg.n_patches - 1) * scfg.stride + scfg.patch_dims.d;
  if (v.dims.d < span || v.dims.h < scfg.patch_dims.h || v.dims.w < scfg.patch_dims.w) {
    throw DataError("volume too small for the configured patch sequence");
  }
  const Coord3 origin{(v.dims.d - span) / 2, (v.dims.h - scfg.patch_dims.h) / 2,
                      (v.dims.w - scfg.patch_dims.w) / 2};
  const PatchSequence seq = build_spatial_sequence(v, origin, scfg, 0, 0);
  return encode(params, mcfg, tokenize_sequence(seq, tcfg));
}

namespace {

void softmax_row(std::vector<double>& z) {
  double m = z[0];
  for (double v : z) m = std::max(m, v);
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

}  // namespace

ProbeModel fit_linear_probe(const std::vector<std::vector<double>>& features,
                            const std::vector<int>& labels, int epochs, double lr) {
  if (features.size() != labels.size() || features.empty()) {
    throw ConfigError("probe needs equal nonzero feature/label counts");
  }
  std::set<int> present(labels.begin(), labels.end());
  if (*present.begin() < 0) throw LabelError("negative class label");
  if (present.size() < 2) throw LabelError("probe needs at least 2 classes present");
  const int classes = *present.rbegin() + 1;
  const int dim = static_cast<int>(features.front().size());
  const int n = static_cast<int>(features.size());

  ProbeModel m;
  m.classes = classes;
  m.w = Matrix::zeros(dim, classes);
  m.b = Matrix::zeros(1, classes);

  std::vector<double> z(static_cast<std::size_t>(classes));
  Matrix gw = Matrix::zeros(dim, classes);
  Matrix gb = Matrix::zeros(1, classes);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::fill(gw.data.begin(), gw.data.end(), 0.0);
    std::fill(gb.data.begin(), gb.data.end(), 0.0);
    for (int s = 0; s < n; ++s) {
      const std::vector<double>& x = features[static_cast<std::size_t>(s)];
      if (static_cast<int>(x.size()) != dim) throw ShapeError("ragged probe features");
      for (int c = 0; c < classes; ++c) {
        double v = m.b(0, c);
        for (int d = 0; d < dim; ++d) v += x[static_cast<std::size_t>(d)] * m.w(d, c);
        z[static_cast<std::size_t>(c)] = v;
      }
      softmax_row(z);
      z[static_cast<std::size_t>(labels[static_cast<std::size_t>(s)])] -= 1.0;
      for (int c = 0; c < classes; ++c) {
        const double g = z[static_cast<std::size_t>(c)];
        gb(0, c) += g;
        for (int d = 0; d < dim; ++d) gw(d, c) += x[static_cast<std::size_t>(d)] * g;
      }
    }
    const double scale = lr / n;
    for (std::size_t i = 0; i < m.w.data.size(); ++i) m.w.data[i] -= scale * gw.data[i];
    for (std::size_t i = 0; i < m.b.data.size(); ++i) m.b.data[i] -= scale * gb.data[i];
  }
  return m;
}

std::vector<double> probe_scores(const ProbeModel& m, const std::vector<double>& feature) {
  if (static_cast<int>(feature.size()) != m.w.rows) {
    throw ShapeError("probe feature length mismatch");
  }
  std::vector<double> z(static_cast<std::size_t>(m.classes));
  for (int c = 0; c < m.classes; ++c) {
    double v = m.b(0, c);
    for (int d = 0; d < m.w.rows; ++d) v += feature[static_cast<std::size_t>(d)] * m.w(d, c);
    z[static_cast<std::size_t>(c)] = v;
  }
  softmax_row(z);
  return z;
}

int probe_predict(const ProbeModel& m, const std::vector<double>& feature) {
  const std::vector<double> s = probe_scores(m, feature);
  return static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());
}

double auc_rank(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw ConfigError("AUC needs equal nonzero score/label counts");
  }
  std::size_t n_pos = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw LabelError("AUC labels must be binary");
    n_pos += static_cast<std::size_t>(l);
  }
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw LabelError("AUC needs both classes present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Tied runs share the average of their 1-based ranks (a half-integer, so
  // the positive-rank sum stays exact in double).
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) pos_rank_sum += avg_rank;
    }
    i = j + 1;
  }
  const double u = pos_rank_sum -
                   static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

EvalMetrics eval_metrics(const std::vector<double>& scores,
                         const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw ConfigError("metrics need equal nonzero score/label counts");
  }
  EvalMetrics m;
  m.n = static_cast<int>(scores.size());
  int correct = 0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw LabelError("metrics labels must be binary");
    const int pred = scores[i] > 0.5 ? 1 : 0;
    if (pred == labels[i]) ++correct;
    n_pos += static_cast<std::size_t>(labels[i]);
  }
  m.acc = static_cast<double>(correct) / static_cast<double>(m.n);
  if (n_pos > 0 && n_pos < scores.size()) m.auc = auc_rank(scores, labels);
  return m;
}

EvalMetrics eval_multiclass(const ProbeModel& model,
                            const std::vector<std::vector<double>>& features,
                            const std::vector<int>& labels) {
  if (features.size() != labels.size() || features.empty()) {
    throw ConfigError("metrics need equal nonzero feature/label counts");
  }
  EvalMetrics m;
  m.n = static_cast<int>(features.size());
  std::vector<std::vector<double>> scores(features.size());
  int correct = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    scores[i] = probe_scores(model, features[i]);
    const int pred = static_cast<int>(
        std::max_element(scores[i].begin(), scores[i].end()) - scores[i].begin());
    if (pred == labels[i]) ++correct;
  }
  m.acc = static_cast<double>(correct) / static_cast<double>(m.n);

  // Macro one-vs-rest over classes that appear with both polarities.
  double sum = 0.0;
  int counted = 0;
  for (int c = 0; c < model.classes; ++c) {
    std::vector<double> s(features.size());
    std::vector<int> y(features.size());
    std::size_t pos = 0;
    for (std::size_t i = 0; i < features.size(); ++i) {
      s[i] = scores[i][static_cast<std::size_t>(c)];
      y[i] = labels[i] == c ? 1 : 0;
      pos += static_cast<std::size_t>(y[i]);
    }
    if (pos == 0 || pos == features.size()) continue;
    sum += auc_rank(s, y);
    ++counted;
  }
  if (counted > 0) m.auc = sum / counted;
  return m;
}

}  // namespace volseq
