// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "volseq/net.hpp"
#include "volseq/params.hpp"
#include "volseq/sequencer.hpp"
#include "volseq/tokenizer.hpp"
#include "volseq/volume.hpp"

namespace volseq {

// Frozen-encoder feature: forward under the all-allowed mask, mean over the
// Nk final-norm token representations (prediction head unused).
std::vector<double> encode(const ParamStore& params, const ModelConfig& cfg,
                           const TokenSequence& ts);

// Feature for a whole volume: spatial sequence at the centered origin of
// channel 0, tokenized, then encode().
std::vector<double> encode_volume(const ParamStore& params, const ModelConfig& mcfg,
                                  const Volume& v, const SequencerConfig& scfg,
                                  const TokenConfig& tcfg);

struct ProbeModel {
  Matrix w;  // embed_dim x C
  Matrix b;  // 1 x C
  int classes = 0;
};

// Multinomial logistic regression from zero init by full-batch gradient
// descent; deterministic in its inputs.
ProbeModel fit_linear_probe(const std::vector<std::vector<double>>& features,
                            const std::vector<int>& labels, int epochs, double lr);

std::vector<double> probe_scores(const ProbeModel& m, const std::vector<double>& feature);
int probe_predict(const ProbeModel& m, const std::vector<double>& feature);

// Mann-Whitney rank AUC, ties counted half. Requires both classes.
double auc_rank(const std::vector<double>& scores, const std::vector<int>& labels);

struct EvalMetrics {
  double acc = 0.0;
  std::optional<double> auc;  // empty when only one class is present
  int n = 0;
};

// Binary: scores are class-1 scores, acc thresholds at 0.5 (argmax of the
// two class probabilities). One-class labels leave auc unset.
EvalMetrics eval_metrics(const std::vector<double>& scores,
                         const std::vector<int>& labels);

// Multiclass accuracy plus macro one-vs-rest AUC over the score matrix.
EvalMetrics eval_multiclass(const ProbeModel& m,
                            const std::vector<std::vector<double>>& features,
                            const std::vector<int>& labels);

}  // namespace volseq
