// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "volseq/autodiff.hpp"
#include "volseq/mask.hpp"
#include "volseq/matrix.hpp"
#include "volseq/params.hpp"
#include "volseq/tokenizer.hpp"

namespace volseq {

struct ModelConfig {
  int embed_dim = 64;
  int heads = 4;
  int layers = 4;
  double mlp_ratio = 4.0;
  int token_pixels = 256;  // p
  int seq_len = 32;        // Nk

  int hidden_dim() const { return static_cast<int>(embed_dim * mlp_ratio); }
  void validate() const;
};

// Weights ~ N(0, 0.02), biases 0, norm scales 1. Values are rounded to
// f32-representable doubles so the f32 checkpoint roundtrips bitwise.
ParamStore init_params(const ModelConfig& cfg, std::uint64_t seed);

Matrix tokens_to_matrix(const TokenSequence& ts);                       // raw voxels
Matrix normalized_targets(const TokenSequence& ts, double eps = 1e-6);  // per-token

// Builds the full graph on the tape: input projection + positional table,
// pre-norm blocks (attention, MLP), final norm. Returns the node id of the
// Nk x embed_dim representation.
int features_graph(Tape& tape, const ModelConfig& cfg, int tokens_node,
                   const AttentionMask& mask);

// features_graph plus the prediction head; node value is Nk x p. Row q
// (0-based) predicts the normalized pixels of token q+2 (1-based); the last
// row is computed but has no target.
int forward_graph(Tape& tape, const ModelConfig& cfg, int tokens_node,
                  const AttentionMask& mask);

// Convenience eval without keeping the tape.
Matrix forward(const ParamStore& params, const ModelConfig& cfg,
               const TokenSequence& ts, const AttentionMask& mask);

}  // namespace volseq
