// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "volseq/sequencer.hpp"
#include "volseq/types.hpp"

namespace volseq {

struct TokenConfig {
  Dim3 token_dims{4, 8, 8};

  // Throws ConfigError unless token_dims divides patch componentwise.
  int tokens_per_patch(Dim3 patch) const;
};

struct TokenSequence {
  std::vector<std::vector<float>> tokens;  // N*k vectors of length p
  int n_patches = 0;                       // N
  int tokens_per_patch = 0;                // k
  Dim3 token_dims;
  SeqKind kind = SeqKind::kSpatial;

  int total() const { return n_patches * tokens_per_patch; }
  int pixels() const { return static_cast<int>(token_dims.volume()); }
};

// Tokens are patch-major; inside a patch the token grid is walked in
// depth, row, column order. Voxels inside a token keep the same order.
TokenSequence tokenize_sequence(const PatchSequence& seq, const TokenConfig& cfg);

// Exact inverse of tokenize_sequence on the voxel payload.
std::vector<Patch> detokenize(const TokenSequence& ts, Dim3 patch_dims,
                              const TokenConfig& cfg);

// (t - mean) / sqrt(population_var + eps). Targets only, never inputs.
std::vector<float> normalize_token(const std::vector<float>& t, double eps = 1e-6);
std::vector<double> normalize_token(const std::vector<double>& t, double eps = 1e-6);

}  // namespace volseq
