// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "volseq/mask.hpp"
#include "volseq/net.hpp"
#include "volseq/numerics.hpp"
#include "volseq/rng.hpp"

namespace volseq {

namespace {

Matrix random_matrix(int rows, int cols, SplitMix64& rng, double scale = 1.0) {
  Matrix m = Matrix::zeros(rows, cols);
  for (double& v : m.data) v = scale * rng.gaussian();
  return m;
}

// At init scale the attention weights are nearly uniform and some projection
// gradients fall to ~1e-7, below what central differences resolve at h=1e-4.
// Checking at a generic point keeps every gradient finite-difference-visible.
void perturb_params(ParamStore& ps, double sigma, std::uint64_t seed) {
  SplitMix64 rng(mix64(seed));
  for (auto& [name, m] : ps) {
    for (double& v : m.data) v += sigma * rng.gaussian();
  }
}

}  // namespace

std::vector<NamedGradReport> standard_gradchecks(std::uint64_t seed, double h, double tol) {
  std::vector<NamedGradReport> out;

  {  // Attention alone: q, k, v as free parameters under a prefix mask.
    const int nk = 6, dim = 8, heads = 2;
    SplitMix64 rng(mix64(seed));
    ParamStore ps;
    ps.add("q", random_matrix(nk, dim, rng, 0.5));
    ps.add("k", random_matrix(nk, dim, rng, 0.5));
    ps.add("v", random_matrix(nk, dim, rng, 0.5));
    const AttentionMask mask = build_prefix_causal_mask(nk, 3);
    Objective obj{[&](Tape& t) {
      return t.sum_squares(t.attention(t.param("q"), t.param("k"), t.param("v"), mask,
                                       heads));
    }};
    out.push_back({"attention", gradcheck(obj, ps, h, tol)});
  }

  {  // One transformer block end to end.
    ModelConfig cfg;
    cfg.embed_dim = 8;
    cfg.heads = 2;
    cfg.layers = 1;
    cfg.mlp_ratio = 2.0;
    cfg.token_pixels = 6;
    cfg.seq_len = 5;
    ParamStore ps = init_params(cfg, seed + 1);
    perturb_params(ps, 0.25, seed + 11);
    SplitMix64 rng(mix64(seed + 2));
    const Matrix tokens = random_matrix(cfg.seq_len, cfg.token_pixels, rng);
    const AttentionMask mask = build_prefix_causal_mask(cfg.seq_len, 3);
    Objective obj{[&](Tape& t) {
      return t.sum_squares(features_graph(t, cfg, t.input(tokens), mask));
    }};
    out.push_back({"block", gradcheck(obj, ps, h, tol)});
  }

  {  // Full pre-training loss at a small config.
    ModelConfig cfg;
    cfg.embed_dim = 16;
    cfg.heads = 4;
    cfg.layers = 2;
    cfg.mlp_ratio = 2.0;
    cfg.token_pixels = 8;
    cfg.seq_len = 8;
    ParamStore ps = init_params(cfg, seed + 3);
    perturb_params(ps, 0.25, seed + 12);
    SplitMix64 rng(mix64(seed + 4));
    const Matrix tokens = random_matrix(cfg.seq_len, cfg.token_pixels, rng);
    Matrix targets = random_matrix(cfg.seq_len, cfg.token_pixels, rng);
    const int start = 4;
    const AttentionMask mask = build_prefix_causal_mask(cfg.seq_len, start);
    Objective obj{[&](Tape& t) {
      return t.ar_loss(forward_graph(t, cfg, t.input(tokens), mask), targets, start);
    }};
    out.push_back({"full_loss", gradcheck(obj, ps, h, tol)});
  }

  return out;
}

}  // namespace volseq
