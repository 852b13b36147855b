// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "volseq/net.hpp"

#include <string>

#include "volseq/errors.hpp"
#include "volseq/rng.hpp"

namespace volseq {

void ModelConfig::validate() const {
  if (embed_dim < 1 || heads < 1 || layers < 1 || token_pixels < 1 || seq_len < 1) {
    throw ConfigError("model config counts must be >= 1");
  }
  if (embed_dim % heads != 0) {
    throw ConfigError("heads=" + std::to_string(heads) + " does not divide embed_dim=" +
                      std::to_string(embed_dim));
  }
  if (hidden_dim() < 1) throw ConfigError("mlp_ratio yields empty hidden layer");
}

namespace {

Matrix gaussian_matrix(int rows, int cols, double stddev, SplitMix64& rng) {
  Matrix m = Matrix::zeros(rows, cols);
  for (double& v : m.data) v = stddev * rng.gaussian();
  return m;
}

Matrix constant_matrix(int rows, int cols, double value) {
  Matrix m = Matrix::zeros(rows, cols);
  for (double& v : m.data) v = value;
  return m;
}

}  // namespace

ParamStore init_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  SplitMix64 rng(seed);
  const int d = cfg.embed_dim;
  const int hid = cfg.hidden_dim();
  constexpr double kStd = 0.02;

  ParamStore ps;
  ps.add("in_proj.w", gaussian_matrix(cfg.token_pixels, d, kStd, rng));
  ps.add("in_proj.b", Matrix::zeros(1, d));
  ps.add("pos", gaussian_matrix(cfg.seq_len, d, kStd, rng));
  for (int l = 0; l < cfg.layers; ++l) {
    const std::string pre = "layer." + std::to_string(l) + ".";
    ps.add(pre + "ln1.g", constant_matrix(1, d, 1.0));
    ps.add(pre + "ln1.b", Matrix::zeros(1, d));
    ps.add(pre + "attn.wq", gaussian_matrix(d, d, kStd, rng));
    ps.add(pre + "attn.bq", Matrix::zeros(1, d));
    // No key bias: softmax is invariant to the uniform score shift a key
    // bias induces, so the parameter would be exactly dead.
    ps.add(pre + "attn.wk", gaussian_matrix(d, d, kStd, rng));
    ps.add(pre + "attn.wv", gaussian_matrix(d, d, kStd, rng));
    ps.add(pre + "attn.bv", Matrix::zeros(1, d));
    ps.add(pre + "attn.wo", gaussian_matrix(d, d, kStd, rng));
    ps.add(pre + "attn.bo", Matrix::zeros(1, d));
    ps.add(pre + "ln2.g", constant_matrix(1, d, 1.0));
    ps.add(pre + "ln2.b", Matrix::zeros(1, d));
    ps.add(pre + "mlp.w1", gaussian_matrix(d, hid, kStd, rng));
    ps.add(pre + "mlp.b1", Matrix::zeros(1, hid));
    ps.add(pre + "mlp.w2", gaussian_matrix(hid, d, kStd, rng));
    ps.add(pre + "mlp.b2", Matrix::zeros(1, d));
  }
  ps.add("final_ln.g", constant_matrix(1, d, 1.0));
  ps.add("final_ln.b", Matrix::zeros(1, d));
  ps.add("head.w", gaussian_matrix(d, cfg.token_pixels, kStd, rng));
  ps.add("head.b", Matrix::zeros(1, cfg.token_pixels));

  for (auto& [name, m] : ps) round_to_f32(m);
  return ps;
}

Matrix tokens_to_matrix(const TokenSequence& ts) {
  if (ts.tokens.empty()) throw ShapeError("empty token sequence");
  const int p = static_cast<int>(ts.tokens.front().size());
  Matrix m = Matrix::zeros(ts.total(), p);
  for (int r = 0; r < ts.total(); ++r) {
    const std::vector<float>& t = ts.tokens[static_cast<std::size_t>(r)];
    if (static_cast<int>(t.size()) != p) throw ShapeError("ragged token sequence");
    for (int c = 0; c < p; ++c) m(r, c) = static_cast<double>(t[static_cast<std::size_t>(c)]);
  }
  return m;
}

Matrix normalized_targets(const TokenSequence& ts, double eps) {
  if (ts.tokens.empty()) throw ShapeError("empty token sequence");
  const int p = static_cast<int>(ts.tokens.front().size());
  Matrix m = Matrix::zeros(ts.total(), p);
  for (int r = 0; r < ts.total(); ++r) {
    std::vector<double> t(ts.tokens[static_cast<std::size_t>(r)].begin(),
                          ts.tokens[static_cast<std::size_t>(r)].end());
    if (static_cast<int>(t.size()) != p) throw ShapeError("ragged token sequence");
    std::vector<double> n = normalize_token(t, eps);
    for (int c = 0; c < p; ++c) m(r, c) = n[static_cast<std::size_t>(c)];
  }
  return m;
}

int features_graph(Tape& tape, const ModelConfig& cfg, int tokens_node,
                   const AttentionMask& mask) {
  cfg.validate();
  const Matrix& toks = tape.value(tokens_node);
  if (toks.rows != cfg.seq_len || toks.cols != cfg.token_pixels) {
    throw ShapeError("token matrix is " + std::to_string(toks.rows) + "x" +
                     std::to_string(toks.cols) + ", config wants " +
                     std::to_string(cfg.seq_len) + "x" + std::to_string(cfg.token_pixels));
  }
  if (mask.nk != cfg.seq_len) throw ShapeError("mask size does not match seq_len");

  int x = tape.add_row_vec(tape.matmul(tokens_node, tape.param("in_proj.w")),
                           tape.param("in_proj.b"));
  x = tape.add(x, tape.param("pos"));
  for (int l = 0; l < cfg.layers; ++l) {
    const std::string pre = "layer." + std::to_string(l) + ".";
    int h = tape.layer_norm(x, tape.param(pre + "ln1.g"), tape.param(pre + "ln1.b"));
    int q = tape.add_row_vec(tape.matmul(h, tape.param(pre + "attn.wq")),
                             tape.param(pre + "attn.bq"));
    int k = tape.matmul(h, tape.param(pre + "attn.wk"));
    int v = tape.add_row_vec(tape.matmul(h, tape.param(pre + "attn.wv")),
                             tape.param(pre + "attn.bv"));
    int a = tape.attention(q, k, v, mask, cfg.heads);
    int o = tape.add_row_vec(tape.matmul(a, tape.param(pre + "attn.wo")),
                             tape.param(pre + "attn.bo"));
    x = tape.add(x, o);
    int h2 = tape.layer_norm(x, tape.param(pre + "ln2.g"), tape.param(pre + "ln2.b"));
    int m1 = tape.gelu(tape.add_row_vec(tape.matmul(h2, tape.param(pre + "mlp.w1")),
                                        tape.param(pre + "mlp.b1")));
    int m2 = tape.add_row_vec(tape.matmul(m1, tape.param(pre + "mlp.w2")),
                              tape.param(pre + "mlp.b2"));
    x = tape.add(x, m2);
  }
  return tape.layer_norm(x, tape.param("final_ln.g"), tape.param("final_ln.b"));
}

int forward_graph(Tape& tape, const ModelConfig& cfg, int tokens_node,
                  const AttentionMask& mask) {
  int feats = features_graph(tape, cfg, tokens_node, mask);
  return tape.add_row_vec(tape.matmul(feats, tape.param("head.w")), tape.param("head.b"));
}

Matrix forward(const ParamStore& params, const ModelConfig& cfg, const TokenSequence& ts,
               const AttentionMask& mask) {
  Tape tape(&params);
  int toks = tape.input(tokens_to_matrix(ts));
  int y = forward_graph(tape, cfg, toks, mask);
  return tape.value(y);
}

}  // namespace volseq
