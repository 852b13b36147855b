// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "volseq/tokenizer.hpp"

#include <cmath>
#include <string>

#include "volseq/errors.hpp"

namespace volseq {

int TokenConfig::tokens_per_patch(Dim3 patch) const {
  if (token_dims.d < 1 || token_dims.h < 1 || token_dims.w < 1) {
    throw ConfigError("token dims must be positive");
  }
  if (patch.d % token_dims.d != 0 || patch.h % token_dims.h != 0 ||
      patch.w % token_dims.w != 0) {
    throw ConfigError("token dims " + std::to_string(token_dims.d) + "x" +
                      std::to_string(token_dims.h) + "x" + std::to_string(token_dims.w) +
                      " do not divide patch " + std::to_string(patch.d) + "x" +
                      std::to_string(patch.h) + "x" + std::to_string(patch.w));
  }
  return (patch.d / token_dims.d) * (patch.h / token_dims.h) * (patch.w / token_dims.w);
}

TokenSequence tokenize_sequence(const PatchSequence& seq, const TokenConfig& cfg) {
  if (seq.patches.empty()) throw ConfigError("cannot tokenize empty sequence");
  const Dim3 patch = seq.patches.front().dims;
  const int k = cfg.tokens_per_patch(patch);
  const Dim3 t = cfg.token_dims;
  const int gd = patch.d / t.d, gh = patch.h / t.h, gw = patch.w / t.w;

  TokenSequence ts;
  ts.n_patches = static_cast<int>(seq.patches.size());
  ts.tokens_per_patch = k;
  ts.token_dims = t;
  ts.kind = seq.kind;
  ts.tokens.reserve(static_cast<std::size_t>(ts.n_patches) * k);

  for (const Patch& p : seq.patches) {
    if (!(p.dims == patch)) throw ShapeError("sequence patches have mixed shapes");
    for (int bz = 0; bz < gd; ++bz) {
      for (int by = 0; by < gh; ++by) {
        for (int bx = 0; bx < gw; ++bx) {
          std::vector<float> tok(static_cast<std::size_t>(t.volume()));
          std::size_t o = 0;
          for (int z = 0; z < t.d; ++z) {
            for (int y = 0; y < t.h; ++y) {
              for (int x = 0; x < t.w; ++x) {
                tok[o++] = p.at(bz * t.d + z, by * t.h + y, bx * t.w + x);
              }
            }
          }
          ts.tokens.push_back(std::move(tok));
        }
      }
    }
  }
  return ts;
}

std::vector<Patch> detokenize(const TokenSequence& ts, Dim3 patch_dims,
                              const TokenConfig& cfg) {
  const int k = cfg.tokens_per_patch(patch_dims);
  if (ts.tokens_per_patch != k) {
    throw ShapeError("token sequence declares k=" + std::to_string(ts.tokens_per_patch) +
                     ", dims imply k=" + std::to_string(k));
  }
  if (static_cast<int>(ts.tokens.size()) != ts.n_patches * k) {
    throw ShapeError("token count " + std::to_string(ts.tokens.size()) +
                     " does not equal N*k = " + std::to_string(ts.n_patches * k));
  }
  const Dim3 t = cfg.token_dims;
  const int gd = patch_dims.d / t.d, gh = patch_dims.h / t.h, gw = patch_dims.w / t.w;
  const std::size_t p = static_cast<std::size_t>(t.volume());

  std::vector<Patch> out(static_cast<std::size_t>(ts.n_patches));
  std::size_t idx = 0;
  for (Patch& patch : out) {
    patch.dims = patch_dims;
    patch.voxels.resize(static_cast<std::size_t>(patch_dims.volume()));
    for (int bz = 0; bz < gd; ++bz) {
      for (int by = 0; by < gh; ++by) {
        for (int bx = 0; bx < gw; ++bx) {
          const std::vector<float>& tok = ts.tokens[idx++];
          if (tok.size() != p) throw ShapeError("token pixel count mismatch");
          std::size_t o = 0;
          for (int z = 0; z < t.d; ++z) {
            for (int y = 0; y < t.h; ++y) {
              for (int x = 0; x < t.w; ++x) {
                patch.at(bz * t.d + z, by * t.h + y, bx * t.w + x) = tok[o++];
              }
            }
          }
        }
      }
    }
  }
  return out;
}

namespace {

template <typename T>
std::vector<T> normalize_impl(const std::vector<T>& t, double eps) {
  if (t.empty()) throw ConfigError("cannot normalize empty token");
  double mean = 0.0;
  for (T v : t) mean += static_cast<double>(v);
  mean /= static_cast<double>(t.size());
  double var = 0.0;
  for (T v : t) {
    const double d = static_cast<double>(v) - mean;
    var += d * d;
  }
  var /= static_cast<double>(t.size());
  const double inv = 1.0 / std::sqrt(var + eps);
  std::vector<T> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    out[i] = static_cast<T>((static_cast<double>(t[i]) - mean) * inv);
  }
  return out;
}

}  // namespace

std::vector<float> normalize_token(const std::vector<float>& t, double eps) {
  return normalize_impl(t, eps);
}

std::vector<double> normalize_token(const std::vector<double>& t, double eps) {
  return normalize_impl(t, eps);
}

}  // namespace volseq
