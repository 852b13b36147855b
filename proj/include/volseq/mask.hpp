// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "volseq/errors.hpp"

namespace volseq {

// Nk x Nk boolean matrix, row-major, 1-indexed accessors.
// A(q, p) = 1 iff (q < i and p < i) or (q >= i and p <= q).
struct AttentionMask {
  int nk = 0;
  int start = 0;  // i; start == nk + 1 marks the all-ones probe mask
  std::vector<std::uint8_t> allow;

  bool at(int q, int p) const {
    return allow[static_cast<std::size_t>(q - 1) * nk + (p - 1)] != 0;
  }
};

inline AttentionMask build_prefix_causal_mask(int nk, int i) {
  if (nk < 2) throw ConfigError("mask needs Nk >= 2, got " + std::to_string(nk));
  if (i < 2 || i > nk) {
    throw ConfigError("start index " + std::to_string(i) + " outside [2, " +
                      std::to_string(nk) + "]");
  }
  AttentionMask m;
  m.nk = nk;
  m.start = i;
  m.allow.assign(static_cast<std::size_t>(nk) * nk, 0);
  for (int q = 1; q <= nk; ++q) {
    for (int p = 1; p <= nk; ++p) {
      const bool on = (q < i && p < i) || (q >= i && p <= q);
      m.allow[static_cast<std::size_t>(q - 1) * nk + (p - 1)] = on ? 1 : 0;
    }
  }
  return m;
}

// Every position sees every position; used by the frozen-encoder probe.
inline AttentionMask bidirectional_mask(int nk) {
  if (nk < 1) throw ConfigError("mask needs Nk >= 1, got " + std::to_string(nk));
  AttentionMask m;
  m.nk = nk;
  m.start = nk + 1;
  m.allow.assign(static_cast<std::size_t>(nk) * nk, 1);
  return m;
}

}  // namespace volseq
