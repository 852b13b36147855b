// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace volseq {

// Extents in (depth, height, width) order.
struct Dim3 {
  int d = 0;
  int h = 0;
  int w = 0;

  std::int64_t volume() const {
    return static_cast<std::int64_t>(d) * h * w;
  }
  bool operator==(const Dim3&) const = default;
};

// A voxel position in (z, y, x) order.
struct Coord3 {
  int z = 0;
  int y = 0;
  int x = 0;

  bool operator==(const Coord3&) const = default;
};

// Millimeters per voxel along (z, y, x).
struct Spacing {
  float z = 1.0f;
  float y = 1.0f;
  float x = 1.0f;

  bool operator==(const Spacing&) const = default;
};

}  // namespace volseq
