// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "volseq/types.hpp"

namespace volseq {

// A multi-modality 3D voxel grid. Voxels are stored modality-major, then
// depth, row, column. Immutable by convention once built.
struct Volume {
  Dim3 dims;
  int modalities = 1;
  Spacing spacing;
  std::optional<int> category;
  std::vector<float> voxels;

  std::size_t voxel_count() const {
    return static_cast<std::size_t>(modalities) * dims.volume();
  }

  std::size_t index(int c, int z, int y, int x) const {
    return ((static_cast<std::size_t>(c) * dims.d + z) * dims.h + y) * dims.w + x;
  }
  float at(int c, int z, int y, int x) const { return voxels[index(c, z, y, x)]; }
  float& at(int c, int z, int y, int x) { return voxels[index(c, z, y, x)]; }

  // Throws if any invariant is violated (payload length, spacing, finiteness).
  void validate() const;

  bool operator==(const Volume&) const = default;
};

enum class Pattern {
  kConstant,  // every voxel equals constant_value
  kAxisRamp,  // slice z has value z/(D-1), 0 when D == 1
  kBlob,      // background gradient plus a category-shaped brick
};

struct SyntheticSpec {
  Pattern pattern = Pattern::kConstant;
  float constant_value = 0.0f;
  float noise_sigma = 0.0f;
  std::vector<float> modality_offsets;  // one per modality; empty means all zero
  std::optional<int> category;          // required for kBlob
};

// VVOL container, little-endian:
//   magic "VVOL", u32 version=1, u32 D H W M, i32 category (-1 if absent),
//   f32 sz sy sx, then M*D*H*W f32 voxels in canonical order.
void write_volume(const Volume& v, const std::filesystem::path& path);
Volume read_volume(const std::filesystem::path& path);

// Deterministic in (spec, dims, modalities, seed). Channel c is the base
// pattern plus modality_offsets[c] plus gaussian noise.
Volume gen_synthetic(const SyntheticSpec& spec, Dim3 dims, int modalities,
                     std::uint64_t seed);

// Brick side lengths for a category; clamped to fit dims.
Dim3 blob_sides(int category, Dim3 dims);

// The z-extent [lo, hi] the blob occupies for these generator inputs.
// Re-derives the placement draw of gen_synthetic, so it can serve as the
// key-slice range for semantic sequencing of synthetic volumes.
std::pair<int, int> blob_extent_z(const SyntheticSpec& spec, Dim3 dims,
                                  std::uint64_t seed);

}  // namespace volseq
