// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "volseq/rng.hpp"
#include "volseq/types.hpp"
#include "volseq/volume.hpp"

namespace volseq {

struct Patch {
  Dim3 dims;
  std::vector<float> voxels;  // d*h*w, depth/row/col order
  int source_id = 0;
  Coord3 origin;
  int modality_index = 0;
  std::optional<int> category;

  std::size_t index(int z, int y, int x) const {
    return (static_cast<std::size_t>(z) * dims.h + y) * dims.w + x;
  }
  float at(int z, int y, int x) const { return voxels[index(z, y, x)]; }
  float& at(int z, int y, int x) { return voxels[index(z, y, x)]; }
};

enum class SeqKind : std::uint8_t { kSpatial = 0, kContrast = 1, kSemantic = 2 };

struct PatchSequence {
  std::vector<Patch> patches;
  SeqKind kind = SeqKind::kSpatial;
};

struct SequencerConfig {
  Dim3 patch_dims{8, 16, 16};
  int stride = 2;                      // depth step between consecutive patches
  int n_patches = 4;                   // N
  double context_mm = 30.0;            // extra slices around key slices
  Dim3 semantic_target_dims{8, 16, 16};

  void validate() const;
};

// All origins (z, y, x) where N strided patches fit:
//   z + (N-1)*stride + d <= D,  y + h <= H,  x + w <= W.
// y and x enumerate every anchor with step 1; lexicographic order.
// A patch larger than the volume yields an empty list.
std::vector<Coord3> enumerate_spatial_origins(Dim3 vol_dims, const SequencerConfig& cfg);

// Patch n (1-indexed) is cropped at z-origin z + (n-1)*stride from one channel.
PatchSequence build_spatial_sequence(const Volume& v, Coord3 origin,
                                     const SequencerConfig& cfg, int modality = 0,
                                     int source_id = 0);

// Patch n is the crop of modality n-1 at the shared origin; N = M.
PatchSequence build_contrast_sequence(const Volume& v, Coord3 origin,
                                      const SequencerConfig& cfg, int source_id = 0);

// Crops the slab [z_lo - round(context_mm/sz), z_hi + round(context_mm/sz)]
// clamped to the volume, full H x W, then resizes to semantic_target_dims.
Patch extract_semantic_patch(const Volume& v, std::pair<int, int> key_range,
                             const SequencerConfig& cfg, int source_id = 0);

struct SemanticEntry {
  const Volume* volume = nullptr;
  std::pair<int, int> key_range{0, 0};
  int source_id = 0;
};

// Draws N distinct pool entries of the category uniformly without replacement.
PatchSequence build_semantic_sequence(const std::vector<SemanticEntry>& pool,
                                      int category, const SequencerConfig& cfg,
                                      SplitMix64& rng);

// Trilinear interpolation with corner-aligned sampling.
Patch resize_trilinear(const Patch& p, Dim3 target);

// VSEQ container, little-endian:
//   magic "VSEQ", u32 version=1, u8 kind, u32 N d h w, i32 category (-1 if
//   absent), then N*d*h*w f32 voxels, patch-major.
void write_sequence(const PatchSequence& seq, const std::filesystem::path& path);
PatchSequence read_sequence(const std::filesystem::path& path);

}  // namespace volseq
