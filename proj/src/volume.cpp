// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "volseq/volume.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "volseq/errors.hpp"
#include "volseq/rng.hpp"

namespace volseq {

namespace {

constexpr std::array<char, 4> kMagic = {'V', 'V', 'O', 'L'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 4);
  // Little-endian host assumed; payload layout is fixed by the format.
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  static_assert(sizeof(T) == 4);
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

}  // namespace

void Volume::validate() const {
  if (dims.d < 1 || dims.h < 1 || dims.w < 1 || modalities < 1) {
    throw ConfigError("volume dims and modality count must be positive");
  }
  if (voxels.size() != voxel_count()) {
    throw ShapeError("voxel payload length does not match M*D*H*W");
  }
  for (float s : {spacing.z, spacing.y, spacing.x}) {
    if (!(s > 0.0f) || !std::isfinite(s)) {
      throw ConfigError("spacing components must be strictly positive and finite");
    }
  }
  if (category && *category < 0) {
    throw ConfigError("category label must be non-negative");
  }
  for (float v : voxels) {
    if (!std::isfinite(v)) throw NumericError("non-finite voxel value");
  }
}

void write_volume(const Volume& v, const std::filesystem::path& path) {
  v.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());

  out.write(kMagic.data(), kMagic.size());
  write_le<std::uint32_t>(out, kVersion);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(v.dims.d));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(v.dims.h));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(v.dims.w));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(v.modalities));
  write_le<std::int32_t>(out, v.category ? static_cast<std::int32_t>(*v.category) : -1);
  write_le<float>(out, v.spacing.z);
  write_le<float>(out, v.spacing.y);
  write_le<float>(out, v.spacing.x);
  out.write(reinterpret_cast<const char*>(v.voxels.data()),
            static_cast<std::streamsize>(v.voxels.size() * sizeof(float)));
  if (!out) throw IoError("write failed: " + path.string());
}

Volume read_volume(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());

  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) {
    throw FormatError("bad magic, not a VVOL file: " + path.string());
  }
  const auto version = read_le<std::uint32_t>(in);
  if (version != kVersion) {
    throw FormatError("unsupported VVOL version " + std::to_string(version));
  }

  Volume v;
  v.dims.d = static_cast<int>(read_le<std::uint32_t>(in));
  v.dims.h = static_cast<int>(read_le<std::uint32_t>(in));
  v.dims.w = static_cast<int>(read_le<std::uint32_t>(in));
  v.modalities = static_cast<int>(read_le<std::uint32_t>(in));
  const auto label = read_le<std::int32_t>(in);
  if (label >= 0) v.category = static_cast<int>(label);
  v.spacing.z = read_le<float>(in);
  v.spacing.y = read_le<float>(in);
  v.spacing.x = read_le<float>(in);
  if (!in) throw TruncationError("VVOL header truncated: " + path.string());

  if (v.dims.d < 1 || v.dims.h < 1 || v.dims.w < 1 || v.modalities < 1) {
    throw FormatError("VVOL header declares empty dims: " + path.string());
  }
  v.voxels.resize(v.voxel_count());
  in.read(reinterpret_cast<char*>(v.voxels.data()),
          static_cast<std::streamsize>(v.voxels.size() * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(v.voxels.size() * sizeof(float))) {
    throw TruncationError("VVOL payload shorter than declared dims: " + path.string());
  }
  v.validate();
  return v;
}

Dim3 blob_sides(int category, Dim3 dims) {
  // Eight distinct brick shapes with near-equal volume, one per coarse
  // category; categories beyond 8 cycle.
  static constexpr std::array<Dim3, 8> kTable = {{
      {4, 6, 9},
      {6, 9, 4},
      {9, 4, 6},
      {6, 6, 6},
      {4, 9, 6},
      {9, 6, 4},
      {6, 4, 9},
      {5, 7, 6},
  }};
  const Dim3 base = kTable[static_cast<std::size_t>(category) % kTable.size()];
  return Dim3{std::min(base.d, dims.d), std::min(base.h, dims.h),
              std::min(base.w, dims.w)};
}

namespace {

// Placement is the first thing drawn from the stream so blob_extent_z can
// reproduce it without generating voxels.
Coord3 blob_origin(const SyntheticSpec& spec, Dim3 dims, SplitMix64& rng) {
  const Dim3 sides = blob_sides(spec.category.value(), dims);
  Coord3 o;
  o.z = static_cast<int>(rng.uniform(static_cast<std::uint64_t>(dims.d - sides.d + 1)));
  o.y = static_cast<int>(rng.uniform(static_cast<std::uint64_t>(dims.h - sides.h + 1)));
  o.x = static_cast<int>(rng.uniform(static_cast<std::uint64_t>(dims.w - sides.w + 1)));
  return o;
}

float base_value(const SyntheticSpec& spec, Dim3 dims, Coord3 blob_lo, Dim3 blob_sz,
                 int z, int y, int x) {
  switch (spec.pattern) {
    case Pattern::kConstant:
      return spec.constant_value;
    case Pattern::kAxisRamp:
      return dims.d > 1 ? static_cast<float>(z) / static_cast<float>(dims.d - 1) : 0.0f;
    case Pattern::kBlob: {
      float v = 0.0f;
      if (dims.d > 1) v += 0.2f * static_cast<float>(z) / static_cast<float>(dims.d - 1);
      if (dims.h > 1) v += 0.1f * static_cast<float>(y) / static_cast<float>(dims.h - 1);
      const bool inside = z >= blob_lo.z && z < blob_lo.z + blob_sz.d &&
                          y >= blob_lo.y && y < blob_lo.y + blob_sz.h &&
                          x >= blob_lo.x && x < blob_lo.x + blob_sz.w;
      if (inside) v += 1.0f;
      return v;
    }
  }
  return 0.0f;
}

}  // namespace

Volume gen_synthetic(const SyntheticSpec& spec, Dim3 dims, int modalities,
                     std::uint64_t seed) {
  if (dims.d < 1 || dims.h < 1 || dims.w < 1) {
    throw ConfigError("synthetic dims must be positive");
  }
  if (modalities < 1) throw ConfigError("modality count must be >= 1");
  if (!spec.modality_offsets.empty() &&
      spec.modality_offsets.size() != static_cast<std::size_t>(modalities)) {
    throw ConfigError("modality_offsets length must equal modality count");
  }
  if (spec.noise_sigma < 0.0f) throw ConfigError("noise_sigma must be >= 0");
  if (spec.pattern == Pattern::kBlob && !spec.category) {
    throw ConfigError("blob pattern requires a category");
  }

  SplitMix64 rng(seed);
  Coord3 blob_lo{0, 0, 0};
  Dim3 blob_sz{0, 0, 0};
  if (spec.pattern == Pattern::kBlob) {
    blob_sz = blob_sides(spec.category.value(), dims);
    blob_lo = blob_origin(spec, dims, rng);
  }

  Volume v;
  v.dims = dims;
  v.modalities = modalities;
  v.category = spec.category;
  v.voxels.resize(v.voxel_count());

  for (int c = 0; c < modalities; ++c) {
    const float offset = spec.modality_offsets.empty() ? 0.0f : spec.modality_offsets[c];
    for (int z = 0; z < dims.d; ++z) {
      for (int y = 0; y < dims.h; ++y) {
        for (int x = 0; x < dims.w; ++x) {
          float val = base_value(spec, dims, blob_lo, blob_sz, z, y, x) + offset;
          if (spec.noise_sigma > 0.0f) {
            val += spec.noise_sigma * static_cast<float>(rng.gaussian());
          }
          v.at(c, z, y, x) = val;
        }
      }
    }
  }
  return v;
}

std::pair<int, int> blob_extent_z(const SyntheticSpec& spec, Dim3 dims,
                                  std::uint64_t seed) {
  if (spec.pattern != Pattern::kBlob || !spec.category) {
    throw ConfigError("blob_extent_z applies to blob volumes only");
  }
  SplitMix64 rng(seed);
  const Dim3 sides = blob_sides(spec.category.value(), dims);
  const Coord3 lo = blob_origin(spec, dims, rng);
  return {lo.z, lo.z + sides.d - 1};
}

}  // namespace volseq
