// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "volseq/sequencer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "volseq/errors.hpp"

namespace volseq {

namespace {

void check_crop(const Volume& v, Coord3 o, Dim3 p, int modality) {
  if (modality < 0 || modality >= v.modalities) {
    throw BoundsError("modality index " + std::to_string(modality) + " out of range");
  }
  if (o.z < 0 || o.y < 0 || o.x < 0 || o.z + p.d > v.dims.d || o.y + p.h > v.dims.h ||
      o.x + p.w > v.dims.w) {
    throw BoundsError("patch crop exceeds volume bounds");
  }
}

Patch crop_patch(const Volume& v, Coord3 o, Dim3 p, int modality, int source_id) {
  check_crop(v, o, p, modality);
  Patch out;
  out.dims = p;
  out.voxels.resize(static_cast<std::size_t>(p.volume()));
  out.source_id = source_id;
  out.origin = o;
  out.modality_index = modality;
  out.category = v.category;
  for (int z = 0; z < p.d; ++z) {
    for (int y = 0; y < p.h; ++y) {
      const float* src = &v.voxels[v.index(modality, o.z + z, o.y + y, o.x)];
      float* dst = &out.voxels[out.index(z, y, 0)];
      std::memcpy(dst, src, static_cast<std::size_t>(p.w) * sizeof(float));
    }
  }
  return out;
}

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::istream& is, const char* what) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw TruncationError(std::string("sequence file truncated in ") + what);
  return v;
}

}  // namespace

void SequencerConfig::validate() const {
  if (patch_dims.d < 1 || patch_dims.h < 1 || patch_dims.w < 1) {
    throw ConfigError("patch dims must be positive");
  }
  if (stride < 1) throw ConfigError("stride must be positive");
  if (n_patches < 1) throw ConfigError("n_patches must be positive");
  if (context_mm < 0.0) throw ConfigError("context_mm must be non-negative");
  if (semantic_target_dims.d < 1 || semantic_target_dims.h < 1 ||
      semantic_target_dims.w < 1) {
    throw ConfigError("semantic target dims must be positive");
  }
}

std::vector<Coord3> enumerate_spatial_origins(Dim3 vol_dims, const SequencerConfig& cfg) {
  cfg.validate();
  std::vector<Coord3> out;
  const int z_span = (cfg.n_patches - 1) * cfg.stride + cfg.patch_dims.d;
  const int z_max = vol_dims.d - z_span;
  const int y_max = vol_dims.h - cfg.patch_dims.h;
  const int x_max = vol_dims.w - cfg.patch_dims.w;
  if (z_max < 0 || y_max < 0 || x_max < 0) return out;
  for (int z = 0; z <= z_max; ++z) {
    for (int y = 0; y <= y_max; ++y) {
      for (int x = 0; x <= x_max; ++x) out.push_back({z, y, x});
    }
  }
  return out;
}

PatchSequence build_spatial_sequence(const Volume& v, Coord3 origin,
                                     const SequencerConfig& cfg, int modality,
                                     int source_id) {
  cfg.validate();
  PatchSequence seq;
  seq.kind = SeqKind::kSpatial;
  seq.patches.reserve(static_cast<std::size_t>(cfg.n_patches));
  for (int n = 0; n < cfg.n_patches; ++n) {
    Coord3 o{origin.z + n * cfg.stride, origin.y, origin.x};
    seq.patches.push_back(crop_patch(v, o, cfg.patch_dims, modality, source_id));
  }
  return seq;
}

PatchSequence build_contrast_sequence(const Volume& v, Coord3 origin,
                                      const SequencerConfig& cfg, int source_id) {
  cfg.validate();
  if (v.modalities < 2) {
    throw ConfigError("contrast sequence needs at least 2 modalities, volume has " +
                      std::to_string(v.modalities));
  }
  PatchSequence seq;
  seq.kind = SeqKind::kContrast;
  seq.patches.reserve(static_cast<std::size_t>(v.modalities));
  for (int m = 0; m < v.modalities; ++m) {
    seq.patches.push_back(crop_patch(v, origin, cfg.patch_dims, m, source_id));
  }
  return seq;
}

Patch resize_trilinear(const Patch& p, Dim3 target) {
  if (target.d < 1 || target.h < 1 || target.w < 1) {
    throw ConfigError("resize target dims must be positive");
  }
  Patch out;
  out.dims = target;
  out.voxels.resize(static_cast<std::size_t>(target.volume()));
  out.source_id = p.source_id;
  out.origin = p.origin;
  out.modality_index = p.modality_index;
  out.category = p.category;

  // Corner-aligned: output index i maps to i*(S-1)/(T-1); single-slice axes
  // map everywhere to source index 0.
  auto scale = [](int src, int dst) {
    return dst > 1 ? static_cast<double>(src - 1) / (dst - 1) : 0.0;
  };
  const double sz = scale(p.dims.d, target.d);
  const double sy = scale(p.dims.h, target.h);
  const double sx = scale(p.dims.w, target.w);

  struct Axis {
    int lo, hi;
    double t;
  };
  auto split = [](double coord, int n) {
    Axis a;
    double fl = std::floor(coord);
    a.lo = static_cast<int>(fl);
    a.t = coord - fl;
    if (a.lo >= n - 1) {  // exact upper corner
      a.lo = n - 1;
      a.t = 0.0;
    }
    a.hi = (a.lo + 1 < n) ? a.lo + 1 : a.lo;
    return a;
  };

  for (int z = 0; z < target.d; ++z) {
    Axis az = split(z * sz, p.dims.d);
    for (int y = 0; y < target.h; ++y) {
      Axis ay = split(y * sy, p.dims.h);
      for (int x = 0; x < target.w; ++x) {
        Axis ax = split(x * sx, p.dims.w);
        // Integer coordinates reproduce source voxels bitwise.
        if (az.t == 0.0 && ay.t == 0.0 && ax.t == 0.0) {
          out.at(z, y, x) = p.at(az.lo, ay.lo, ax.lo);
          continue;
        }
        double c00 = p.at(az.lo, ay.lo, ax.lo) * (1.0 - ax.t) +
                     p.at(az.lo, ay.lo, ax.hi) * ax.t;
        double c01 = p.at(az.lo, ay.hi, ax.lo) * (1.0 - ax.t) +
                     p.at(az.lo, ay.hi, ax.hi) * ax.t;
        double c10 = p.at(az.hi, ay.lo, ax.lo) * (1.0 - ax.t) +
                     p.at(az.hi, ay.lo, ax.hi) * ax.t;
        double c11 = p.at(az.hi, ay.hi, ax.lo) * (1.0 - ax.t) +
                     p.at(az.hi, ay.hi, ax.hi) * ax.t;
        double c0 = c00 * (1.0 - ay.t) + c01 * ay.t;
        double c1 = c10 * (1.0 - ay.t) + c11 * ay.t;
        out.at(z, y, x) = static_cast<float>(c0 * (1.0 - az.t) + c1 * az.t);
      }
    }
  }
  return out;
}

Patch extract_semantic_patch(const Volume& v, std::pair<int, int> key_range,
                             const SequencerConfig& cfg, int source_id) {
  cfg.validate();
  if (!v.category.has_value()) {
    throw LabelError("semantic patch requires a labeled volume");
  }
  if (key_range.first > key_range.second || key_range.first < 0 ||
      key_range.second >= v.dims.d) {
    throw BoundsError("key slice range [" + std::to_string(key_range.first) + ", " +
                      std::to_string(key_range.second) + "] invalid for depth " +
                      std::to_string(v.dims.d));
  }
  // Context in slices, rounded half away from zero.
  const int ctx = static_cast<int>(
      std::llround(cfg.context_mm / static_cast<double>(v.spacing.z)));
  int z_lo = std::max(0, key_range.first - ctx);
  int z_hi = std::min(v.dims.d - 1, key_range.second + ctx);

  Patch slab;
  slab.dims = {z_hi - z_lo + 1, v.dims.h, v.dims.w};
  slab.voxels.resize(static_cast<std::size_t>(slab.dims.volume()));
  slab.source_id = source_id;
  slab.origin = {z_lo, 0, 0};
  slab.modality_index = 0;
  slab.category = v.category;
  for (int z = 0; z < slab.dims.d; ++z) {
    const float* src = &v.voxels[v.index(0, z_lo + z, 0, 0)];
    float* dst = &slab.voxels[slab.index(z, 0, 0)];
    std::memcpy(dst, src,
                static_cast<std::size_t>(v.dims.h) * v.dims.w * sizeof(float));
  }
  Patch out = resize_trilinear(slab, cfg.semantic_target_dims);
  out.origin = {z_lo, 0, 0};
  return out;
}

PatchSequence build_semantic_sequence(const std::vector<SemanticEntry>& pool,
                                      int category, const SequencerConfig& cfg,
                                      SplitMix64& rng) {
  cfg.validate();
  std::vector<int> members;
  for (int i = 0; i < static_cast<int>(pool.size()); ++i) {
    const SemanticEntry& e = pool[i];
    if (e.volume == nullptr) throw PoolError("semantic pool entry has no volume");
    if (e.volume->category.has_value() && *e.volume->category == category) {
      members.push_back(i);
    }
  }
  if (static_cast<int>(members.size()) < cfg.n_patches) {
    throw PoolError("category " + std::to_string(category) + " has " +
                    std::to_string(members.size()) + " pool entries, need " +
                    std::to_string(cfg.n_patches));
  }
  // Partial Fisher-Yates: draw N distinct members without replacement.
  for (int n = 0; n < cfg.n_patches; ++n) {
    std::uint64_t j = rng.uniform(members.size() - n);
    std::swap(members[n], members[n + j]);
  }
  PatchSequence seq;
  seq.kind = SeqKind::kSemantic;
  seq.patches.reserve(static_cast<std::size_t>(cfg.n_patches));
  for (int n = 0; n < cfg.n_patches; ++n) {
    const SemanticEntry& e = pool[members[n]];
    Patch p = extract_semantic_patch(*e.volume, e.key_range, cfg, e.source_id);
    p.category = category;
    seq.patches.push_back(std::move(p));
  }
  return seq;
}

void write_sequence(const PatchSequence& seq, const std::filesystem::path& path) {
  if (seq.patches.empty()) throw ConfigError("cannot write empty sequence");
  const Dim3 d = seq.patches.front().dims;
  for (const Patch& p : seq.patches) {
    if (!(p.dims == d)) throw ShapeError("sequence patches have mixed shapes");
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write("VSEQ", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint8_t>(os, static_cast<std::uint8_t>(seq.kind));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(seq.patches.size()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(d.d));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(d.h));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(d.w));
  const std::optional<int> cat = seq.patches.front().category;
  put<std::int32_t>(os, cat.has_value() ? static_cast<std::int32_t>(*cat) : -1);
  for (const Patch& p : seq.patches) {
    os.write(reinterpret_cast<const char*>(p.voxels.data()),
             static_cast<std::streamsize>(p.voxels.size() * sizeof(float)));
  }
  if (!os) throw IoError("write failed for " + path.string());
}

PatchSequence read_sequence(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string() + " for reading");
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "VSEQ", 4) != 0) {
    throw FormatError("bad magic in " + path.string());
  }
  const auto version = take<std::uint32_t>(is, "header");
  if (version != 1) {
    throw FormatError("unsupported sequence version " + std::to_string(version));
  }
  const auto kind = take<std::uint8_t>(is, "header");
  if (kind > 2) throw FormatError("unknown sequence kind " + std::to_string(kind));
  const auto n = take<std::uint32_t>(is, "header");
  const auto d = take<std::uint32_t>(is, "header");
  const auto h = take<std::uint32_t>(is, "header");
  const auto w = take<std::uint32_t>(is, "header");
  const auto cat = take<std::int32_t>(is, "header");
  if (n == 0 || d == 0 || h == 0 || w == 0) {
    throw FormatError("degenerate sequence dims in " + path.string());
  }
  PatchSequence seq;
  seq.kind = static_cast<SeqKind>(kind);
  seq.patches.resize(n);
  const std::size_t per = static_cast<std::size_t>(d) * h * w;
  for (std::uint32_t i = 0; i < n; ++i) {
    Patch& p = seq.patches[i];
    p.dims = {static_cast<int>(d), static_cast<int>(h), static_cast<int>(w)};
    p.voxels.resize(per);
    if (cat >= 0) p.category = cat;
    is.read(reinterpret_cast<char*>(p.voxels.data()),
            static_cast<std::streamsize>(per * sizeof(float)));
    if (!is) throw TruncationError("sequence file truncated in voxel payload");
  }
  return seq;
}

}  // namespace volseq
