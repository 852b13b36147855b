// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "volseq/net.hpp"
#include "volseq/numerics.hpp"
#include "volseq/params.hpp"
#include "volseq/rng.hpp"
#include "volseq/tokenizer.hpp"

namespace volseq {

struct TrainState {
  ParamStore params;
  OptState opt;
  std::uint64_t step = 0;
  SplitMix64 rng;

  bool operator==(const TrainState& o) const {
    return params == o.params && opt.m == o.opt.m && opt.v == o.opt.v &&
           opt.t == o.opt.t && step == o.step && rng.state() == o.rng.state();
  }
};

struct TrainConfig {
  ModelConfig model;
  TokenConfig token;
  AdamConfig adam;  // adam.lr is the base learning rate
  std::uint64_t steps = 2000;
  int batch = 16;
  std::optional<std::uint64_t> warmup_steps;  // default: 5% of steps
  double min_lr = 0.0;
  double clip_norm = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t log_every = 50;

  std::uint64_t warmup() const { return warmup_steps.value_or(steps / 20); }
};

// Token sequences plus cached input/target matrices; entries grouped by kind.
struct Dataset {
  std::vector<TokenSequence> sequences;
  std::vector<Matrix> inputs;   // raw voxels, Nk x p
  std::vector<Matrix> targets;  // per-token normalized, Nk x p
  std::vector<std::vector<int>> by_kind;  // indices, one group per kind present
  int nk = 0;
  int pixels = 0;
  std::map<std::string, std::string> meta;  // archive.meta key=value pairs

  // Reads every *.vseq under dir in sorted filename order. All sequences
  // must share Nk; an empty or mixed archive is a data error.
  static Dataset load_archive(const std::filesystem::path& dir, const TokenConfig& tcfg);
};

struct Batch {
  std::vector<int> entries;  // dataset indices
  std::vector<int> starts;   // i per sequence, each in [2, Nk]
};

// i uniform on {2, ..., Nk}; consumes exactly one rng draw.
int sample_start_index(int nk, SplitMix64& rng);

// Draws one base value from rng, then keys each slot's choices (kind,
// entry, start index) from (base, slot) so assembly order cannot matter.
Batch sample_batch(const Dataset& data, int batch, SplitMix64& rng);

// Loss of a prediction matrix against normalized targets, rows m in
// [start, Nk], per-pixel mean, averaged over the predicted count.
double ar_loss_value(const Matrix& pred, const Matrix& targets, int start);

struct StepMetrics {
  double loss = 0.0;
  double lr = 0.0;
  double grad_norm = 0.0;  // pre-clip
};

// One optimization step. Throws NumericError before mutating state if any
// value or gradient is non-finite. Parameters and moments are rounded to
// f32-representable doubles after the update so checkpoints roundtrip.
StepMetrics train_step(TrainState& state, const Batch& batch, const Dataset& data,
                       const TrainConfig& cfg);

// Runs train_step until cfg.steps, logging one metrics line per interval:
//   step=<n> loss=<f> lr=<f> grad_norm=<f>
// Writes the checkpoint and a <ckpt>.meta key=value file recording the run
// settings (including the archive's stride when present).
TrainState pretrain(const TrainConfig& cfg, const std::filesystem::path& archive_dir,
                    const std::filesystem::path& ckpt_path, std::ostream* metrics,
                    const std::optional<std::filesystem::path>& resume_from = std::nullopt);

// VCKP: magic, u32 version=1, u32 tensor count, tensors (u32 name length,
// name bytes, u32 rank, u32 dims, f32 payload LE), u64 step, u64 rng state.
// Optimizer moments ride along under reserved names opt.m.* / opt.v.*.
void save_checkpoint(const TrainState& state, const std::filesystem::path& path);
TrainState load_checkpoint(const std::filesystem::path& path);

}  // namespace volseq
