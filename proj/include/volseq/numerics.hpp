// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "volseq/autodiff.hpp"
#include "volseq/params.hpp"

namespace volseq {

// A scalar objective: builds its loss node on a tape already bound to the
// parameter store under test.
struct Objective {
  std::function<int(Tape&)> build;
};

double eval_objective(const Objective& obj, const ParamStore& at);

// Reverse-mode gradients shaped like `at`; untouched parameters get
// exactly-zero blocks.
ParamStore grad(const Objective& obj, const ParamStore& at, double* loss_out = nullptr);

struct GradReport {
  double max_rel_err = 0.0;
  bool pass = false;
  std::string worst_param;
  int worst_row = 0;
  int worst_col = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

// Central differences (f(x+h) - f(x-h)) / 2h against the supplied analytic
// gradient; relative error uses denominator max(|a|, |n|, 1e-8).
GradReport compare_gradients(const ParamStore& analytic, const Objective& obj,
                             const ParamStore& at, double h, double tol);

GradReport gradcheck(const Objective& obj, const ParamStore& at, double h = 1e-4,
                     double tol = 1e-4);

struct OptState {
  ParamStore m;
  ParamStore v;
  std::uint64_t t = 0;

  static OptState zeros_like(const ParamStore& params);
};

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.95;
  double eps = 1e-8;
  double weight_decay = 0.05;
};

// Bias-corrected update with decoupled decay:
//   theta -= lr * (m_hat / (sqrt(v_hat) + eps) + wd * theta).
// Pure double math; callers that need f32-representable state round after.
void adamw_step(ParamStore& params, const ParamStore& grads, OptState& st,
                const AdamConfig& cfg);

// Linear warmup 0 -> base_lr, then cosine from base_lr to min_lr. The
// endpoints step == warmup and step == total are exact.
double cosine_lr(std::uint64_t step, std::uint64_t warmup_steps,
                 std::uint64_t total_steps, double base_lr, double min_lr);

double global_norm(const ParamStore& grads);

// Scales grads to max_norm when their global norm exceeds it; returns the
// pre-clip norm.
double clip_by_norm(ParamStore& grads, double max_norm);

struct NamedGradReport {
  std::string name;
  GradReport report;
};

// The standard battery: attention alone, a one-block model, and the full
// autoregressive loss, each at a small random configuration.
std::vector<NamedGradReport> standard_gradchecks(std::uint64_t seed, double h = 1e-4,
                                                 double tol = 1e-4);

}  // namespace volseq
