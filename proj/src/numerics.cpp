// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "volseq/numerics.hpp"

#include <algorithm>
#include <cmath>

#include "volseq/errors.hpp"

namespace volseq {

double eval_objective(const Objective& obj, const ParamStore& at) {
  Tape tape(&at);
  return tape.scalar_value(obj.build(tape));
}

ParamStore grad(const Objective& obj, const ParamStore& at, double* loss_out) {
  Tape tape(&at);
  const int loss = obj.build(tape);
  if (loss_out != nullptr) *loss_out = tape.scalar_value(loss);
  tape.backward(loss);
  return tape.param_grads(at);
}

GradReport compare_gradients(const ParamStore& analytic, const Objective& obj,
                             const ParamStore& at, double h, double tol) {
  if (h <= 0.0) throw ConfigError("finite-difference step must be positive");
  GradReport rep;
  ParamStore probe = at;
  for (const auto& [name, tensor] : at) {
    const Matrix& a = analytic.at(name);
    Matrix& p = probe.at(name);
    for (int r = 0; r < tensor.rows; ++r) {
      for (int c = 0; c < tensor.cols; ++c) {
        const double saved = p(r, c);
        p(r, c) = saved + h;
        const double up = eval_objective(obj, probe);
        p(r, c) = saved - h;
        const double down = eval_objective(obj, probe);
        p(r, c) = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double an = a(r, c);
        const double denom = std::max({std::abs(an), std::abs(numeric), 1e-8});
        const double rel = std::abs(an - numeric) / denom;
        if (rel > rep.max_rel_err) {
          rep.max_rel_err = rel;
          rep.worst_param = name;
          rep.worst_row = r;
          rep.worst_col = c;
          rep.analytic = an;
          rep.numeric = numeric;
        }
      }
    }
  }
  rep.pass = rep.max_rel_err <= tol;
  return rep;
}

GradReport gradcheck(const Objective& obj, const ParamStore& at, double h, double tol) {
  return compare_gradients(grad(obj, at), obj, at, h, tol);
}

OptState OptState::zeros_like(const ParamStore& params) {
  OptState st;
  st.m = params.zeros_like();
  st.v = params.zeros_like();
  st.t = 0;
  return st;
}

void adamw_step(ParamStore& params, const ParamStore& grads, OptState& st,
                const AdamConfig& cfg) {
  st.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.t));
  for (auto& [name, theta] : params) {
    const Matrix& g = grads.at(name);
    Matrix& m = st.m.at(name);
    Matrix& v = st.v.at(name);
    if (!theta.same_shape(g)) throw ShapeError("gradient shape mismatch for " + name);
    for (std::size_t i = 0; i < theta.data.size(); ++i) {
      m.data[i] = cfg.beta1 * m.data[i] + (1.0 - cfg.beta1) * g.data[i];
      v.data[i] = cfg.beta2 * v.data[i] + (1.0 - cfg.beta2) * g.data[i] * g.data[i];
      const double m_hat = m.data[i] / bc1;
      const double v_hat = v.data[i] / bc2;
      theta.data[i] -= cfg.lr * (m_hat / (std::sqrt(v_hat) + cfg.eps) +
                                 cfg.weight_decay * theta.data[i]);
    }
  }
}

double cosine_lr(std::uint64_t step, std::uint64_t warmup_steps,
                 std::uint64_t total_steps, double base_lr, double min_lr) {
  if (step > total_steps) throw ConfigError("schedule step past total_steps");
  if (warmup_steps >= total_steps) throw ConfigError("warmup must end before total_steps");
  if (step < warmup_steps) {
    return base_lr * static_cast<double>(step) / static_cast<double>(warmup_steps);
  }
  if (step == warmup_steps) return base_lr;
  if (step == total_steps) return min_lr;
  const double progress = static_cast<double>(step - warmup_steps) /
                          static_cast<double>(total_steps - warmup_steps);
  constexpr double kPi = 3.14159265358979323846;
  return min_lr + 0.5 * (base_lr - min_lr) * (1.0 + std::cos(kPi * progress));
}

double global_norm(const ParamStore& grads) {
  double sum = 0.0;
  for (const auto& [name, g] : grads) {
    for (double v : g.data) sum += v * v;
  }
  return std::sqrt(sum);
}

double clip_by_norm(ParamStore& grads, double max_norm) {
  const double norm = global_norm(grads);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (auto& [name, g] : grads) {
      for (double& v : g.data) v *= scale;
    }
  }
  return norm;
}

}  // namespace volseq
