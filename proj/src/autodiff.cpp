// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "volseq/autodiff.hpp"

#include <cmath>
#include <string>

#include "volseq/errors.hpp"

namespace volseq {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
}  // namespace

const char* op_name(OpKind k) {
  switch (k) {
    case OpKind::kLeaf: return "leaf";
    case OpKind::kMatmul: return "matmul";
    case OpKind::kAdd: return "add";
    case OpKind::kAddRowVec: return "add_row_vec";
    case OpKind::kMulScalar: return "mul_scalar";
    case OpKind::kLayerNorm: return "layer_norm";
    case OpKind::kGelu: return "gelu";
    case OpKind::kAttention: return "attention";
    case OpKind::kArLoss: return "ar_loss";
    case OpKind::kSumSquares: return "sum_squares";
  }
  return "unknown";
}

int Tape::push(Node n, const char* what) {
  if (!all_finite(n.val)) {
    throw NumericError(std::string("non-finite value in ") + what + " forward");
  }
  n.grd = Matrix::zeros(n.val.rows, n.val.cols);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int Tape::param(const std::string& name) {
  auto it = param_nodes_.find(name);
  if (it != param_nodes_.end()) return it->second;
  if (params_ == nullptr) throw ConfigError("tape has no bound parameter store");
  Node n;
  n.op = OpKind::kLeaf;
  n.val = params_->at(name);
  int id = push(std::move(n), "leaf");
  param_nodes_.emplace(name, id);
  param_order_.emplace_back(name, id);
  return id;
}

int Tape::input(Matrix value) {
  Node n;
  n.op = OpKind::kLeaf;
  n.val = std::move(value);
  return push(std::move(n), "leaf");
}

int Tape::matmul(int a, int b) {
  Node n;
  n.op = OpKind::kMatmul;
  n.a = a;
  n.b = b;
  n.val = volseq::matmul(value(a), value(b));
  return push(std::move(n), "matmul");
}

int Tape::add(int a, int b) {
  const Matrix& A = value(a);
  const Matrix& B = value(b);
  if (!A.same_shape(B)) throw ShapeError("add shape mismatch");
  Node n;
  n.op = OpKind::kAdd;
  n.a = a;
  n.b = b;
  n.val = A;
  for (std::size_t i = 0; i < B.data.size(); ++i) n.val.data[i] += B.data[i];
  return push(std::move(n), "add");
}

int Tape::add_row_vec(int x, int b) {
  const Matrix& X = value(x);
  const Matrix& B = value(b);
  if (B.rows != 1 || B.cols != X.cols) throw ShapeError("add_row_vec shape mismatch");
  Node n;
  n.op = OpKind::kAddRowVec;
  n.a = x;
  n.b = b;
  n.val = X;
  for (int r = 0; r < X.rows; ++r) {
    for (int c = 0; c < X.cols; ++c) n.val(r, c) += B(0, c);
  }
  return push(std::move(n), "add_row_vec");
}

int Tape::mul_scalar(int a, double s) {
  Node n;
  n.op = OpKind::kMulScalar;
  n.a = a;
  n.scalar = s;
  n.val = value(a);
  for (double& v : n.val.data) v *= s;
  return push(std::move(n), "mul_scalar");
}

int Tape::layer_norm(int x, int gamma, int beta, double eps) {
  const Matrix& X = value(x);
  const Matrix& G = value(gamma);
  const Matrix& B = value(beta);
  if (G.rows != 1 || G.cols != X.cols || B.rows != 1 || B.cols != X.cols) {
    throw ShapeError("layer_norm scale/bias shape mismatch");
  }
  Node n;
  n.op = OpKind::kLayerNorm;
  n.a = x;
  n.b = gamma;
  n.c = beta;
  n.eps = eps;
  n.val = Matrix::zeros(X.rows, X.cols);
  n.cache.resize(static_cast<std::size_t>(X.rows) * 2);
  const double inv_d = 1.0 / X.cols;
  for (int r = 0; r < X.rows; ++r) {
    double mu = 0.0;
    for (int c = 0; c < X.cols; ++c) mu += X(r, c);
    mu *= inv_d;
    double var = 0.0;
    for (int c = 0; c < X.cols; ++c) {
      const double d = X(r, c) - mu;
      var += d * d;
    }
    var *= inv_d;
    const double inv = 1.0 / std::sqrt(var + eps);
    n.cache[static_cast<std::size_t>(r) * 2] = mu;
    n.cache[static_cast<std::size_t>(r) * 2 + 1] = inv;
    for (int c = 0; c < X.cols; ++c) {
      n.val(r, c) = G(0, c) * ((X(r, c) - mu) * inv) + B(0, c);
    }
  }
  return push(std::move(n), "layer_norm");
}

int Tape::gelu(int x) {
  Node n;
  n.op = OpKind::kGelu;
  n.a = x;
  n.val = value(x);
  for (double& v : n.val.data) v = 0.5 * v * (1.0 + std::erf(v * kInvSqrt2));
  return push(std::move(n), "gelu");
}

int Tape::attention(int q, int k, int v, const AttentionMask& mask, int heads) {
  const Matrix& Q = value(q);
  const Matrix& K = value(k);
  const Matrix& V = value(v);
  if (!Q.same_shape(K) || !Q.same_shape(V)) throw ShapeError("attention q/k/v shapes differ");
  if (Q.rows != mask.nk) throw ShapeError("attention rows do not match mask");
  if (heads < 1 || Q.cols % heads != 0) {
    throw ConfigError("heads must divide attention width");
  }
  const int nk = Q.rows;
  const int dh = Q.cols / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  Node n;
  n.op = OpKind::kAttention;
  n.a = q;
  n.b = k;
  n.c = v;
  n.heads = heads;
  n.mask = mask;
  n.val = Matrix::zeros(nk, Q.cols);
  n.cache.assign(static_cast<std::size_t>(heads) * nk * nk, 0.0);

  std::vector<double> score(static_cast<std::size_t>(nk));
  for (int h = 0; h < heads; ++h) {
    const int c0 = h * dh;
    for (int row = 0; row < nk; ++row) {
      double smax = -1e300;
      for (int p = 0; p < nk; ++p) {
        if (!mask.at(row + 1, p + 1)) continue;
        double s = 0.0;
        for (int c = 0; c < dh; ++c) s += Q(row, c0 + c) * K(p, c0 + c);
        s *= scale;
        score[static_cast<std::size_t>(p)] = s;
        if (s > smax) smax = s;
      }
      if (smax == -1e300) throw ConfigError("attention mask row has no allowed entries");
      double z = 0.0;
      for (int p = 0; p < nk; ++p) {
        if (!mask.at(row + 1, p + 1)) continue;
        z += std::exp(score[static_cast<std::size_t>(p)] - smax);
      }
      double* w = &n.cache[(static_cast<std::size_t>(h) * nk + row) * nk];
      for (int p = 0; p < nk; ++p) {
        if (!mask.at(row + 1, p + 1)) continue;
        w[p] = std::exp(score[static_cast<std::size_t>(p)] - smax) / z;
        for (int c = 0; c < dh; ++c) n.val(row, c0 + c) += w[p] * V(p, c0 + c);
      }
    }
  }
  return push(std::move(n), "attention");
}

int Tape::ar_loss(int y_hat, Matrix targets, int start) {
  const Matrix& Y = value(y_hat);
  if (!Y.same_shape(targets)) throw ShapeError("ar_loss prediction/target shape mismatch");
  const int nk = Y.rows;
  if (start < 2 || start > nk) {
    throw ConfigError("ar_loss start index " + std::to_string(start) + " outside [2, " +
                      std::to_string(nk) + "]");
  }
  Node n;
  n.op = OpKind::kArLoss;
  n.a = y_hat;
  n.start = start;
  n.targets = std::move(targets);
  const double inv_count = 1.0 / (nk - start + 1);
  const double inv_p = 1.0 / Y.cols;
  double loss = 0.0;
  for (int m = start; m <= nk; ++m) {
    double term = 0.0;
    for (int c = 0; c < Y.cols; ++c) {
      const double d = Y(m - 2, c) - n.targets(m - 1, c);
      term += d * d;
    }
    loss += term * inv_p;
  }
  n.val = Matrix::zeros(1, 1);
  n.val(0, 0) = loss * inv_count;
  return push(std::move(n), "ar_loss");
}

int Tape::sum_squares(int x) {
  Node n;
  n.op = OpKind::kSumSquares;
  n.a = x;
  double s = 0.0;
  for (double v : value(x).data) s += v * v;
  n.val = Matrix::zeros(1, 1);
  n.val(0, 0) = s;
  return push(std::move(n), "sum_squares");
}

double Tape::scalar_value(int id) const {
  const Matrix& v = value(id);
  if (v.rows != 1 || v.cols != 1) throw ShapeError("node is not scalar");
  return v(0, 0);
}

void Tape::backprop(const Node& n) {
  switch (n.op) {
    case OpKind::kLeaf:
      return;
    case OpKind::kMatmul: {
      Node& A = nodes_[static_cast<std::size_t>(n.a)];
      Node& B = nodes_[static_cast<std::size_t>(n.b)];
      matmul_a_bt_acc(n.grd, B.val, A.grd);  // dA += dC * B^T
      matmul_at_b_acc(A.val, n.grd, B.grd);  // dB += A^T * dC
      return;
    }
    case OpKind::kAdd: {
      Node& A = nodes_[static_cast<std::size_t>(n.a)];
      Node& B = nodes_[static_cast<std::size_t>(n.b)];
      for (std::size_t i = 0; i < n.grd.data.size(); ++i) {
        A.grd.data[i] += n.grd.data[i];
        B.grd.data[i] += n.grd.data[i];
      }
      return;
    }
    case OpKind::kAddRowVec: {
      Node& X = nodes_[static_cast<std::size_t>(n.a)];
      Node& B = nodes_[static_cast<std::size_t>(n.b)];
      for (int r = 0; r < n.grd.rows; ++r) {
        for (int c = 0; c < n.grd.cols; ++c) {
          X.grd(r, c) += n.grd(r, c);
          B.grd(0, c) += n.grd(r, c);
        }
      }
      return;
    }
    case OpKind::kMulScalar: {
      Node& A = nodes_[static_cast<std::size_t>(n.a)];
      for (std::size_t i = 0; i < n.grd.data.size(); ++i) {
        A.grd.data[i] += n.scalar * n.grd.data[i];
      }
      return;
    }
    case OpKind::kLayerNorm: {
      Node& X = nodes_[static_cast<std::size_t>(n.a)];
      Node& G = nodes_[static_cast<std::size_t>(n.b)];
      Node& B = nodes_[static_cast<std::size_t>(n.c)];
      const int d = n.grd.cols;
      const double inv_d = 1.0 / d;
      for (int r = 0; r < n.grd.rows; ++r) {
        const double mu = n.cache[static_cast<std::size_t>(r) * 2];
        const double inv = n.cache[static_cast<std::size_t>(r) * 2 + 1];
        double mg = 0.0, mgx = 0.0;
        for (int c = 0; c < d; ++c) {
          const double xhat = (X.val(r, c) - mu) * inv;
          const double g = n.grd(r, c) * G.val(0, c);
          mg += g;
          mgx += g * xhat;
          G.grd(0, c) += n.grd(r, c) * xhat;
          B.grd(0, c) += n.grd(r, c);
        }
        mg *= inv_d;
        mgx *= inv_d;
        for (int c = 0; c < d; ++c) {
          const double xhat = (X.val(r, c) - mu) * inv;
          const double g = n.grd(r, c) * G.val(0, c);
          X.grd(r, c) += inv * (g - mg - xhat * mgx);
        }
      }
      return;
    }
    case OpKind::kGelu: {
      Node& X = nodes_[static_cast<std::size_t>(n.a)];
      for (std::size_t i = 0; i < n.grd.data.size(); ++i) {
        const double x = X.val.data[i];
        const double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
        const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
        X.grd.data[i] += n.grd.data[i] * (cdf + x * pdf);
      }
      return;
    }
    case OpKind::kAttention: {
      Node& Q = nodes_[static_cast<std::size_t>(n.a)];
      Node& K = nodes_[static_cast<std::size_t>(n.b)];
      Node& V = nodes_[static_cast<std::size_t>(n.c)];
      const int nk = n.grd.rows;
      const int dh = n.grd.cols / n.heads;
      const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
      std::vector<double> dw(static_cast<std::size_t>(nk));
      for (int h = 0; h < n.heads; ++h) {
        const int c0 = h * dh;
        for (int row = 0; row < nk; ++row) {
          const double* w = &n.cache[(static_cast<std::size_t>(h) * nk + row) * nk];
          double s_wdw = 0.0;
          for (int p = 0; p < nk; ++p) {
            if (!n.mask.at(row + 1, p + 1)) continue;
            double d = 0.0;
            for (int c = 0; c < dh; ++c) {
              V.grd(p, c0 + c) += w[p] * n.grd(row, c0 + c);
              d += n.grd(row, c0 + c) * V.val(p, c0 + c);
            }
            dw[static_cast<std::size_t>(p)] = d;
            s_wdw += w[p] * d;
          }
          for (int p = 0; p < nk; ++p) {
            if (!n.mask.at(row + 1, p + 1)) continue;
            const double ds = w[p] * (dw[static_cast<std::size_t>(p)] - s_wdw) * scale;
            for (int c = 0; c < dh; ++c) {
              Q.grd(row, c0 + c) += ds * K.val(p, c0 + c);
              K.grd(p, c0 + c) += ds * Q.val(row, c0 + c);
            }
          }
        }
      }
      return;
    }
    case OpKind::kArLoss: {
      Node& Y = nodes_[static_cast<std::size_t>(n.a)];
      const int nk = Y.val.rows;
      const double g = n.grd(0, 0);
      const double coef = g * 2.0 / ((nk - n.start + 1) * static_cast<double>(Y.val.cols));
      for (int m = n.start; m <= nk; ++m) {
        for (int c = 0; c < Y.val.cols; ++c) {
          Y.grd(m - 2, c) += coef * (Y.val(m - 2, c) - n.targets(m - 1, c));
        }
      }
      return;
    }
    case OpKind::kSumSquares: {
      Node& X = nodes_[static_cast<std::size_t>(n.a)];
      const double g = n.grd(0, 0);
      for (std::size_t i = 0; i < X.val.data.size(); ++i) {
        X.grd.data[i] += g * 2.0 * X.val.data[i];
      }
      return;
    }
  }
}

void Tape::backward(int id) {
  Matrix& seed = nodes_[static_cast<std::size_t>(id)].grd;
  if (seed.rows != 1 || seed.cols != 1) throw ShapeError("backward needs a scalar node");
  for (Node& n : nodes_) {
    for (double& v : n.grd.data) v = 0.0;
  }
  seed(0, 0) = 1.0;
  for (int i = id; i >= 0; --i) backprop(nodes_[static_cast<std::size_t>(i)]);
  for (const Node& n : nodes_) {
    if (!all_finite(n.grd)) {
      throw NumericError(std::string("non-finite gradient in ") + op_name(n.op) +
                         " backward");
    }
  }
}

ParamStore Tape::param_grads(const ParamStore& ref) const {
  ParamStore g = ref.zeros_like();
  for (const auto& [name, id] : param_order_) {
    Matrix& dst = g.at(name);
    const Matrix& src = nodes_[static_cast<std::size_t>(id)].grd;
    if (!dst.same_shape(src)) throw ShapeError("gradient shape mismatch for " + name);
    dst = src;
  }
  return g;
}

}  // namespace volseq
