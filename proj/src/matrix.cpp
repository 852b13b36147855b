// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "volseq/matrix.hpp"

#include <cmath>

#include "volseq/errors.hpp"

namespace volseq {

namespace {

void check_mul_shapes(const Matrix& a, const Matrix& b, const char* what) {
  if (a.cols != b.rows) {
    throw ShapeError(std::string(what) + ": inner dimensions differ");
  }
}

}  // namespace

void matmul_acc(const Matrix& a, const Matrix& b, Matrix& c) {
  check_mul_shapes(a, b, "matmul");
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    double* crow = c.row(i);
    for (int k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      const double* brow = b.row(k);
      for (int j = 0; j < b.cols; ++j) {
        crow[j] += aik * brow[j];
      }
    }
  }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_mul_shapes(a, b, "matmul");
  Matrix c(a.rows, b.cols);
  matmul_acc(a, b, c);
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < a.cols; ++j) {
      t(j, i) = a(i, j);
    }
  }
  return t;
}

void matmul_at_b_acc(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.rows != b.rows) {
    throw ShapeError("matmul_at_b: inner dimensions differ");
  }
  // c[k][j] += sum_i a[i][k] * b[i][j]
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    const double* brow = b.row(i);
    for (int k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      double* crow = c.row(k);
      for (int j = 0; j < b.cols; ++j) {
        crow[j] += aik * brow[j];
      }
    }
  }
}

void matmul_a_bt_acc(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.cols != b.cols) {
    throw ShapeError("matmul_a_bt: inner dimensions differ");
  }
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    double* crow = c.row(i);
    for (int j = 0; j < b.rows; ++j) {
      const double* brow = b.row(j);
      double acc = 0.0;
      for (int k = 0; k < a.cols; ++k) {
        acc += arow[k] * brow[k];
      }
      crow[j] += acc;
    }
  }
}

bool all_finite(const Matrix& a) {
  for (double v : a.data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void round_to_f32(Matrix& a) {
  for (double& v : a.data) {
    v = static_cast<double>(static_cast<float>(v));
  }
}

}  // namespace volseq
