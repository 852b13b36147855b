// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

namespace volseq {

// Dense row-major matrix of doubles. Row vectors are 1 x n.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  static Matrix zeros(int r, int c) { return Matrix(r, c); }

  double& operator()(int r, int c) {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  double operator()(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }

  double* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
  const double* row(int r) const {
    return data.data() + static_cast<std::size_t>(r) * cols;
  }

  std::size_t size() const { return data.size(); }
  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
  bool operator==(const Matrix&) const = default;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

// C += A * B without allocating.
void matmul_acc(const Matrix& a, const Matrix& b, Matrix& c);
// C += A^T * B.
void matmul_at_b_acc(const Matrix& a, const Matrix& b, Matrix& c);
// C += A * B^T.
void matmul_a_bt_acc(const Matrix& a, const Matrix& b, Matrix& c);

bool all_finite(const Matrix& a);

// Snap every entry to the nearest 32-bit float. Training state is kept
// f32-representable so the on-disk f32 checkpoint roundtrips bitwise.
void round_to_f32(Matrix& a);

}  // namespace volseq
