// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "volseq/mask.hpp"
#include "volseq/matrix.hpp"
#include "volseq/params.hpp"

namespace volseq {

enum class OpKind {
  kLeaf,
  kMatmul,
  kAdd,
  kAddRowVec,
  kMulScalar,
  kLayerNorm,
  kGelu,
  kAttention,
  kArLoss,
  kSumSquares,
};

const char* op_name(OpKind k);

// Eager reverse-mode tape over double matrices. Nodes are created in
// topological order; backward walks them in reverse. Every op checks its
// forward value for finiteness; backward scans all gradients afterwards.
class Tape {
 public:
  explicit Tape(const ParamStore* params = nullptr) : params_(params) {}

  // Leaf bound to the named parameter; repeated calls return the same node
  // so gradients accumulate in one place.
  int param(const std::string& name);
  int input(Matrix value);

  int matmul(int a, int b);
  int add(int a, int b);
  // x: [r, c] plus row vector b: [1, c] broadcast over rows.
  int add_row_vec(int x, int b);
  int mul_scalar(int a, double s);
  int layer_norm(int x, int gamma, int beta, double eps = 1e-5);
  int gelu(int x);
  // q, k, v: [Nk, dim]; multi-head scaled dot product. Softmax runs over
  // allowed positions only; disallowed weights are exactly 0 and their
  // value rows never enter the accumulation.
  int attention(int q, int k, int v, const AttentionMask& mask, int heads);
  // Mean over targets m in [start, Nk] of the per-pixel mean squared
  // residual between prediction row m-2 (0-based) and target row m-1.
  int ar_loss(int y_hat, Matrix targets, int start);
  int sum_squares(int x);

  const Matrix& value(int id) const { return nodes_[static_cast<std::size_t>(id)].val; }
  const Matrix& grad(int id) const { return nodes_[static_cast<std::size_t>(id)].grd; }
  double scalar_value(int id) const;

  // Seeds d(id) = 1 (id must be 1x1) and propagates to all leaves.
  void backward(int id);

  // Gradients shaped like ref; parameters the graph never touched get
  // exactly-zero blocks.
  ParamStore param_grads(const ParamStore& ref) const;

 private:
  struct Node {
    OpKind op;
    int a = -1, b = -1, c = -1;
    Matrix val;
    Matrix grd;
    double scalar = 0.0;           // kMulScalar
    double eps = 0.0;              // kLayerNorm
    int start = 0;                 // kArLoss
    int heads = 0;                 // kAttention
    AttentionMask mask;            // kAttention
    std::vector<double> cache;     // kAttention weights / kLayerNorm mu,inv
    Matrix targets;                // kArLoss
  };

  int push(Node n, const char* what);
  void backprop(const Node& n);

  const ParamStore* params_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, int> param_nodes_;
  std::vector<std::pair<std::string, int>> param_order_;
};

}  // namespace volseq
