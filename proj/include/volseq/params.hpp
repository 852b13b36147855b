// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "volseq/errors.hpp"
#include "volseq/matrix.hpp"

namespace volseq {

// Ordered collection of named tensors. Order is fixed by insertion and is
// the serialization order of checkpoints.
class ParamStore {
 public:
  Matrix& add(const std::string& name, Matrix m) {
    if (index_.count(name) != 0) {
      throw ConfigError("duplicate tensor name: " + name);
    }
    index_[name] = items_.size();
    items_.emplace_back(name, std::move(m));
    return items_.back().second;
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  Matrix& at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("unknown tensor name: " + name);
    return items_[it->second].second;
  }
  const Matrix& at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("unknown tensor name: " + name);
    return items_[it->second].second;
  }

  std::size_t size() const { return items_.size(); }
  std::size_t total_elements() const {
    std::size_t n = 0;
    for (const auto& [name, m] : items_) n += m.size();
    return n;
  }

  // Same names and shapes, all zero.
  ParamStore zeros_like() const {
    ParamStore z;
    for (const auto& [name, m] : items_) z.add(name, Matrix::zeros(m.rows, m.cols));
    return z;
  }

  auto begin() { return items_.begin(); }
  auto end() { return items_.end(); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  bool operator==(const ParamStore& o) const { return items_ == o.items_; }

 private:
  std::vector<std::pair<std::string, Matrix>> items_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace volseq
