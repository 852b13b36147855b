// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>

namespace volseq {

// Flat `key = value` run configuration, one pair per line, `#` comments.
// Lookups are typed; unknown keys are rejected up front.
class RunConfig {
 public:
  static RunConfig load(const std::filesystem::path& path);
  static RunConfig from_map(std::map<std::string, std::string> kv);

  // Throws UsageError naming any key outside `allowed`.
  void restrict_keys(const std::set<std::string>& allowed) const;

  bool has(const std::string& key) const;
  std::string require_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::uint64_t require_u64(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  int get_int(const std::string& key, int fallback) const;
  double get_double(const std::string& key, double fallback) const;

 private:
  std::map<std::string, std::string> kv_;
};

// Exit codes: 0 success, 2 usage, 3 numeric abort, 4 I/O or format.
int run_cli(int argc, const char* const* argv);

}  // namespace volseq
