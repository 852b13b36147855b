// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "volseq/trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>

#include "volseq/errors.hpp"
#include "volseq/mask.hpp"
#include "volseq/sequencer.hpp"

namespace volseq {

namespace {

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::istream& is, const char* what) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw TruncationError(std::string("checkpoint truncated in ") + what);
  return v;
}

void write_tensor(std::ostream& os, const std::string& name, const Matrix& m) {
  put<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
  os.write(name.data(), static_cast<std::streamsize>(name.size()));
  put<std::uint32_t>(os, 2);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.rows));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.cols));
  for (double v : m.data) put<float>(os, static_cast<float>(v));
}

std::map<std::string, std::string> read_meta_file(const std::filesystem::path& p) {
  std::map<std::string, std::string> meta;
  std::ifstream is(p);
  if (!is) return meta;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!key.empty()) meta[key] = val;
  }
  return meta;
}

}  // namespace

Dataset Dataset::load_archive(const std::filesystem::path& dir, const TokenConfig& tcfg) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("archive directory " + dir.string() + " does not exist");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".vseq") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("archive " + dir.string() + " has no .vseq files");

  Dataset ds;
  ds.meta = read_meta_file(dir / "archive.meta");
  std::map<SeqKind, std::vector<int>> grouped;
  for (const auto& f : files) {
    TokenSequence ts = tokenize_sequence(read_sequence(f), tcfg);
    const int nk = ts.total();
    const int p = ts.pixels();
    if (ds.sequences.empty()) {
      ds.nk = nk;
      ds.pixels = p;
    } else if (nk != ds.nk || p != ds.pixels) {
      throw DataError("mixed sequence shapes in archive: " + f.filename().string() +
                      " has Nk=" + std::to_string(nk) + ", expected " +
                      std::to_string(ds.nk));
    }
    grouped[ts.kind].push_back(static_cast<int>(ds.sequences.size()));
    ds.inputs.push_back(tokens_to_matrix(ts));
    ds.targets.push_back(normalized_targets(ts));
    ds.sequences.push_back(std::move(ts));
  }
  for (auto& [kind, idx] : grouped) ds.by_kind.push_back(std::move(idx));
  return ds;
}

int sample_start_index(int nk, SplitMix64& rng) {
  if (nk < 2) throw ConfigError("start index needs Nk >= 2, got " + std::to_string(nk));
  return 2 + static_cast<int>(rng.uniform(static_cast<std::uint64_t>(nk - 1)));
}

Batch sample_batch(const Dataset& data, int batch, SplitMix64& rng) {
  if (batch < 1) throw ConfigError("batch must be >= 1");
  if (data.sequences.empty()) throw DataError("cannot sample from empty dataset");
  const std::uint64_t base = rng.next();
  Batch b;
  b.entries.resize(static_cast<std::size_t>(batch));
  b.starts.resize(static_cast<std::size_t>(batch));
  for (int s = 0; s < batch; ++s) {
    SplitMix64 slot_rng(mix64(base ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(s) + 1))));
    const auto& kinds = data.by_kind;
    const std::size_t kind = slot_rng.uniform(kinds.size());
    const std::vector<int>& pool = kinds[kind];
    b.entries[static_cast<std::size_t>(s)] = pool[slot_rng.uniform(pool.size())];
    b.starts[static_cast<std::size_t>(s)] = sample_start_index(data.nk, slot_rng);
  }
  return b;
}

double ar_loss_value(const Matrix& pred, const Matrix& targets, int start) {
  if (!pred.same_shape(targets)) throw ShapeError("loss prediction/target shape mismatch");
  const int nk = pred.rows;
  if (start < 2 || start > nk) throw ConfigError("loss start index out of range");
  const double inv_count = 1.0 / (nk - start + 1);
  const double inv_p = 1.0 / pred.cols;
  double loss = 0.0;
  for (int m = start; m <= nk; ++m) {
    double term = 0.0;
    for (int c = 0; c < pred.cols; ++c) {
      const double d = pred(m - 2, c) - targets(m - 1, c);
      term += d * d;
    }
    loss += term * inv_p;
  }
  return loss * inv_count;
}

StepMetrics train_step(TrainState& state, const Batch& batch, const Dataset& data,
                       const TrainConfig& cfg) {
  if (batch.entries.empty()) throw ConfigError("empty batch");
  if (state.step >= cfg.steps) throw ConfigError("step counter past configured steps");

  // Everything up to the optimizer update may throw NumericError; state is
  // untouched until gradients are known finite.
  Tape tape(&state.params);
  int loss_node = -1;
  for (std::size_t s = 0; s < batch.entries.size(); ++s) {
    const int e = batch.entries[s];
    const AttentionMask mask = build_prefix_causal_mask(data.nk, batch.starts[s]);
    const int toks = tape.input(data.inputs[static_cast<std::size_t>(e)]);
    const int pred = forward_graph(tape, cfg.model, toks, mask);
    const int l = tape.ar_loss(pred, data.targets[static_cast<std::size_t>(e)],
                               batch.starts[s]);
    loss_node = (loss_node < 0) ? l : tape.add(loss_node, l);
  }
  if (batch.entries.size() > 1) {
    loss_node = tape.mul_scalar(loss_node, 1.0 / static_cast<double>(batch.entries.size()));
  }
  const double loss = tape.scalar_value(loss_node);
  tape.backward(loss_node);
  ParamStore grads = tape.param_grads(state.params);

  StepMetrics m;
  m.loss = loss;
  m.grad_norm = clip_by_norm(grads, cfg.clip_norm);
  m.lr = cosine_lr(state.step + 1, cfg.warmup(), cfg.steps, cfg.adam.lr, cfg.min_lr);

  AdamConfig adam = cfg.adam;
  adam.lr = m.lr;
  adamw_step(state.params, grads, state.opt, adam);
  for (auto& [name, t] : state.params) round_to_f32(t);
  for (auto& [name, t] : state.opt.m) round_to_f32(t);
  for (auto& [name, t] : state.opt.v) round_to_f32(t);
  state.step += 1;
  return m;
}

TrainState pretrain(const TrainConfig& cfg, const std::filesystem::path& archive_dir,
                    const std::filesystem::path& ckpt_path, std::ostream* metrics,
                    const std::optional<std::filesystem::path>& resume_from) {
  Dataset data = Dataset::load_archive(archive_dir, cfg.token);
  if (data.nk != cfg.model.seq_len) {
    throw ConfigError("archive Nk=" + std::to_string(data.nk) + " but model seq_len=" +
                      std::to_string(cfg.model.seq_len));
  }
  if (data.pixels != cfg.model.token_pixels) {
    throw ConfigError("archive token pixels=" + std::to_string(data.pixels) +
                      " but model expects " + std::to_string(cfg.model.token_pixels));
  }

  TrainState state;
  if (resume_from.has_value()) {
    state = load_checkpoint(*resume_from);
  } else {
    state.params = init_params(cfg.model, cfg.seed);
    state.opt = OptState::zeros_like(state.params);
    state.rng = SplitMix64(cfg.seed);
  }

  char line[160];
  while (state.step < cfg.steps) {
    Batch batch = sample_batch(data, cfg.batch, state.rng);
    StepMetrics m = train_step(state, batch, data, cfg);
    if (metrics != nullptr &&
        (state.step % cfg.log_every == 0 || state.step == cfg.steps)) {
      std::snprintf(line, sizeof(line), "step=%llu loss=%.17g lr=%.17g grad_norm=%.17g\n",
                    static_cast<unsigned long long>(state.step), m.loss, m.lr,
                    m.grad_norm);
      (*metrics) << line;
    }
  }

  save_checkpoint(state, ckpt_path);
  std::ofstream meta(ckpt_path.string() + ".meta");
  if (!meta) throw IoError("cannot write run metadata next to " + ckpt_path.string());
  meta << "steps = " << cfg.steps << "\n";
  meta << "batch = " << cfg.batch << "\n";
  meta << "seed = " << cfg.seed << "\n";
  meta << "lr = " << cfg.adam.lr << "\n";
  meta << "embed_dim = " << cfg.model.embed_dim << "\n";
  meta << "heads = " << cfg.model.heads << "\n";
  meta << "layers = " << cfg.model.layers << "\n";
  meta << "seq_len = " << cfg.model.seq_len << "\n";
  meta << "token_pixels = " << cfg.model.token_pixels << "\n";
  auto stride = data.meta.find("stride");
  if (stride != data.meta.end()) meta << "stride = " << stride->second << "\n";
  return state;
}

void save_checkpoint(const TrainState& state, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write("VCKP", 4);
  put<std::uint32_t>(os, 1);
  const std::uint32_t n = static_cast<std::uint32_t>(state.params.size() * 3);
  put<std::uint32_t>(os, n);
  for (const auto& [name, m] : state.params) write_tensor(os, name, m);
  for (const auto& [name, m] : state.opt.m) write_tensor(os, "opt.m." + name, m);
  for (const auto& [name, m] : state.opt.v) write_tensor(os, "opt.v." + name, m);
  put<std::uint64_t>(os, state.step);
  put<std::uint64_t>(os, state.rng.state());
  if (!os) throw IoError("write failed for " + path.string());
}

TrainState load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string() + " for reading");
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "VCKP", 4) != 0) {
    throw FormatError("bad magic in " + path.string());
  }
  const auto version = take<std::uint32_t>(is, "header");
  if (version != 1) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto n = take<std::uint32_t>(is, "header");

  TrainState state;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto name_len = take<std::uint32_t>(is, "tensor name");
    if (name_len == 0 || name_len > 4096) throw FormatError("implausible tensor name length");
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    if (!is) throw TruncationError("checkpoint truncated in tensor name");
    const auto rank = take<std::uint32_t>(is, "tensor rank");
    if (rank != 2) throw FormatError("tensor " + name + " has unsupported rank");
    const auto rows = take<std::uint32_t>(is, "tensor dims");
    const auto cols = take<std::uint32_t>(is, "tensor dims");
    Matrix m = Matrix::zeros(static_cast<int>(rows), static_cast<int>(cols));
    for (double& v : m.data) v = static_cast<double>(take<float>(is, "tensor payload"));
    if (name.rfind("opt.m.", 0) == 0) {
      state.opt.m.add(name.substr(6), std::move(m));
    } else if (name.rfind("opt.v.", 0) == 0) {
      state.opt.v.add(name.substr(6), std::move(m));
    } else {
      state.params.add(name, std::move(m));
    }
  }
  state.step = take<std::uint64_t>(is, "step");
  state.opt.t = state.step;
  state.rng.set_state(take<std::uint64_t>(is, "rng state"));

  if (state.opt.m.size() != state.params.size() ||
      state.opt.v.size() != state.params.size()) {
    throw FormatError("checkpoint moment tensors do not match parameters");
  }
  return state;
}

}  // namespace volseq
