// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "volseq/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <vector>

#include "CLI11.hpp"
#include "volseq/errors.hpp"
#include "volseq/mask.hpp"
#include "volseq/net.hpp"
#include "volseq/numerics.hpp"
#include "volseq/probe.hpp"
#include "volseq/sequencer.hpp"
#include "volseq/tokenizer.hpp"
#include "volseq/trainer.hpp"
#include "volseq/volume.hpp"

namespace volseq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

Dim3 parse_dim3(const std::string& s, const std::string& what) {
  Dim3 d;
  if (std::sscanf(s.c_str(), "%d,%d,%d", &d.d, &d.h, &d.w) != 3) {
    throw UsageError(what + " wants the form D,H,W, got '" + s + "'");
  }
  return d;
}

Spacing parse_spacing(const std::string& s) {
  Spacing sp;
  if (std::sscanf(s.c_str(), "%f,%f,%f", &sp.z, &sp.y, &sp.x) != 3) {
    throw UsageError("--spacing wants the form Z,Y,X, got '" + s + "'");
  }
  return sp;
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config file " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(lineno) + " is not key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw UsageError("config line " + std::to_string(lineno) + " has empty key");
    if (kv.count(key) != 0) throw UsageError("config key '" + key + "' appears twice");
    kv[key] = val;
  }
  return from_map(std::move(kv));
}

RunConfig RunConfig::from_map(std::map<std::string, std::string> kv) {
  RunConfig c;
  c.kv_ = std::move(kv);
  return c;
}

void RunConfig::restrict_keys(const std::set<std::string>& allowed) const {
  for (const auto& [key, value] : kv_) {
    if (allowed.count(key) == 0) throw UsageError("unknown config key '" + key + "'");
  }
}

bool RunConfig::has(const std::string& key) const { return kv_.count(key) != 0; }

std::string RunConfig::require_string(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw UsageError("missing config key '" + key + "'");
  return it->second;
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

std::uint64_t RunConfig::require_u64(const std::string& key) const {
  const std::string s = require_string(key);
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "' wants an unsigned integer, got '" + s + "'");
  }
}

std::uint64_t RunConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? require_u64(key) : fallback;
}

int RunConfig::get_int(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const std::string s = require_string(key);
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "' wants an integer, got '" + s + "'");
  }
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const std::string s = require_string(key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "' wants a number, got '" + s + "'");
  }
}

namespace {

struct GenDataArgs {
  std::string out;
  int volumes = 20;
  std::string dims = "24,24,24";
  int modalities = 4;
  int categories = 4;
  std::uint64_t seed = 1;
  double noise = 0.1;
  double offset = 0.5;
  std::string spacing = "1,1,1";
  int stride = 2;
  int n_patches = 4;
  std::string patch_dims = "8,16,16";
  double context_mm = 30.0;
  std::string semantic_dims = "8,16,16";
  int spatial_per_vol = 2;
  int contrast_per_vol = 1;
  int semantic_per_cat = 2;
  std::string kinds = "spatial,contrast,semantic";
};

void cmd_gen_data(const GenDataArgs& a) {
  const Dim3 dims = parse_dim3(a.dims, "--dims");
  const Spacing spacing = parse_spacing(a.spacing);
  SequencerConfig scfg;
  scfg.patch_dims = parse_dim3(a.patch_dims, "--patch-dims");
  scfg.stride = a.stride;
  scfg.n_patches = a.n_patches;
  scfg.context_mm = a.context_mm;
  scfg.semantic_target_dims = parse_dim3(a.semantic_dims, "--semantic-dims");
  scfg.validate();

  bool want_spatial = false, want_contrast = false, want_semantic = false;
  {
    std::string kinds = a.kinds;
    std::replace(kinds.begin(), kinds.end(), ',', ' ');
    std::istringstream ks(kinds);
    std::string k;
    while (ks >> k) {
      if (k == "spatial") want_spatial = true;
      else if (k == "contrast") want_contrast = true;
      else if (k == "semantic") want_semantic = true;
      else throw UsageError("unknown sequence kind '" + k + "'");
    }
  }
  if (!want_spatial && !want_contrast && !want_semantic) {
    throw UsageError("--kinds selects no sequence kind");
  }
  if (a.volumes < 1) throw UsageError("--volumes must be >= 1");
  if (a.categories < 1) throw UsageError("--categories must be >= 1");
  if (a.modalities < 1) throw UsageError("--modalities must be >= 1");
  if (want_contrast && a.modalities < 2) {
    throw UsageError("contrast sequences need --modalities >= 2");
  }
  if (want_contrast && a.modalities != a.n_patches) {
    throw UsageError("contrast sequences need --modalities == --n-patches for a "
                     "uniform archive");
  }
  if (want_semantic && !(scfg.semantic_target_dims == scfg.patch_dims)) {
    throw UsageError("semantic sequences need --semantic-dims == --patch-dims for a "
                     "uniform archive");
  }
  if (want_semantic && a.volumes / a.categories < a.n_patches) {
    throw UsageError("semantic sequences need at least n-patches volumes per category");
  }

  const std::filesystem::path out(a.out);
  std::filesystem::create_directories(out);
  SplitMix64 master(mix64(a.seed));

  char name[64];
  std::vector<Volume> volumes;
  std::vector<std::uint64_t> vol_seeds;
  volumes.reserve(static_cast<std::size_t>(a.volumes));
  for (int v = 0; v < a.volumes; ++v) {
    SyntheticSpec spec;
    spec.pattern = Pattern::kBlob;
    spec.noise_sigma = static_cast<float>(a.noise);
    spec.category = v % a.categories;
    spec.modality_offsets.resize(static_cast<std::size_t>(a.modalities));
    for (int m = 0; m < a.modalities; ++m) {
      spec.modality_offsets[static_cast<std::size_t>(m)] =
          static_cast<float>(m * a.offset);
    }
    const std::uint64_t vseed = master.next();
    Volume vol = gen_synthetic(spec, dims, a.modalities, vseed);
    vol.spacing = spacing;
    std::snprintf(name, sizeof(name), "vol_%04d.vvol", v);
    write_volume(vol, out / name);
    volumes.push_back(std::move(vol));
    vol_seeds.push_back(vseed);
  }

  int n_spatial = 0, n_contrast = 0, n_semantic = 0;
  if (want_spatial) {
    for (int v = 0; v < a.volumes; ++v) {
      const std::vector<Coord3> origins = enumerate_spatial_origins(dims, scfg);
      if (origins.empty()) {
        throw UsageError("no spatial origin fits: shrink --patch-dims/--stride/--n-patches");
      }
      for (int s = 0; s < a.spatial_per_vol; ++s) {
        const Coord3 o = origins[master.uniform(origins.size())];
        const int channel = static_cast<int>(master.uniform(
            static_cast<std::uint64_t>(a.modalities)));
        const PatchSequence seq = build_spatial_sequence(volumes[static_cast<std::size_t>(v)],
                                                         o, scfg, channel, v);
        std::snprintf(name, sizeof(name), "spatial_%04d.vseq", n_spatial++);
        write_sequence(seq, out / name);
      }
    }
  }
  if (want_contrast) {
    for (int v = 0; v < a.volumes; ++v) {
      const std::vector<Coord3> origins = enumerate_spatial_origins(dims, scfg);
      if (origins.empty()) {
        throw UsageError("no origin fits: shrink --patch-dims/--stride/--n-patches");
      }
      for (int s = 0; s < a.contrast_per_vol; ++s) {
        // Contrast shares one origin across modalities; reuse the spatial
        // fit so the z span stays inside the volume.
        const Coord3 o = origins[master.uniform(origins.size())];
        const PatchSequence seq = build_contrast_sequence(volumes[static_cast<std::size_t>(v)],
                                                          o, scfg, v);
        std::snprintf(name, sizeof(name), "contrast_%04d.vseq", n_contrast++);
        write_sequence(seq, out / name);
      }
    }
  }
  if (want_semantic) {
    std::vector<SemanticEntry> pool(static_cast<std::size_t>(a.volumes));
    for (int v = 0; v < a.volumes; ++v) {
      SyntheticSpec spec;
      spec.pattern = Pattern::kBlob;
      spec.category = v % a.categories;
      pool[static_cast<std::size_t>(v)].volume = &volumes[static_cast<std::size_t>(v)];
      pool[static_cast<std::size_t>(v)].key_range =
          blob_extent_z(spec, dims, vol_seeds[static_cast<std::size_t>(v)]);
      pool[static_cast<std::size_t>(v)].source_id = v;
    }
    for (int c = 0; c < a.categories; ++c) {
      for (int s = 0; s < a.semantic_per_cat; ++s) {
        const PatchSequence seq = build_semantic_sequence(pool, c, scfg, master);
        std::snprintf(name, sizeof(name), "semantic_%04d.vseq", n_semantic++);
        write_sequence(seq, out / name);
      }
    }
  }

  std::ofstream meta(out / "archive.meta");
  if (!meta) throw IoError("cannot write archive.meta");
  meta << "volumes = " << a.volumes << "\n";
  meta << "dims = " << a.dims << "\n";
  meta << "modalities = " << a.modalities << "\n";
  meta << "categories = " << a.categories << "\n";
  meta << "seed = " << a.seed << "\n";
  meta << "noise = " << a.noise << "\n";
  meta << "offset = " << a.offset << "\n";
  meta << "spacing = " << a.spacing << "\n";
  meta << "stride = " << scfg.stride << "\n";
  meta << "n_patches = " << scfg.n_patches << "\n";
  meta << "patch_dims = " << a.patch_dims << "\n";
  meta << "context_mm = " << a.context_mm << "\n";
  meta << "semantic_dims = " << a.semantic_dims << "\n";
  std::cout << "wrote " << a.volumes << " volumes, " << n_spatial << " spatial + "
            << n_contrast << " contrast + " << n_semantic << " semantic sequences to "
            << out.string() << "\n";
}

const std::set<std::string>& pretrain_keys() {
  static const std::set<std::string> keys = {
      "data",       "out",        "steps",     "batch",     "lr",
      "warmup",     "min_lr",     "clip_norm", "seed",      "log_every",
      "embed_dim",  "heads",      "layers",    "mlp_ratio", "token_dims",
      "patch_dims", "n_patches",  "weight_decay", "beta1",  "beta2",
      "adam_eps",   "resume",     "metrics",   "layerwise_lr_decay"};
  return keys;
}

TrainConfig train_config_from(const RunConfig& rc) {
  TrainConfig cfg;
  cfg.token.token_dims = parse_dim3(rc.get_string("token_dims", "4,8,8"), "token_dims");
  const Dim3 patch = parse_dim3(rc.get_string("patch_dims", "8,16,16"), "patch_dims");
  const int n_patches = rc.get_int("n_patches", 4);
  if (n_patches < 1) throw UsageError("n_patches must be >= 1");
  const int k = cfg.token.tokens_per_patch(patch);

  cfg.model.embed_dim = rc.get_int("embed_dim", 64);
  cfg.model.heads = rc.get_int("heads", 4);
  cfg.model.layers = rc.get_int("layers", 4);
  cfg.model.mlp_ratio = rc.get_double("mlp_ratio", 4.0);
  cfg.model.token_pixels = static_cast<int>(cfg.token.token_dims.volume());
  cfg.model.seq_len = n_patches * k;
  cfg.model.validate();

  cfg.steps = rc.require_u64("steps");
  if (cfg.steps == 0) throw UsageError("steps must be >= 1");
  cfg.batch = rc.get_int("batch", 16);
  cfg.adam.lr = rc.get_double("lr", 1e-4);
  cfg.adam.beta1 = rc.get_double("beta1", 0.9);
  cfg.adam.beta2 = rc.get_double("beta2", 0.95);
  cfg.adam.eps = rc.get_double("adam_eps", 1e-8);
  cfg.adam.weight_decay = rc.get_double("weight_decay", 0.05);
  if (rc.has("warmup")) cfg.warmup_steps = rc.require_u64("warmup");
  cfg.min_lr = rc.get_double("min_lr", 0.0);
  cfg.clip_norm = rc.get_double("clip_norm", 1.0);
  cfg.seed = rc.get_u64("seed", 0);
  cfg.log_every = rc.get_u64("log_every", 50);
  // layerwise_lr_decay is accepted for forward compatibility with full
  // fine-tuning; the frozen-encoder probe path never applies it.
  (void)rc.get_double("layerwise_lr_decay", 1.0);
  return cfg;
}

void cmd_pretrain(const std::string& config_path) {
  const RunConfig rc = RunConfig::load(config_path);
  rc.restrict_keys(pretrain_keys());
  const std::filesystem::path data = rc.require_string("data");
  const std::filesystem::path out = rc.require_string("out");
  const TrainConfig cfg = train_config_from(rc);

  std::optional<std::filesystem::path> resume;
  if (rc.has("resume")) resume = rc.require_string("resume");
  const std::filesystem::path metrics_path =
      rc.get_string("metrics", out.string() + ".log");
  std::ofstream metrics(metrics_path);
  if (!metrics) throw IoError("cannot write metrics log " + metrics_path.string());

  const TrainState final_state = pretrain(cfg, data, out, &metrics, resume);
  std::cout << "wrote checkpoint " << out.string() << " at step " << final_state.step
            << "\n";
}

void cmd_gradcheck(std::uint64_t seed, double h, double tol) {
  const std::vector<NamedGradReport> reports = standard_gradchecks(seed, h, tol);
  bool all_pass = true;
  for (const NamedGradReport& r : reports) {
    std::printf("%s: max_rel_err=%.3e worst=%s[%d,%d] analytic=%.6e numeric=%.6e %s\n",
                r.name.c_str(), r.report.max_rel_err, r.report.worst_param.c_str(),
                r.report.worst_row, r.report.worst_col, r.report.analytic,
                r.report.numeric, r.report.pass ? "PASS" : "FAIL");
    all_pass = all_pass && r.report.pass;
  }
  if (!all_pass) throw NumericError("gradient check failed");
}

struct ProbeArgs {
  std::string ckpt;
  std::string data;
  std::string config;
  std::string out;
  int train = 200;
  int test = 100;
  int epochs = 300;
  double lr = 0.5;
  std::uint64_t rand_seed = 1;
};

void cmd_probe(const ProbeArgs& a) {
  RunConfig rc = RunConfig::from_map({});
  if (!a.config.empty()) {
    rc = RunConfig::load(a.config);
    rc.restrict_keys(pretrain_keys());
  }
  TokenConfig tcfg;
  tcfg.token_dims = parse_dim3(rc.get_string("token_dims", "4,8,8"), "token_dims");
  SequencerConfig scfg;
  scfg.patch_dims = parse_dim3(rc.get_string("patch_dims", "8,16,16"), "patch_dims");
  scfg.n_patches = rc.get_int("n_patches", 4);
  const int k = tcfg.tokens_per_patch(scfg.patch_dims);

  ModelConfig mcfg;
  mcfg.embed_dim = rc.get_int("embed_dim", 64);
  mcfg.heads = rc.get_int("heads", 4);
  mcfg.layers = rc.get_int("layers", 4);
  mcfg.mlp_ratio = rc.get_double("mlp_ratio", 4.0);
  mcfg.token_pixels = static_cast<int>(tcfg.token_dims.volume());
  mcfg.seq_len = scfg.n_patches * k;
  mcfg.validate();

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(a.data)) {
    if (entry.path().extension() == ".vvol") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (static_cast<int>(files.size()) < a.train + a.test) {
    throw DataError("probe wants " + std::to_string(a.train + a.test) + " volumes, " +
                    a.data + " has " + std::to_string(files.size()));
  }

  const TrainState pre = load_checkpoint(a.ckpt);
  const ParamStore rand_params = init_params(mcfg, a.rand_seed);

  std::vector<std::vector<double>> feat_pre, feat_rand;
  std::vector<int> labels;
  for (int i = 0; i < a.train + a.test; ++i) {
    const Volume v = read_volume(files[static_cast<std::size_t>(i)]);
    if (!v.category.has_value()) {
      throw LabelError(files[static_cast<std::size_t>(i)].filename().string() +
                       " has no category label");
    }
    feat_pre.push_back(encode_volume(pre.params, mcfg, v, scfg, tcfg));
    feat_rand.push_back(encode_volume(rand_params, mcfg, v, scfg, tcfg));
    labels.push_back(*v.category);
  }

  auto fit_eval = [&](const std::vector<std::vector<double>>& feats) {
    std::vector<std::vector<double>> train_f(feats.begin(), feats.begin() + a.train);
    std::vector<int> train_y(labels.begin(), labels.begin() + a.train);
    std::vector<std::vector<double>> test_f(feats.begin() + a.train, feats.end());
    std::vector<int> test_y(labels.begin() + a.train, labels.end());
    const ProbeModel m = fit_linear_probe(train_f, train_y, a.epochs, a.lr);
    return eval_multiclass(m, test_f, test_y);
  };
  const EvalMetrics m_pre = fit_eval(feat_pre);
  const EvalMetrics m_rand = fit_eval(feat_rand);

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw IoError("cannot write probe report " + a.out);
    os = &file;
  }
  char line[128];
  auto emit = [&](const char* name, const EvalMetrics& m) {
    (*os) << "# encoder=" << name << "\n";
    std::snprintf(line, sizeof(line), "acc=%.6f auc=%.6f n=%d\n", m.acc,
                  m.auc.value_or(0.5), m.n);
    (*os) << line;
  };
  emit("pretrained", m_pre);
  emit("random", m_rand);
  if (os == &file) {
    std::cout << "pretrained acc=" << m_pre.acc << " random acc=" << m_rand.acc << "\n";
  }
}

void cmd_mask_dump(int len, int start) {
  AttentionMask m;
  try {
    m = build_prefix_causal_mask(len, start);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  for (int q = 1; q <= len; ++q) {
    for (int p = 1; p <= len; ++p) {
      std::cout << (m.at(q, p) ? '1' : '0') << (p == len ? '\n' : ' ');
    }
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"3D volume patch-sequence pretraining and probing"};
  app.require_subcommand(1);

  GenDataArgs gd;
  CLI::App* gen = app.add_subcommand("gen-data", "generate synthetic volumes and sequence archives");
  gen->add_option("--out", gd.out, "output directory")->required();
  gen->add_option("--volumes", gd.volumes, "volume count");
  gen->add_option("--dims", gd.dims, "volume dims D,H,W");
  gen->add_option("--modalities", gd.modalities, "channels per volume");
  gen->add_option("--categories", gd.categories, "category label count");
  gen->add_option("--seed", gd.seed, "generation seed");
  gen->add_option("--noise", gd.noise, "voxel noise sigma");
  gen->add_option("--offset", gd.offset, "per-modality intensity offset scale");
  gen->add_option("--spacing", gd.spacing, "voxel spacing Z,Y,X in mm");
  gen->add_option("--stride", gd.stride, "spatial sequence depth stride");
  gen->add_option("--n-patches", gd.n_patches, "patches per sequence");
  gen->add_option("--patch-dims", gd.patch_dims, "patch dims d,h,w");
  gen->add_option("--context-mm", gd.context_mm, "semantic context in mm");
  gen->add_option("--semantic-dims", gd.semantic_dims, "semantic resize target d,h,w");
  gen->add_option("--spatial-per-vol", gd.spatial_per_vol, "spatial sequences per volume");
  gen->add_option("--contrast-per-vol", gd.contrast_per_vol, "contrast sequences per volume");
  gen->add_option("--semantic-per-cat", gd.semantic_per_cat, "semantic sequences per category");
  gen->add_option("--kinds", gd.kinds, "comma list of sequence kinds to write");
  gen->callback([&] { cmd_gen_data(gd); });

  std::string config_path;
  CLI::App* pre = app.add_subcommand("pretrain", "run the pre-training loop from a config file");
  pre->add_option("--config", config_path, "key = value config file")->required();
  pre->callback([&] { cmd_pretrain(config_path); });

  std::uint64_t gc_seed = 5;
  double gc_h = 1e-4, gc_tol = 1e-4;
  CLI::App* gc = app.add_subcommand("gradcheck", "finite-difference check of the gradients");
  gc->add_option("--seed", gc_seed, "configuration seed");
  gc->add_option("--step", gc_h, "finite-difference step");
  gc->add_option("--tol", gc_tol, "relative-error tolerance");
  gc->callback([&] { cmd_gradcheck(gc_seed, gc_h, gc_tol); });

  ProbeArgs pa;
  CLI::App* pr = app.add_subcommand("probe", "linear-probe a checkpoint against a random encoder");
  pr->add_option("--ckpt", pa.ckpt, "pretrained checkpoint")->required();
  pr->add_option("--data", pa.data, "directory of labeled .vvol volumes")->required();
  pr->add_option("--config", pa.config, "model config file (pretrain keys)");
  pr->add_option("--out", pa.out, "report path (default stdout)");
  pr->add_option("--train", pa.train, "training volume count");
  pr->add_option("--test", pa.test, "test volume count");
  pr->add_option("--epochs", pa.epochs, "probe training epochs");
  pr->add_option("--probe-lr", pa.lr, "probe learning rate");
  pr->add_option("--rand-seed", pa.rand_seed, "random-encoder init seed");
  pr->callback([&] { cmd_probe(pa); });

  int md_len = 0, md_start = 0;
  CLI::App* md = app.add_subcommand("mask-dump", "print the prefix-causal mask");
  md->add_option("--len", md_len, "sequence length Nk")->required();
  md->add_option("--start", md_start, "startup index i")->required();
  md->callback([&] { cmd_mask_dump(md_len, md_start); });

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric abort: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace volseq
