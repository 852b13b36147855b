// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "volseq/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "volseq/errors.hpp"

namespace fs = std::filesystem;
using volseq::testutil::CaptureStream;
using volseq::testutil::TempDir;
using volseq::testutil::slurp;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("volseq");
  for (const std::string& a : args) argv.push_back(a.c_str());
  CliResult r;
  CaptureStream cout_cap(std::cout);
  CaptureStream cerr_cap(std::cerr);
  r.code = volseq::run_cli(static_cast<int>(argv.size()), argv.data());
  r.out = cout_cap.text();
  r.err = cerr_cap.text();
  return r;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  REQUIRE(os.good());
  os << text;
}

// Sorted relative file listing of a directory.
std::vector<std::string> dir_listing(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) {
    names.push_back(e.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

TEST_CASE("config files: comments, whitespace, typed lookups") {
  TempDir td("cfg");
  write_file(td / "run.cfg",
             "# a comment line\n"
             "steps = 12   # trailing comment\n"
             "lr=0.25\n"
             "  name =  run a \n"
             "\n");
  volseq::RunConfig rc = volseq::RunConfig::load(td / "run.cfg");
  CHECK(rc.has("steps"));
  CHECK(rc.require_u64("steps") == 12);
  CHECK(rc.get_double("lr", 0.0) == 0.25);
  CHECK(rc.require_string("name") == "run a");
  CHECK(rc.get_int("absent", 7) == 7);
  CHECK(!rc.has("comment"));
}

TEST_CASE("config files: malformed input is a usage error") {
  TempDir td("cfgbad");
  write_file(td / "dup.cfg", "steps = 1\nsteps = 2\n");
  CHECK_THROWS_AS(volseq::RunConfig::load(td / "dup.cfg"), volseq::UsageError);
  write_file(td / "stray.cfg", "steps\n");
  CHECK_THROWS_AS(volseq::RunConfig::load(td / "stray.cfg"), volseq::UsageError);
  CHECK_THROWS_AS(volseq::RunConfig::load(td / "missing.cfg"), volseq::IoError);

  write_file(td / "types.cfg", "steps = 12x\nlr = fast\n");
  volseq::RunConfig rc = volseq::RunConfig::load(td / "types.cfg");
  CHECK_THROWS_AS(rc.require_u64("steps"), volseq::UsageError);
  CHECK_THROWS_AS(rc.get_double("lr", 0.0), volseq::UsageError);

  volseq::RunConfig strict = volseq::RunConfig::from_map({{"bogus", "1"}});
  try {
    strict.restrict_keys({"steps", "lr"});
    FAIL("restrict_keys accepted an unknown key");
  } catch (const volseq::UsageError& e) {
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
}

TEST_CASE("mask-dump prints the published mask rows") {
  CliResult r = run({"mask-dump", "--len", "4", "--start", "3"});
  CHECK(r.code == 0);
  CHECK(r.out ==
        "1 1 0 0\n"
        "1 1 0 0\n"
        "1 1 1 0\n"
        "1 1 1 1\n");

  CliResult r2 = run({"mask-dump", "--len", "2", "--start", "2"});
  CHECK(r2.code == 0);
  CHECK(r2.out ==
        "1 0\n"
        "1 1\n");
}

TEST_CASE("mask-dump rejects a startup index below 2") {
  CliResult r = run({"mask-dump", "--len", "4", "--start", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("usage error") != std::string::npos);
}

TEST_CASE("bad subcommands and flags exit 2; --help exits 0") {
  CHECK(run({"no-such-command"}).code == 2);
  CHECK(run({"mask-dump", "--len", "4"}).code == 2);  // --start is required
  CliResult h = run({"--help"});
  CHECK(h.code == 0);
  CHECK(h.out.find("gen-data") != std::string::npos);
  CHECK(h.out.find("pretrain") != std::string::npos);
}

TEST_CASE("gen-data writes a byte-identical archive for a fixed seed") {
  TempDir td("gen");
  const std::vector<std::string> base = {
      "gen-data",        "--volumes", "4",     "--dims",     "12,12,12",
      "--modalities",    "2",         "--categories", "2",   "--patch-dims",
      "4,8,8",           "--stride",  "2",     "--n-patches", "2",
      "--semantic-dims", "4,8,8",     "--spatial-per-vol", "1",
      "--contrast-per-vol", "1",      "--semantic-per-cat", "1",
      "--seed",          "9"};

  std::vector<std::string> a = base;
  a.insert(a.end(), {"--out", (td / "a").string()});
  std::vector<std::string> b = base;
  b.insert(b.end(), {"--out", (td / "b").string()});

  CliResult ra = run(a);
  REQUIRE(ra.code == 0);
  CHECK(ra.out.find("wrote 4 volumes") != std::string::npos);
  CliResult rb = run(b);
  REQUIRE(rb.code == 0);

  const std::vector<std::string> names = dir_listing(td / "a");
  CHECK(names == dir_listing(td / "b"));
  CHECK(std::find(names.begin(), names.end(), "vol_0000.vvol") != names.end());
  CHECK(std::find(names.begin(), names.end(), "spatial_0000.vseq") != names.end());
  CHECK(std::find(names.begin(), names.end(), "contrast_0000.vseq") != names.end());
  CHECK(std::find(names.begin(), names.end(), "semantic_0000.vseq") != names.end());
  for (const std::string& n : names) CHECK(slurp(td / "a" / n) == slurp(td / "b" / n));

  // A different seed changes the voxel payloads.
  std::vector<std::string> c = base;
  c.back() = "10";  // base ends with "--seed", "9"
  c.insert(c.end(), {"--out", (td / "c").string()});
  REQUIRE(run(c).code == 0);
  CHECK(slurp(td / "a" / "vol_0000.vvol") != slurp(td / "c" / "vol_0000.vvol"));

  // The archive metadata records the sequencing geometry.
  const std::vector<char> meta = slurp(td / "a" / "archive.meta");
  const std::string meta_text(meta.begin(), meta.end());
  CHECK(meta_text.find("stride = 2") != std::string::npos);
  CHECK(meta_text.find("n_patches = 2") != std::string::npos);
}

TEST_CASE("gen-data refuses contrast sequences from a single modality") {
  TempDir td("gen1m");
  CliResult r = run({"gen-data", "--out", (td / "x").string(), "--volumes", "2",
                     "--dims", "12,12,12", "--modalities", "1", "--kinds", "contrast",
                     "--patch-dims", "4,8,8", "--n-patches", "2", "--stride", "2"});
  CHECK(r.code == 2);
  CHECK(r.err.find("usage error") != std::string::npos);
}

TEST_CASE("pretrain rejects unknown and missing config keys") {
  TempDir td("precfg");
  write_file(td / "unknown.cfg",
             "data = /nowhere\nout = /nowhere/ckpt\nsteps = 1\nbogus_knob = 3\n");
  CliResult r1 = run({"pretrain", "--config", (td / "unknown.cfg").string()});
  CHECK(r1.code == 2);
  CHECK(r1.err.find("bogus_knob") != std::string::npos);

  write_file(td / "nosteps.cfg", "data = /nowhere\nout = /nowhere/ckpt\n");
  CliResult r2 = run({"pretrain", "--config", (td / "nosteps.cfg").string()});
  CHECK(r2.code == 2);
  CHECK(r2.err.find("steps") != std::string::npos);
}

TEST_CASE("pretrain exits 4 when the data directory is missing") {
  TempDir td("premiss");
  write_file(td / "run.cfg", "data = " + (td / "no_such_dir").string() +
                                 "\nout = " + (td / "ckpt.vckp").string() +
                                 "\nsteps = 1\nbatch = 2\n" +
                                 "embed_dim = 16\nheads = 2\nlayers = 1\n" +
                                 "token_dims = 2,4,4\npatch_dims = 4,8,8\nn_patches = 2\n" +
                                 "metrics = " + (td / "m.log").string() + "\n");
  CliResult r = run({"pretrain", "--config", (td / "run.cfg").string()});
  CHECK(r.code == 4);
}

TEST_CASE("pretrain and probe round trip through the command line") {
  TempDir td("e2e");
  // Small archive: 4 labeled volumes, spatial sequences only.
  CliResult gen = run({"gen-data", "--out", (td / "data").string(), "--volumes", "4",
                       "--dims", "12,12,12", "--modalities", "2", "--categories", "2",
                       "--patch-dims", "4,8,8", "--stride", "2", "--n-patches", "2",
                       "--spatial-per-vol", "2", "--kinds", "spatial", "--seed", "3"});
  REQUIRE(gen.code == 0);

  const std::string ckpt = (td / "run.vckp").string();
  write_file(td / "run.cfg", "data = " + (td / "data").string() + "\nout = " + ckpt +
                                 "\nsteps = 2\nbatch = 2\nlr = 1e-3\nlog_every = 1\n" +
                                 "embed_dim = 16\nheads = 2\nlayers = 1\nmlp_ratio = 2\n" +
                                 "token_dims = 2,4,4\npatch_dims = 4,8,8\nn_patches = 2\n" +
                                 "metrics = " + (td / "m.log").string() + "\n");
  CliResult pre = run({"pretrain", "--config", (td / "run.cfg").string()});
  REQUIRE(pre.code == 0);
  CHECK(pre.out.find("wrote checkpoint") != std::string::npos);
  CHECK(fs::exists(td / "run.vckp"));

  const std::vector<char> log = slurp(td / "m.log");
  const std::string log_text(log.begin(), log.end());
  CHECK(log_text.find("step=1 loss=") != std::string::npos);
  CHECK(log_text.find("step=2 loss=") != std::string::npos);

  // The run metadata sits next to the checkpoint and carries the archive
  // stride through for provenance.
  const std::vector<char> meta = slurp(td / "run.vckp.meta");
  const std::string meta_text(meta.begin(), meta.end());
  CHECK(meta_text.find("steps = 2") != std::string::npos);
  CHECK(meta_text.find("stride = 2") != std::string::npos);

  CliResult probe = run({"probe", "--ckpt", ckpt, "--data", (td / "data").string(),
                         "--config", (td / "run.cfg").string(), "--train", "2",
                         "--test", "2", "--epochs", "10", "--out",
                         (td / "report.txt").string()});
  REQUIRE(probe.code == 0);
  const std::vector<char> rep = slurp(td / "report.txt");
  const std::string rep_text(rep.begin(), rep.end());
  CHECK(rep_text.find("# encoder=pretrained") != std::string::npos);
  CHECK(rep_text.find("# encoder=random") != std::string::npos);
  CHECK(rep_text.find("acc=") != std::string::npos);
}

TEST_CASE("gradcheck subcommand exits 0 on the standard battery") {
  CliResult r = run({"gradcheck", "--seed", "1"});
  CHECK(r.code == 0);
}
