// Copyright 2026 The volseq Authors
// SPDX-License-Identifier: Apache-2.0

#include "volseq/cli.hpp"

int main(int argc, char** argv) { return volseq::run_cli(argc, argv); }
