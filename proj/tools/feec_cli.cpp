// SPDX-License-Identifier: Apache-2.0
#include "feec/cli/runner.hpp"

int main(int argc, char** argv) { return feec::cli::main_cli(argc, argv); }
