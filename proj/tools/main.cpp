// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return eegssl::cli::run(argc, argv, std::cout, std::cerr); }
