// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "eegssl/numkernel/param_store.hpp"
#include "eegssl/numkernel/tape.hpp"

namespace eegssl::num {

/// Scalar objective built on a fresh tape from the given parameters.
using ScalarFn = std::function<Var(Tape&, const ParamStore&)>;

struct GradcheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  // Entries where both gradients are below this magnitude are compared
  // against it instead of against themselves.
  double magnitude_floor = 1e-6;
  // One-sided slopes differing by more than this fraction mark a kink.
  double kink_tolerance = 1e-2;
};

struct ParamCheck {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  bool nonsmooth = false;
  std::size_t kink_index = 0;  // first nonsmooth entry
  bool passed = true;
};

struct GradcheckReport {
  std::vector<ParamCheck> params;
  double max_rel_error = 0.0;
  bool passed = true;
};

/// Compares reverse-mode gradients against central finite differences, one
/// entry at a time. A parameter fails when its worst relative error exceeds
/// the tolerance or when its one-sided slopes disagree (a kink in f).
GradcheckReport gradcheck(const ScalarFn& f, const ParamStore& params,
                          const GradcheckOptions& options = {});

}  // namespace eegssl::num
