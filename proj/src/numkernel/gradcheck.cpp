// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#include "eegssl/numkernel/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace eegssl::num {

namespace {

double evaluate(const ScalarFn& f, const ParamStore& params) {
  Tape tape;
  return f(tape, params).value().item();
}

}  // namespace

GradcheckReport gradcheck(const ScalarFn& f, const ParamStore& params,
                          const GradcheckOptions& options) {
  GradMap analytic;
  {
    Tape tape;
    analytic = tape.backward(f(tape, params), params);
  }
  const double f0 = evaluate(f, params);
  const double h = options.step;

  GradcheckReport report;
  ParamStore probe = params;
  for (const auto& [name, value] : params) {
    ParamCheck check;
    check.name = name;
    Tensor& slot = probe.mutable_value(name);
    const Tensor& grad = analytic.at(name);
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double original = slot[i];
      slot[i] = original + h;
      const double fp = evaluate(f, probe);
      slot[i] = original - h;
      const double fm = evaluate(f, probe);
      slot[i] = original;

      const double numeric = (fp - fm) / (2.0 * h);
      const double forward = (fp - f0) / h;
      const double backward = (f0 - fm) / h;
      const double slope_scale = std::max({1.0, std::abs(forward), std::abs(backward)});
      if (std::abs(forward - backward) > options.kink_tolerance * slope_scale) {
        if (!check.nonsmooth) check.kink_index = i;
        check.nonsmooth = true;
      }

      const double a = grad[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), options.magnitude_floor});
      const double rel = std::abs(a - numeric) / denom;
      if (i == 0 || rel > check.max_rel_error) {
        check.max_rel_error = rel;
        check.worst_index = i;
        check.analytic = a;
        check.numeric = numeric;
      }
    }
    check.passed = !check.nonsmooth && check.max_rel_error <= options.tolerance;
    report.max_rel_error = std::max(report.max_rel_error, check.max_rel_error);
    report.passed = report.passed && check.passed;
    report.params.push_back(std::move(check));
  }
  return report;
}

}  // namespace eegssl::num
