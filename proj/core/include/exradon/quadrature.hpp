#pragma once

#include <functional>
#include <string>
#include <vector>

#include "exradon/errors.hpp"

namespace exradon {

/// Controls for adaptive line quadrature and tail truncation.
///
/// The truncation radius of an improper integral is solved from the field's
/// declared decay envelope: the smallest R with envelope(R)*weight(R) below
/// truncation_threshold, capped by max_halfwidth. The certified tail bound is
/// added to the reported error.
struct QuadratureSpec {
  std::string rule = "gk15";
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double truncation_threshold = 1e-16;
  double max_halfwidth = 1e4;
  int max_panels = 4000;

  /// Looser settings for stretched-exponential integrands whose truncation
  /// radii run to 1e5 and beyond.
  static QuadratureSpec slow_decay();
};

struct IntegralResult {
  double value = 0.0;
  double error = 0.0;
  long evals = 0;
};

/// value * exp(log_weight) computed in log space, so a huge weight against a
/// vanishing value cannot produce inf * 0 = NaN.
double exp_weighted(double value, double log_weight);

/// Adaptive Gauss7/Kronrod15 with greedy worst-panel bisection. Initial panel
/// boundaries include `breakpoints` (clamped to [a, b]), so integrand kinks
/// can be isolated up front.
IntegralResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  const QuadratureSpec& spec,
                                  const std::vector<double>& breakpoints = {});

}  // namespace exradon
