#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "exradon/fields.hpp"
#include "exradon/geometry.hpp"
#include "exradon/moment_recursion.hpp"
#include "exradon/transform.hpp"

namespace exradon {

struct GridSpec {
  double theta_start_deg = 0.0;
  int theta_count = 8;
  double theta_step_deg = 22.5;
  double p_start = -4.0;
  int p_count = 32;
  double p_step = 0.25;

  GridAxis theta_axis() const {
    return {theta_start_deg * kPi / 180.0, theta_step_deg * kPi / 180.0, theta_count};
  }
  GridAxis p_axis() const { return {p_start, p_step, p_count}; }
};

struct ProbeSpec {
  double theta0_deg = 0.0;
  double half_width_deg = 10.0;
  double p0 = 0.5;
  double mu = 0.1;
  int k_max = 2;
  std::vector<double> p_samples{1.0, 2.0};
  // Expected per-condition outcomes; a probe run passes when it matches.
  bool expect_b = true, expect_c = true, expect_d = true, expect_e = true;
};

struct LaplaceSpec {
  std::string profile = "exp_abs(1.0)";
  std::vector<double> s_values{0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<int> N_values{4, 6, 8, 10, 12, 14};
  int n_max = 12;
  double vanish_tol = 1e-8;
};

struct ExperimentConfig {
  std::string command;
  std::string field = "gaussian(1.0)";
  std::string region = "none";
  GridSpec grid;
  double lambda = 0.0;
  QuadratureSpec quad;
  bool quad_overridden = false;
  RecursionConfig recursion;
  std::vector<MomentAnchor> anchors;
  LaplaceSpec laplace;
  int helgason_k_max = 3;
  std::pair<double, double> helgason_p_window{-8.0, 8.0};
  ProbeSpec probe;
  double mollify_radius = 0.25;
  bool include_hole_cells = false;
  std::map<std::string, double> tolerances;
  std::string output_dir = "out";
  std::uint64_t seed = 0;

  double tolerance_or(const std::string& key, double fallback) const {
    const auto it = tolerances.find(key);
    return it == tolerances.end() ? fallback : it->second;
  }
};

/// Parses and validates the JSON experiment document. Unknown keys are
/// rejected; every violation is reported in one Errc::ConfigInvalid error.
ExperimentConfig parse_config(const std::string& json_text);

/// Catalog spec strings: "zero", "gaussian(sigma)", "stretched(beta, re|im)",
/// "condition_e(theta0_deg)", with optional pipeline modifiers
/// "|transport([[a,b],[c,d]],[tx,ty])" and "|mollify(radius)".
FieldPtr parse_field_spec(const std::string& spec);

/// Region presets: "none", "quadrant", "wedge(half_angle_deg, axis_deg)",
/// "halfstrip(width)", "polyhedral([normal_deg, offset], ...)".
std::optional<ConvexRegion> parse_region_spec(const std::string& spec);

/// Problems that make a counterexample setup unsound (field not stretched,
/// nonzero lambda, hole not covering the complement of the decay cone).
std::vector<std::string> counterexample_setup_problems(const ExperimentConfig& cfg);

}  // namespace exradon
