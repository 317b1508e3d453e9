#pragma once

#include <functional>
#include <string>
#include <vector>

#include "exradon/fields.hpp"
#include "exradon/quadrature.hpp"

namespace exradon {

/// 1-D profile with a declared envelope |f(x)| <= C*exp(-mu*|x|^beta) beyond
/// envelope_radius. Restriction of a 2-D field to a line, or a named entry.
struct Profile1D {
  std::function<double(double)> f;
  double C = 1.0;
  double mu = 1.0;
  double beta = 1.0;
  double envelope_radius = 0.0;
  std::string kind = "custom";

  static Profile1D zero();
  /// exp(-mu*|x|).
  static Profile1D exp_abs(double mu = 1.0);
  /// exp(-x^2 / sigma^2).
  static Profile1D gaussian(double sigma = 1.0);
  /// exp(-x^(1/4)) * sin(x^(1/4)) on x >= 0, extended by zero: the classical
  /// vanishing-moment profile with sub-exponential decay.
  static Profile1D stieltjes();
  static Profile1D restrict_to_line(FieldPtr field, const Line& line);
};

/// Two-sided Laplace transform Lf(s) = integral f(x) exp(-s x) dx on the
/// strip 0 < s < mu. Throws Errc::OutsideStrip off the strip and
/// Errc::DivergentTransform for sub-exponential (beta < 1) profiles.
IntegralResult two_sided_laplace(const Profile1D& profile, double s, const QuadratureSpec& quad);

struct MomentList {
  std::vector<double> values;
  std::vector<double> errors;
  /// integral |x^n f(x)| dx, the natural tolerance scale per moment.
  std::vector<double> abs_scales;
};

/// m_n = integral f(x) x^n dx for n = 0..n_max. The oscillatory stieltjes
/// profile is integrated in the substituted variable x = t^4 between
/// consecutive zeros of sin(t).
MomentList moments_1d(const Profile1D& profile, int n_max, const QuadratureSpec& quad);

struct LaplaceReportEntry {
  double s = 0.0;
  int N = 0;
  double L_quadrature = 0.0;
  double S_N = 0.0;
  double bound_neg_axis = 0.0;
  double bound_pos_axis = 0.0;
  bool satisfied = false;
};

/// Compares Lf(s) with the moment partial sum S_N(s) = sum (-1)^n/n! s^n m_n
/// and asserts |L - S_N| against the two envelope tail bounds
///   (C/mu) * (1/(1-s/mu) - sum_{n<=N} (s/mu)^n)    and
///   (1/mu) * (s/mu)^(N+1),
/// evaluated verbatim with the profile's C and mu. Requires beta = 1.
LaplaceReportEntry series_vs_transform(const Profile1D& profile, double s, int N,
                                       const QuadratureSpec& quad);

enum class MomentVerdict { ConsistentWithZero, Nonzero, Indeterminate };
std::string to_string(MomentVerdict v);

/// "consistent-with-zero" needs all moments below tol*scale AND certified
/// exponential decay (beta >= 1); vanishing moments with beta < 1 are
/// "indeterminate" (moment determinacy fails in that regime).
MomentVerdict moment_vanishing_test(const Profile1D& profile, int n_max, double tol,
                                    const QuadratureSpec& quad);

}  // namespace exradon
