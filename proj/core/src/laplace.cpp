#include "exradon/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace exradon {

namespace {

RayEnvelope side_envelope(const Profile1D& p) {
  RayEnvelope e;
  e.C = p.C;
  e.mu = p.mu;
  e.beta = p.beta;
  e.u0 = p.envelope_radius;
  e.finite = p.mu > 0.0;
  return e;
}

}  // namespace

Profile1D Profile1D::zero() {
  Profile1D p;
  p.f = [](double) { return 0.0; };
  p.C = 0.0;
  p.kind = "zero";
  return p;
}

Profile1D Profile1D::exp_abs(double mu) {
  if (mu <= 0.0) raise(Errc::InvalidArgument, "exp_abs rate must be positive");
  Profile1D p;
  p.f = [mu](double x) { return std::exp(-mu * std::abs(x)); };
  p.C = 1.0;
  p.mu = mu;
  p.beta = 1.0;
  p.kind = "exp_abs";
  return p;
}

Profile1D Profile1D::gaussian(double sigma) {
  if (sigma <= 0.0) raise(Errc::InvalidArgument, "gaussian sigma must be positive");
  Profile1D p;
  const double inv = 1.0 / (sigma * sigma);
  p.f = [inv](double x) { return std::exp(-x * x * inv); };
  p.C = 1.0;
  p.mu = inv;
  p.beta = 2.0;
  p.kind = "gaussian";
  return p;
}

Profile1D Profile1D::stieltjes() {
  Profile1D p;
  p.f = [](double x) {
    if (x <= 0.0) return 0.0;
    const double t = std::pow(x, 0.25);
    return std::exp(-t) * std::sin(t);
  };
  p.C = 1.0;
  p.mu = 1.0;
  p.beta = 0.25;
  p.kind = "stieltjes";
  return p;
}

Profile1D Profile1D::restrict_to_line(FieldPtr field, const Line& line) {
  Profile1D p;
  const RayEnvelope ep = field->ray_envelope(line.point_at(0.0), line.dir.omega_perp());
  const RayEnvelope em = field->ray_envelope(line.point_at(0.0), -line.dir.omega_perp());
  if (!ep.finite || !em.finite)
    raise(Errc::DivergentTransform, "field does not decay along this line");
  p.f = [field, line](double u) { return field->value(line.point_at(u)); };
  p.C = std::max(ep.C, em.C);
  p.mu = std::min(ep.mu, em.mu);
  p.beta = std::min(ep.beta, em.beta);
  p.envelope_radius = std::max(ep.u0, em.u0);
  p.kind = "line_restriction";
  return p;
}

IntegralResult two_sided_laplace(const Profile1D& profile, double s, const QuadratureSpec& quad) {
  if (profile.C > 0.0 && profile.beta < 1.0 && s != 0.0)
    raise(Errc::DivergentTransform,
          "sub-exponential decay: the transform diverges on the growing side");
  const double mu_strip = profile.beta > 1.0 ? std::numeric_limits<double>::infinity()
                                             : profile.mu;
  if (!(s > 0.0) || !(s < mu_strip))
    raise(Errc::OutsideStrip, "s outside the strip of convergence (0, mu)");

  const RayEnvelope env = side_envelope(profile);
  // Right side: weight exp(-s x) helps; left side: it grows like exp(s|x|).
  const double rp = env.solve_radius(quad.truncation_threshold, -s, quad.max_halfwidth);
  const double rm = env.solve_radius(quad.truncation_threshold, s, quad.max_halfwidth);
  IntegralResult res = integrate_adaptive(
      [&](double x) { return exp_weighted(profile.f(x), -s * x); }, -rm, rp, quad, {0.0});
  res.error += env.tail(rp, -s) + env.tail(rm, s);
  return res;
}

MomentList moments_1d(const Profile1D& profile, int n_max, const QuadratureSpec& quad) {
  if (n_max < 0) raise(Errc::InvalidArgument, "n_max must be nonnegative");
  MomentList out;

  if (profile.kind == "stieltjes") {
    // x = t^4: m_n = 4 * integral_0^inf t^(4n+3) exp(-t) sin(t) dt, summed
    // between consecutive zeros of sin.
    for (int n = 0; n <= n_max; ++n) {
      const double power = 4.0 * n + 3.0;
      double acc = 0.0, scale = 0.0, err = 0.0;
      QuadratureSpec piece = quad;
      piece.abs_tol = 1e-300;
      piece.rel_tol = 1e-13;
      const int pieces = static_cast<int>((power + 60.0 * std::sqrt(power + 1.0)) / kPi) + 4;
      for (int j = 0; j < pieces; ++j) {
        auto g = [&](double t) {
          return std::exp(power * std::log(t) - t) * std::sin(t);
        };
        const auto r = integrate_adaptive(g, std::max(j * kPi, 1e-300), (j + 1) * kPi, piece);
        acc += r.value;
        scale += std::abs(r.value);
        err += r.error;
      }
      out.values.push_back(4.0 * acc);
      out.errors.push_back(4.0 * err + 1e-14 * 4.0 * scale);
      out.abs_scales.push_back(4.0 * scale);
    }
    return out;
  }

  if (profile.C > 0.0 && !(profile.mu > 0.0))
    raise(Errc::DivergentMoment, "profile declares no decay envelope");
  const RayEnvelope base = side_envelope(profile);
  for (int n = 0; n <= n_max; ++n) {
    const RayEnvelope env = base.loosened_by_poly(n, 1.0);
    const double r = env.solve_radius(quad.truncation_threshold, 0.0, quad.max_halfwidth);
    auto integrand = [&](double x) {
      return (n == 0 ? 1.0 : std::pow(x, n)) * profile.f(x);
    };
    const auto val = integrate_adaptive(integrand, -r, r, quad, {0.0});
    const auto mag = integrate_adaptive([&](double x) { return std::abs(integrand(x)); }, -r, r,
                                        quad, {0.0});
    const double tail = env.tail(r, 0.0);
    out.values.push_back(val.value);
    out.errors.push_back(val.error + 2.0 * tail);
    out.abs_scales.push_back(mag.value + 2.0 * tail);
  }
  return out;
}

LaplaceReportEntry series_vs_transform(const Profile1D& profile, double s, int N,
                                       const QuadratureSpec& quad) {
  if (profile.beta != 1.0 && profile.C > 0.0)
    raise(Errc::InvalidArgument, "the tail estimates require exponential decay (beta = 1)");
  LaplaceReportEntry e;
  e.s = s;
  e.N = N;
  e.L_quadrature = two_sided_laplace(profile, s, quad).value;
  const MomentList m = moments_1d(profile, N, quad);
  double sn = 0.0;
  for (int n = 0; n <= N; ++n) {
    const double coeff = std::exp(n * std::log(s) - std::lgamma(n + 1.0));
    sn += (n % 2 == 0 ? 1.0 : -1.0) * coeff * m.values[n];
  }
  e.S_N = sn;

  const double ratio = s / profile.mu;
  double geom = 0.0;
  for (int n = 0; n <= N; ++n) geom += std::pow(ratio, n);
  e.bound_neg_axis = profile.C / profile.mu * (1.0 / (1.0 - ratio) - geom);
  e.bound_pos_axis = 1.0 / profile.mu * std::pow(ratio, N + 1);
  const double slack = 1e-12 * (std::abs(e.L_quadrature) + 1.0);
  e.satisfied = std::abs(e.L_quadrature - e.S_N) <= e.bound_neg_axis + e.bound_pos_axis + slack;
  return e;
}

std::string to_string(MomentVerdict v) {
  switch (v) {
    case MomentVerdict::ConsistentWithZero: return "consistent-with-zero";
    case MomentVerdict::Nonzero: return "nonzero";
    case MomentVerdict::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

MomentVerdict moment_vanishing_test(const Profile1D& profile, int n_max, double tol,
                                    const QuadratureSpec& quad) {
  const MomentList m = moments_1d(profile, n_max, quad);
  double global_scale = 0.0;
  for (double s : m.abs_scales) global_scale = std::max(global_scale, s);
  for (int n = 0; n <= n_max; ++n) {
    const double scale = std::max({m.abs_scales[n], 1e-30 * global_scale, 1e-300});
    if (std::abs(m.values[n]) > tol * scale) return MomentVerdict::Nonzero;
  }
  const bool exponential = profile.beta >= 1.0 && (profile.mu > 0.0 || profile.C == 0.0);
  return exponential ? MomentVerdict::ConsistentWithZero : MomentVerdict::Indeterminate;
}

}  // namespace exradon
