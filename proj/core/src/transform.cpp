#include "exradon/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "exradon/parallel.hpp"

namespace exradon {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

IntegralResult weighted_line_integral(const Field& field, const Line& line, double lambda, int k,
                                      const QuadratureSpec& quad) {
  if (k < 0) raise(Errc::InvalidArgument, "moment order must be nonnegative");
  if (field.singular_on_line(line))
    raise(Errc::SingularLine, "line overlaps the singular set of " + field.id());

  const Vec2 origin = line.point_at(0.0);
  const Vec2 wp = line.dir.omega_perp();
  RayEnvelope env_p = field.ray_envelope(origin, wp);
  RayEnvelope env_m = field.ray_envelope(origin, -wp);
  if (k > 0) {
    env_p = env_p.loosened_by_poly(k, 1.0);
    env_m = env_m.loosened_by_poly(k, 1.0);
  }
  // Weight exp(-lambda*u) grows like exp(|lambda| u) on one side; the declared
  // decay has to dominate on both.
  if (!env_p.decays(-lambda) || !env_m.decays(lambda))
    raise(Errc::DivergentTransform,
          "decay envelope of " + field.id() + " does not dominate the weight");

  const double rp = env_p.solve_radius(quad.truncation_threshold, -lambda, quad.max_halfwidth);
  const double rm = env_m.solve_radius(quad.truncation_threshold, lambda, quad.max_halfwidth);

  std::vector<double> cuts = field.breakpoints(line, std::max(rp, rm));
  cuts.push_back(0.0);

  auto integrand = [&](double u) {
    return exp_weighted((k == 0 ? 1.0 : std::pow(u, k)) * field.value(line.point_at(u)),
                        -lambda * u);
  };
  IntegralResult res = integrate_adaptive(integrand, -rm, rp, quad, cuts);
  res.error += env_p.tail(rp, -lambda) + env_m.tail(rm, lambda);
  return res;
}

// Bounded-window probe for sanity contrast on cells whose transform diverges.
double bounded_probe(const Field& field, const Line& line, double lambda,
                     const QuadratureSpec& quad) {
  const double r = 16.0;
  std::vector<double> cuts = field.breakpoints(line, r);
  cuts.push_back(0.0);
  QuadratureSpec local = quad;
  local.max_panels = std::min(local.max_panels, 2000);
  const auto res = integrate_adaptive(
      [&](double u) { return exp_weighted(field.value(line.point_at(u)), -lambda * u); }, -r, r,
      local, cuts);
  return res.value;
}

}  // namespace

std::string to_string(CellMask m) {
  switch (m) {
    case CellMask::Exterior: return "exterior";
    case CellMask::IntersectsHole: return "intersects-hole";
    case CellMask::Divergent: return "divergent";
  }
  return "unknown";
}

IntegralResult line_integral(const Field& field, const Line& line, double lambda,
                             const QuadratureSpec& quad) {
  return weighted_line_integral(field, line, lambda, 0, quad);
}

IntegralResult weighted_moment(const Field& field, const Line& line, double lambda, int k,
                               const QuadratureSpec& quad) {
  return weighted_line_integral(field, line, lambda, k, quad);
}

Sinogram sinogram(const Field& field, const std::optional<ConvexRegion>& region,
                  const SinogramRequest& req, const QuadratureSpec& quad) {
  if (req.theta.count < 1 || req.p.count < 1)
    raise(Errc::InvalidArgument, "sinogram grid must be nonempty");
  if (req.theta.step <= 0.0 || req.p.step <= 0.0)
    raise(Errc::InvalidArgument, "sinogram grid steps must be positive");

  Sinogram s;
  s.lambda = req.lambda;
  s.theta = req.theta;
  s.p = req.p;
  s.field_id = field.id();
  s.quad = quad;
  s.decay = field.decay();
  const int cells = req.theta.count * req.p.count;
  s.values.assign(cells, kNan);
  s.err.assign(cells, kNan);
  s.mask.assign(cells, CellMask::Exterior);

  parallel_for(cells, [&](int cell) {
    const int it = cell / req.p.count;
    const int ip = cell % req.p.count;
    const Line line(req.theta.at(it), req.p.at(ip));
    const bool hole = region && line_intersects(*region, line);
    if (hole) {
      s.mask[cell] = CellMask::IntersectsHole;
      if (!req.include_hole_cells) return;
    }
    try {
      const IntegralResult r = weighted_line_integral(field, line, req.lambda, 0, quad);
      s.values[cell] = r.value;
      s.err[cell] = r.error;
    } catch (const Error&) {
      if (hole) {
        s.values[cell] = bounded_probe(field, line, req.lambda, quad);
      } else {
        s.mask[cell] = CellMask::Divergent;
      }
    }
  });
  return s;
}

ConvolutionReport convolution_check(const FieldPtr& field, double radius,
                                    const std::optional<ConvexRegion>& region,
                                    const SinogramRequest& req, const QuadratureSpec& quad,
                                    double tolerance, int conv_points) {
  if (radius <= 0.0) raise(Errc::InvalidArgument, "mollifier radius must be positive");
  if (conv_points < 5) raise(Errc::InvalidArgument, "p-convolution needs at least 5 points");
  if (conv_points % 2 == 0) ++conv_points;

  const FieldPtr smooth = mollify(field, radius);
  const Sinogram lhs = sinogram(*smooth, region, req, quad);

  // R_lambda of the unit bump is radial in the line direction, so one profile
  // per lambda serves every row.
  struct BumpProfile {
    std::vector<double> q, g;
  };
  auto bump_transform = [&](int m) {
    BumpProfile prof;
    const double h = 2.0 * radius / (m - 1);
    // Continuous normalization of the bump.
    static const double unit_mass = [] {
      QuadratureSpec fine;
      fine.abs_tol = 1e-14;
      fine.rel_tol = 1e-13;
      return kTwoPi *
             integrate_adaptive(
                 [](double rho) { return rho * std::exp(-1.0 / (1.0 - rho * rho)); }, 0.0, 1.0,
                 fine)
                 .value;
    }();
    const double c = 1.0 / (radius * radius * unit_mass);
    QuadratureSpec local = quad;
    local.abs_tol = std::min(local.abs_tol, 1e-12);
    for (int i = 0; i < m; ++i) {
      const double qv = -radius + i * h;
      const double half = radius * radius - qv * qv;
      double val = 0.0;
      if (half > 1e-30) {
        const double w = std::sqrt(half);
        val = integrate_adaptive(
                  [&](double u) {
                    const double r2 = (qv * qv + u * u) / (radius * radius);
                    if (r2 >= 1.0) return 0.0;
                    return std::exp(-req.lambda * u) * c * std::exp(-1.0 / (1.0 - r2));
                  },
                  -w, w, local)
                  .value;
      }
      prof.q.push_back(qv);
      prof.g.push_back(val);
    }
    return prof;
  };

  auto rhs_discrepancy = [&](int m, double& max_abs, double& max_rel, int& checked) {
    const BumpProfile prof = bump_transform(m);
    const double h = 2.0 * radius / (m - 1);
    std::vector<double> simpson(m, 0.0);
    for (int i = 0; i < m; ++i)
      simpson[i] = (i == 0 || i == m - 1) ? h / 3.0 : (i % 2 == 1 ? 4.0 * h / 3.0 : 2.0 * h / 3.0);

    double scale = 0.0;
    for (int c = 0; c < static_cast<int>(lhs.values.size()); ++c) {
      if (lhs.mask[c] == CellMask::Exterior && std::isfinite(lhs.values[c]))
        scale = std::max(scale, std::abs(lhs.values[c]));
    }
    const double floor = std::max(1e-300, 1e-6 * scale);

    max_abs = 0.0;
    max_rel = 0.0;
    checked = 0;
    std::vector<double> rel(lhs.values.size(), 0.0), abs(lhs.values.size(), 0.0);
    std::vector<uint8_t> used(lhs.values.size(), 0);
    parallel_for(static_cast<int>(lhs.values.size()), [&](int cell) {
      const int it = cell / req.p.count;
      const int ip = cell % req.p.count;
      if (lhs.mask[cell] != CellMask::Exterior || !std::isfinite(lhs.values[cell])) return;
      const double theta = req.theta.at(it);
      const double pv = req.p.at(ip);
      double conv = 0.0;
      for (int j = 0; j < m; ++j) {
        if (prof.g[j] == 0.0) continue;
        const auto r =
            weighted_line_integral(*field, Line(theta, pv - prof.q[j]), req.lambda, 0, quad);
        conv += simpson[j] * prof.g[j] * r.value;
      }
      abs[cell] = std::abs(lhs.values[cell] - conv);
      rel[cell] = abs[cell] / std::max(std::abs(lhs.values[cell]), floor);
      used[cell] = 1;
    });
    for (size_t c = 0; c < lhs.values.size(); ++c) {
      if (!used[c]) continue;
      ++checked;
      max_abs = std::max(max_abs, abs[c]);
      max_rel = std::max(max_rel, rel[c]);
    }
  };

  ConvolutionReport rep;
  rep.tolerance = tolerance;
  rhs_discrepancy(conv_points, rep.max_abs, rep.max_rel, rep.cells_checked);
  double abs2 = 0.0;
  int checked2 = 0;
  rhs_discrepancy(2 * conv_points - 1, abs2, rep.max_rel_refined, checked2);
  rep.pass = rep.max_rel <= tolerance && rep.max_rel_refined <= rep.max_rel * 1.1 + 1e-12;
  return rep;
}

HelgasonReport helgason_moment_check(const Field& field, int k_max, const GridAxis& theta,
                                     std::pair<double, double> p_window,
                                     const QuadratureSpec& quad, double lambda,
                                     double tolerance) {
  if (k_max < 0) raise(Errc::InvalidArgument, "k_max must be nonnegative");
  if (theta.count < 2 * k_max + 1)
    raise(Errc::GridTooSmall, "theta grid cannot resolve a degree-k trigonometric fit");

  HelgasonReport rep;
  rep.k_max = k_max;
  rep.lambda = lambda;
  rep.tolerance = tolerance;
  rep.moments.assign(k_max + 1, std::vector<double>(theta.count, 0.0));

  QuadratureSpec pquad;
  pquad.abs_tol = 1e-9;
  pquad.rel_tol = 1e-9;
  pquad.max_panels = 400;

  std::vector<int> failed(theta.count, 0);
  parallel_for(theta.count, [&](int it) {
    const double th = theta.at(it);
    for (int k = 0; k <= k_max; ++k) {
      try {
        const auto mk = integrate_adaptive(
            [&](double p) {
              const auto r = line_integral(field, Line(th, p), lambda, quad);
              return r.value * (k == 0 ? 1.0 : std::pow(p, k));
            },
            p_window.first, p_window.second, pquad);
        rep.moments[k][it] = mk.value;
      } catch (const Error&) {
        failed[it] = 1;
      }
    }
  });
  for (int f : failed) {
    if (f) raise(Errc::DivergentMoment, "insufficient decay for the requested moments");
  }

  // Least-squares fit by a trigonometric polynomial of degree k.
  auto fit_residual = [&](int k) {
    const int m = 2 * k + 1;
    std::vector<double> basis(m);
    std::vector<std::vector<double>> ata(m, std::vector<double>(m, 0.0));
    std::vector<double> atb(m, 0.0);
    double signal = 0.0;
    for (int it = 0; it < theta.count; ++it) {
      const double th = theta.at(it);
      basis[0] = 1.0;
      for (int d = 1; d <= k; ++d) {
        basis[2 * d - 1] = std::cos(d * th);
        basis[2 * d] = std::sin(d * th);
      }
      for (int i = 0; i < m; ++i) {
        atb[i] += basis[i] * rep.moments[k][it];
        for (int j = 0; j < m; ++j) ata[i][j] += basis[i] * basis[j];
      }
      signal += rep.moments[k][it] * rep.moments[k][it];
    }
    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < m; ++col) {
      int piv = col;
      for (int r = col + 1; r < m; ++r) {
        if (std::abs(ata[r][col]) > std::abs(ata[piv][col])) piv = r;
      }
      std::swap(ata[col], ata[piv]);
      std::swap(atb[col], atb[piv]);
      if (std::abs(ata[col][col]) < 1e-14) continue;
      for (int r = 0; r < m; ++r) {
        if (r == col) continue;
        const double f = ata[r][col] / ata[col][col];
        for (int c2 = col; c2 < m; ++c2) ata[r][c2] -= f * ata[col][c2];
        atb[r] -= f * atb[col];
      }
    }
    std::vector<double> coef(m, 0.0);
    for (int i = 0; i < m; ++i)
      coef[i] = std::abs(ata[i][i]) < 1e-14 ? 0.0 : atb[i] / ata[i][i];

    double resid = 0.0;
    for (int it = 0; it < theta.count; ++it) {
      const double th = theta.at(it);
      double fitv = coef[0];
      for (int d = 1; d <= k; ++d)
        fitv += coef[2 * d - 1] * std::cos(d * th) + coef[2 * d] * std::sin(d * th);
      const double r = rep.moments[k][it] - fitv;
      resid += r * r;
    }
    if (signal < 1e-300) return 0.0;
    return std::sqrt(resid / signal);
  };

  rep.pass = true;
  for (int k = 0; k <= k_max; ++k) {
    rep.residuals.push_back(fit_residual(k));
    if (lambda == 0.0 && rep.residuals.back() > tolerance) rep.pass = false;
  }
  return rep;
}

}  // namespace exradon
