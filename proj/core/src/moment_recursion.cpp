#include "exradon/moment_recursion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "exradon/parallel.hpp"

namespace exradon {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double central_diff(const double* v, int stride, int fd_order, double h) {
  if (fd_order == 2) return (v[stride] - v[-stride]) / (2.0 * h);
  return (-v[2 * stride] + 8.0 * v[stride] - 8.0 * v[-stride] + v[-2 * stride]) / (12.0 * h);
}

void check_fd_order(int fd_order) {
  if (fd_order != 2 && fd_order != 4)
    raise(Errc::InvalidArgument, "fd_order must be 2 or 4");
}

// Composite integral of uniformly spaced samples from index a to b (a <= b):
// Simpson on even interval counts, Simpson + 3/8 on odd, trapezoid below
// 3 points.
double integrate_grid(const std::vector<double>& v, int a, int b, double h) {
  const int n = b - a;
  if (n <= 0) return 0.0;
  if (n == 1) return 0.5 * h * (v[a] + v[b]);
  int start = a;
  double acc = 0.0;
  if (n % 2 == 1) {
    if (n >= 3) {
      acc += 3.0 * h / 8.0 * (v[a] + 3.0 * v[a + 1] + 3.0 * v[a + 2] + v[a + 3]);
      start = a + 3;
    } else {
      acc += 0.5 * h * (v[a] + v[a + 1]);
      start = a + 1;
    }
  }
  for (int i = start; i + 2 <= b; i += 2) acc += h / 3.0 * (v[i] + 4.0 * v[i + 1] + v[i + 2]);
  return acc;
}

double trapezoid_grid(const std::vector<double>& v, int a, int b, double h) {
  double acc = 0.0;
  for (int i = a; i < b; ++i) acc += 0.5 * h * (v[i] + v[i + 1]);
  return acc;
}

// Quadratic interpolation of a sampled column at an off-grid abscissa.
double interp_offgrid(const std::vector<double>& col, const GridAxis& p, double q) {
  const double h = p.step;
  int jq = static_cast<int>(std::llround((q - p.start) / h));
  jq = std::clamp(jq, 1, p.count - 2);
  const double y0 = col[jq - 1], y1 = col[jq], y2 = col[jq + 1];
  const double d1 = (y2 - y0) / (2.0 * h);
  const double d2 = (y2 - 2.0 * y1 + y0) / (h * h);
  const double dq = q - p.at(jq);
  return y1 + d1 * dq + 0.5 * d2 * dq * dq;
}

// Signed integral of the sampled column from p(a-index coordinate) p_from to
// an off-grid endpoint q, using a quadratic through the three nearest samples
// for the partial final interval.
double integrate_to_offgrid(const std::vector<double>& col, const GridAxis& p, int j_from,
                            double q) {
  const double h = p.step;
  int jq = static_cast<int>(std::floor((q - p.start) / h));
  jq = std::clamp(jq, 1, p.count - 2);
  const int lo = std::min(j_from, jq);
  const int hi = std::max(j_from, jq);
  double acc = integrate_grid(col, lo, hi, h);
  if (j_from > jq) acc = -acc;
  // Quadratic through (jq-1, jq, jq+1) integrated from p(jq) to q.
  const double y0 = col[jq - 1], y1 = col[jq], y2 = col[jq + 1];
  const double d1 = (y2 - y0) / (2.0 * h);
  const double d2 = (y2 - 2.0 * y1 + y0) / (h * h);
  const double dq = q - p.at(jq);
  acc += y1 * dq + 0.5 * d1 * dq * dq + d2 * dq * dq * dq / 6.0;
  return acc;
}

}  // namespace

DerivGrid dp_derivative(const Sinogram& sino, int fd_order) {
  check_fd_order(fd_order);
  const int m = fd_order / 2;
  if (sino.p.count < 5) raise(Errc::GridTooSmall, "p derivative needs at least 5 grid points");
  DerivGrid g;
  g.theta = sino.theta;
  g.p = sino.p;
  g.values.assign(sino.values.size(), kNan);
  g.valid.assign(sino.values.size(), 0);
  for (int it = 0; it < sino.theta.count; ++it) {
    for (int ip = m; ip < sino.p.count - m; ++ip) {
      bool ok = true;
      for (int d = -m; d <= m; ++d) ok = ok && sino.mask_at(it, ip + d) == CellMask::Exterior;
      if (!ok) continue;
      g.values[g.idx(it, ip)] =
          central_diff(&sino.values[sino.idx(it, ip)], 1, fd_order, sino.p.step);
      g.valid[g.idx(it, ip)] = 1;
    }
  }
  return g;
}

DerivGrid domega_derivative(const MomentTable& table, int k, int fd_order) {
  check_fd_order(fd_order);
  const int m = fd_order / 2;
  if (k < 0 || k > table.k_max) raise(Errc::InvalidArgument, "layer k out of range");
  const auto [lo, hi] = table.theta_window[k];
  if (hi - lo < 2 * m)
    raise(Errc::GridTooSmall, "theta window too narrow for the requested stencil");
  DerivGrid g;
  g.theta = table.theta;
  g.p = table.p;
  g.values.assign(static_cast<size_t>(table.theta.count) * table.p.count, kNan);
  g.valid.assign(g.values.size(), 0);
  const int stride = table.p.count;
  for (int it = lo + m; it <= hi - m; ++it) {
    for (int ip = 0; ip < table.p.count; ++ip) {
      bool ok = true;
      for (int d = -m; d <= m; ++d) ok = ok && table.valid_at(k, it + d, ip);
      if (!ok) continue;
      g.values[g.idx(it, ip)] =
          central_diff(&table.values[table.idx(k, it, ip)], stride, fd_order, table.theta.step);
      g.valid[g.idx(it, ip)] = 1;
    }
  }
  return g;
}

MomentTable recover_moments(const Sinogram& sino, const RecursionConfig& cfg,
                            const std::vector<MomentAnchor>& anchors) {
  check_fd_order(cfg.fd_order);
  if (cfg.k_max < 0) raise(Errc::InvalidArgument, "k_max must be nonnegative");
  const int m = cfg.theta_margin();
  if (sino.theta.count < 2 * cfg.k_max * m + 1)
    raise(Errc::GridTooSmall, "theta grid narrower than the recursion consumes");
  if (sino.p.count < 5) raise(Errc::GridTooSmall, "p grid needs at least 5 points");
  for (CellMask msk : sino.mask) {
    if (msk != CellMask::Exterior)
      raise(Errc::InvalidArgument, "recursion input must be exterior-complete");
  }

  auto anchors_for = [&](int k) {
    std::vector<MomentAnchor> out;
    for (const auto& a : anchors) {
      if (a.k == k) out.push_back(a);
    }
    std::sort(out.begin(), out.end(),
              [](const MomentAnchor& a, const MomentAnchor& b) { return a.q > b.q; });
    return out;
  };
  // The default anchor 0 at the far end of the p grid needs certified decay.
  const bool decay_certified =
      sino.decay.mu > 0.0 &&
      (sino.decay.beta > 1.0 ||
       (sino.decay.beta == 1.0 && sino.decay.mu > std::abs(sino.lambda)) ||
       (sino.decay.beta < 1.0 && sino.decay.beta > 0.0 && sino.lambda == 0.0));
  int first_finite = cfg.k_max + 1;
  for (int k = 1; k <= cfg.k_max; ++k) {
    if (!anchors_for(k).empty()) {
      first_finite = std::min(first_finite, k);
    } else if (!decay_certified) {
      raise(Errc::AnchorMissing,
            "layer " + std::to_string(k) + " needs an anchor: decay at p_max is not certified");
    }
  }
  if (first_finite <= cfg.k_max - 2)
    raise(Errc::AnchorMissing,
          "finite anchors at layer " + std::to_string(first_finite) +
              " certify at most one further level; lower k_max or supply decay");
  for (int k = first_finite + 1; k <= cfg.k_max; ++k) {
    if (anchors_for(k).size() < 2)
      raise(Errc::AnchorMissing,
            "layer " + std::to_string(k) +
                " follows a finite-anchored layer and needs two anchor offsets to resolve "
                "the angular bias");
  }

  MomentTable t;
  t.lambda = sino.lambda;
  t.k_max = cfg.k_max;
  t.theta = sino.theta;
  t.p = sino.p;
  t.origin = MomentTable::Origin::Recursed;
  t.resize();

  // Layer 0 is the sinogram itself.
  for (int it = 0; it < t.theta.count; ++it) {
    for (int ip = 0; ip < t.p.count; ++ip) {
      t.values[t.idx(0, it, ip)] = sino.value_at(it, ip);
      t.err_budget[t.idx(0, it, ip)] = sino.err[sino.idx(it, ip)];
      t.valid[t.idx(0, it, ip)] = 1;
    }
  }
  t.theta_window[0] = {0, t.theta.count - 1};

  const double h = t.theta.step;
  const int np = t.p.count;
  const int center = t.theta.count / 2;
  // Structural stencil windows, tracked separately from the reported validity
  // (finite-anchored layers stay usable off-center as intermediates even
  // though only their center column is certified).
  std::vector<std::pair<int, int>> swin(cfg.k_max + 1, {0, t.theta.count - 1});
  bool prev_biased = false;
  for (int K = 0; K < cfg.k_max; ++K) {
    const auto [lo, hi] = swin[K];
    const int nlo = lo + m, nhi = hi - m;
    if (nhi - nlo < 0) raise(Errc::GridTooSmall, "theta window exhausted before k_max");
    swin[K + 1] = {nlo, nhi};
    t.theta_window[K + 1] = {nlo, nhi};

    const auto ancs = anchors_for(K + 1);
    const MomentAnchor* anc = ancs.empty() ? nullptr : &ancs.front();
    const double anchor_q = anc ? anc->q : t.p.last();
    const double anchor_val = anc ? anc->value : 0.0;
    for (const auto& a : ancs) {
      if (a.q < t.p.start + t.p.step || a.q > t.p.last())
        raise(Errc::AnchorMissing, "anchor offset lies outside the p grid");
    }
    if (center < nlo || center > nhi)
      raise(Errc::GridTooSmall, "center column left the valid window");

    parallel_for(nhi - nlo + 1, [&](int off) {
      const int it = nlo + off;
      std::vector<double> gcol(np), budget(np);
      for (int ip = 0; ip < np; ++ip) {
        const double pv = t.p.at(ip);
        const double dtheta =
            central_diff(&t.values[t.idx(K, it, ip)], np, cfg.fd_order, h);
        double g = t.lambda * pv * t.value_at(K, it, ip) - dtheta;
        if (K >= 1) g -= K * pv * t.value_at(K - 1, it, ip);
        gcol[ip] = g;

        // Stencil truncation estimate by comparing against a cruder stencil.
        double fd_est;
        if (cfg.fd_order == 4) {
          const double d2 = central_diff(&t.values[t.idx(K, it, ip)], np, 2, h);
          fd_est = std::abs(dtheta - d2) * 0.2 + 1e-14 * std::abs(dtheta);
        } else if (it - 2 >= lo && it + 2 <= hi) {
          const double wide = (t.value_at(K, it + 2, ip) - t.value_at(K, it - 2, ip)) / (4.0 * h);
          fd_est = std::abs(wide - dtheta) / 3.0;
        } else {
          fd_est = 1e-4 * std::abs(dtheta) + 1e-14;
        }
        budget[ip] = fd_est + std::abs(t.lambda * pv) * t.err_budget[t.idx(K, it, ip)];
        if (K >= 1) budget[ip] += std::abs(K * pv) * t.err_budget[t.idx(K - 1, it, ip)];
      }
      for (int ip = 0; ip < np; ++ip) {
        double integral, berr;
        if (anc) {
          integral = integrate_to_offgrid(gcol, t.p, ip, anchor_q);
          berr = std::abs(integrate_to_offgrid(budget, t.p, ip, anchor_q));
        } else {
          integral = integrate_grid(gcol, ip, np - 1, t.p.step);
          berr = integrate_grid(budget, ip, np - 1, t.p.step);
          berr += std::abs(integral - trapezoid_grid(gcol, ip, np - 1, t.p.step)) * 0.1;
        }
        double anchor_tail = 0.0;
        if (!anc) {
          // Heuristic scale of the neglected |R^(K+1)(theta, p_max)|.
          anchor_tail = std::abs(sino.value_at(it, np - 1)) *
                        std::pow(1.0 + t.p.last(), K + 1);
        }
        t.values[t.idx(K + 1, it, ip)] = anchor_val - integral;
        t.err_budget[t.idx(K + 1, it, ip)] = berr + anchor_tail;
        t.valid[t.idx(K + 1, it, ip)] = 1;
      }
    });

    if (prev_biased) {
      // The angular derivative of the biased previous layer shifted this
      // level's center column by B*(q - p); resolve B with the second anchor.
      const MomentAnchor& probe = ancs.back();
      std::vector<double> col(np);
      for (int ip = 0; ip < np; ++ip) col[ip] = t.value_at(K + 1, center, ip);
      const double at_probe = interp_offgrid(col, t.p, probe.q);
      const double bias = (probe.value - at_probe) / (anchor_q - probe.q);
      for (int ip = 0; ip < np; ++ip) {
        const double corr = bias * (anchor_q - t.p.at(ip));
        t.values[t.idx(K + 1, center, ip)] += corr;
        t.err_budget[t.idx(K + 1, center, ip)] += 0.05 * std::abs(corr);
      }
    }
    if (anc || prev_biased) {
      // Certified on the center column only.
      for (int it = 0; it < t.theta.count; ++it) {
        if (it == center) continue;
        for (int ip = 0; ip < np; ++ip) t.valid[t.idx(K + 1, it, ip)] = 0;
      }
      t.theta_window[K + 1] = {center, center};
      prev_biased = true;
    }
  }
  return t;
}

RecoveryReport validate_recursion(const Field& field, const SinogramRequest& req,
                                  const RecursionConfig& cfg, const QuadratureSpec& quad,
                                  const std::vector<MomentAnchor>& anchors) {
  RecoveryReport rep;
  const Sinogram sino = sinogram(field, std::nullopt, req, quad);
  rep.recursed = recover_moments(sino, cfg, anchors);

  const int center = req.theta.count / 2;
  const double theta0 = req.theta.at(center);

  MomentTable direct;
  direct.lambda = req.lambda;
  direct.k_max = cfg.k_max;
  direct.theta = req.theta;
  direct.p = req.p;
  direct.origin = MomentTable::Origin::Direct;
  direct.resize();
  for (auto& v : direct.values) v = kNan;
  for (auto& v : direct.valid) v = 0;
  parallel_for(req.p.count, [&](int ip) {
    const Line line(theta0, req.p.at(ip));
    for (int k = 0; k <= cfg.k_max; ++k) {
      const auto r = weighted_moment(field, line, req.lambda, k, quad);
      direct.values[direct.idx(k, center, ip)] = r.value;
      direct.err_budget[direct.idx(k, center, ip)] = r.error;
      direct.valid[direct.idx(k, center, ip)] = 1;
    }
  });

  // Relative error with a floor at 0.1% of the column peak: near zero
  // crossings of the direct moment the pointwise ratio is meaningless.
  auto column_error = [&](const MomentTable& rec, int k, int it) {
    double scale = 0.0;
    for (int ip = 0; ip < rec.p.count; ++ip)
      scale = std::max(scale, std::abs(direct.value_at(k, center, ip)));
    const double floor = std::max(1e-300, 1e-3 * scale);
    double worst = 0.0;
    for (int ip = 0; ip < rec.p.count; ++ip) {
      if (!rec.valid_at(k, it, ip)) continue;
      const double err = std::abs(rec.value_at(k, it, ip) - direct.value_at(k, center, ip));
      worst = std::max(worst, err / std::max(std::abs(direct.value_at(k, center, ip)), floor));
    }
    return worst;
  };

  for (int k = 0; k <= cfg.k_max; ++k) {
    RecoveryReport::PerK pk;
    pk.k = k;
    pk.max_rel_err = column_error(rep.recursed, k, center);
    const auto [lo, hi] = rep.recursed.theta_window[k];
    pk.valid_theta_range = {req.theta.at(lo), req.theta.at(hi)};
    rep.per_k.push_back(pk);
  }

  // Step-halving convergence on the k=1 layer.
  rep.h_theta = req.theta.step;
  rep.h_theta_half = req.theta.step / 2.0;
  SinogramRequest req_half = req;
  req_half.theta.step = rep.h_theta_half;
  req_half.theta.start = theta0 - center * req_half.theta.step;
  const Sinogram sino_half = sinogram(field, std::nullopt, req_half, quad);
  const MomentTable rec_half = recover_moments(sino_half, cfg, anchors);
  if (cfg.k_max >= 1) {
    const double e_full = rep.per_k[1].max_rel_err;
    double scale = 0.0;
    for (int ip = 0; ip < req.p.count; ++ip)
      scale = std::max(scale, std::abs(direct.value_at(1, center, ip)));
    const double floor = std::max(1e-300, 1e-3 * scale);
    double e_half = 0.0;
    for (int ip = 0; ip < req.p.count; ++ip) {
      const double err =
          std::abs(rec_half.value_at(1, center, ip) - direct.value_at(1, center, ip));
      e_half = std::max(e_half, err / std::max(std::abs(direct.value_at(1, center, ip)), floor));
    }
    rep.convergence_ratio = e_half > 0.0 ? e_full / e_half : 0.0;
  }

  rep.direct = std::move(direct);
  return rep;
}

}  // namespace exradon
