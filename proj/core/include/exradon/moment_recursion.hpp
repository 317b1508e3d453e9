#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "exradon/transform.hpp"

namespace exradon {

/// Anchor value R^(k)(omega0, q) = value, supplied when the default
/// "vanishes at the far end of the p grid" is not certified.
struct MomentAnchor {
  int k = 0;
  double q = 0.0;
  double value = 0.0;
};

struct RecursionConfig {
  int k_max = 2;
  int fd_order = 4;  // 2 or 4, central stencils
  int theta_margin() const { return fd_order / 2; }
};

struct DerivGrid {
  GridAxis theta;
  GridAxis p;
  std::vector<double> values;
  std::vector<uint8_t> valid;

  int idx(int it, int ip) const { return it * p.count + ip; }
};

/// Central difference of the sinogram in p; boundary cells invalid.
DerivGrid dp_derivative(const Sinogram& sino, int fd_order = 2);

/// Central difference of layer k in theta at fixed p, consuming
/// fd_order/2 cells per side of the layer's valid window.
DerivGrid domega_derivative(const MomentTable& table, int k, int fd_order = 2);

/// Recovers the weighted moment layers from exterior transform data alone.
///
/// With omega = (cos t, sin t) and x(u) = p*omega + u*omega_perp one has
/// d/dt x(u) = p*omega_perp - u*omega, so differentiating under the integral
/// and integrating the p*d_u term by parts gives, per layer K,
///   d/dt R^(K) = lambda*p*R^(K) - K*p*R^(K-1) - T_K,
///   T_K(t, p)  = integral exp(-lambda u) u^(K+1) (d_omega f) du,
/// and T_K is the p-derivative of R^(K+1), hence
///   R^(K+1)(t, p) = anchor_(K+1) - integral_p^q T_K(t, .)
/// with the anchor taken at q (the far grid end by default, or a supplied
/// finite anchor offset). Each level shrinks the valid theta window by the
/// stencil margin.
///
/// Finite anchors refer to the grid's center direction omega0 only, so the
/// off-center columns of a finite-anchored layer carry an unknown
/// theta-dependent constant a(theta). Differentiating such a layer once more
/// pollutes the next center column by the constant a'(omega0), a bias exactly
/// linear in (q - p); a second anchor offset at that next level resolves it
/// (the condition-e example supplies a whole family of vanishing offsets).
/// Consequently finite-anchored layers are certified on the center column
/// only, and levels needing a second angular derivative of a biased layer are
/// rejected as Errc::AnchorMissing.
MomentTable recover_moments(const Sinogram& sino, const RecursionConfig& cfg,
                            const std::vector<MomentAnchor>& anchors = {});

struct RecoveryReport {
  struct PerK {
    int k = 0;
    double max_rel_err = 0.0;
    std::pair<double, double> valid_theta_range{0.0, 0.0};
  };
  std::vector<PerK> per_k;
  double h_theta = 0.0;
  double h_theta_half = 0.0;
  /// k=1 error at step h divided by the error at h/2.
  double convergence_ratio = 0.0;
  MomentTable recursed;
  MomentTable direct;
};

/// Runs the recursion against direct quadrature of the same moments on the
/// center (omega0) column, including a step-halving convergence check.
RecoveryReport validate_recursion(const Field& field, const SinogramRequest& req,
                                  const RecursionConfig& cfg, const QuadratureSpec& quad,
                                  const std::vector<MomentAnchor>& anchors = {});

}  // namespace exradon
