#pragma once

#include <optional>
#include <string>
#include <vector>

#include "exradon/fields.hpp"
#include "exradon/geometry.hpp"
#include "exradon/quadrature.hpp"

namespace exradon {

struct GridAxis {
  double start = 0.0;
  double step = 1.0;
  int count = 0;

  double at(int i) const { return start + i * step; }
  double last() const { return at(count - 1); }
};

enum class CellMask { Exterior, IntersectsHole, Divergent };
std::string to_string(CellMask m);

/// Exponential Radon transform values R_lambda f on a (theta, p) grid,
/// theta-major, with per-cell masks and error estimates.
struct Sinogram {
  double lambda = 0.0;
  GridAxis theta;
  GridAxis p;
  std::vector<double> values;
  std::vector<double> err;
  std::vector<CellMask> mask;
  std::string field_id;
  QuadratureSpec quad;
  DecayMeta decay;

  int idx(int it, int ip) const { return it * p.count + ip; }
  double value_at(int it, int ip) const { return values[idx(it, ip)]; }
  CellMask mask_at(int it, int ip) const { return mask[idx(it, ip)]; }
};

/// Weighted moments R^(k)_lambda f on the same grid layout, one layer per k.
/// Layers of a recursed table are valid only on a shrinking theta window.
struct MomentTable {
  enum class Origin { Direct, Recursed };

  double lambda = 0.0;
  int k_max = 0;
  GridAxis theta;
  GridAxis p;
  Origin origin = Origin::Direct;
  std::vector<double> values;
  std::vector<double> err_budget;
  std::vector<uint8_t> valid;
  std::vector<std::pair<int, int>> theta_window;  // inclusive valid index range per k

  int idx(int k, int it, int ip) const { return (k * theta.count + it) * p.count + ip; }
  double value_at(int k, int it, int ip) const { return values[idx(k, it, ip)]; }
  bool valid_at(int k, int it, int ip) const { return valid[idx(k, it, ip)] != 0; }
  void resize() {
    const size_t n = static_cast<size_t>(k_max + 1) * theta.count * p.count;
    values.assign(n, 0.0);
    err_budget.assign(n, 0.0);
    valid.assign(n, 0);
    theta_window.assign(k_max + 1, {0, theta.count - 1});
  }
};

/// R_lambda f(omega, p) = integral exp(-lambda*u) f(p*omega + u*omega_perp) du
/// with certified truncation; the reported error adds the envelope tail
/// bounds to the quadrature estimate.
/// Throws Errc::DivergentTransform when the declared decay cannot dominate
/// the weight, Errc::SingularLine when the line overlaps a singular set.
IntegralResult line_integral(const Field& field, const Line& line, double lambda,
                             const QuadratureSpec& quad);

/// Same with an extra u^k factor; k = 0 is exactly line_integral.
IntegralResult weighted_moment(const Field& field, const Line& line, double lambda, int k,
                               const QuadratureSpec& quad);

struct SinogramRequest {
  GridAxis theta;
  GridAxis p;
  double lambda = 0.0;
  /// Compute hole-crossing cells too (bounded-window probe when divergent).
  bool include_hole_cells = false;
};

/// Fills the grid; divergent or singular cells are masked, never fatal.
Sinogram sinogram(const Field& field, const std::optional<ConvexRegion>& region,
                  const SinogramRequest& req, const QuadratureSpec& quad);

struct ConvolutionReport {
  double max_abs = 0.0;
  double max_rel = 0.0;
  int cells_checked = 0;
  double tolerance = 0.0;
  bool pass = false;
  /// max_rel recomputed with the p-convolution step halved.
  double max_rel_refined = 0.0;
};

/// Verifies R_lambda(f * g) = (R_lambda g) * (R_lambda f) (1-D convolution in
/// p) on exterior cells, with a step-halving stability check.
ConvolutionReport convolution_check(const FieldPtr& field, double radius,
                                    const std::optional<ConvexRegion>& region,
                                    const SinogramRequest& req, const QuadratureSpec& quad,
                                    double tolerance = 1e-3, int conv_points = 65);

struct HelgasonReport {
  int k_max = 0;
  double lambda = 0.0;
  std::vector<double> residuals;               // per k: fit residual / signal norm
  std::vector<std::vector<double>> moments;    // per k: M_k over the theta grid
  double tolerance = 0.0;
  bool pass = false;
};

/// Moment consistency: M_k(theta) = integral Rf(theta, p) p^k dp fitted by a
/// trigonometric polynomial of degree k. The classical condition holds at
/// lambda = 0; at lambda != 0 the residual is reported as-is (there is no
/// moment condition to satisfy).
HelgasonReport helgason_moment_check(const Field& field, int k_max, const GridAxis& theta,
                                     std::pair<double, double> p_window,
                                     const QuadratureSpec& quad, double lambda = 0.0,
                                     double tolerance = 1e-6);

}  // namespace exradon
