#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "exradon/geometry.hpp"
#include "exradon/quadrature.hpp"

namespace exradon {

enum class Smoothness { Continuous, C1, Smooth };
enum class ComplexPart { Re, Im };

/// Declared decay metadata: |f(x)| <= C*exp(-mu*|x|^beta) away from the
/// origin, in the directions where the field decays at all. Descriptive;
/// the per-ray envelopes below are what quadrature certifies against.
struct DecayMeta {
  double mu = 0.0;
  double beta = 1.0;
};

/// One-sided decay envelope along a ray origin + u*dir, u >= 0:
///   |g(u)| <= C * exp(-mu * max(0, u - u0)^beta)   for u >= u0,
/// with the flat bound C before u0. Only used for truncation radii and tail
/// bounds, both of which stay beyond u0.
struct RayEnvelope {
  bool finite = true;
  double C = 1.0;
  double mu = 1.0;
  double beta = 1.0;
  double u0 = 0.0;

  static RayEnvelope none() { return {false, 0, 0, 1, 0}; }
  static RayEnvelope zero() { return {true, 0.0, 1.0, 1.0, 0.0}; }

  double log_value(double u) const;
  /// Does envelope(u)*exp(lam*u) tend to 0?
  bool decays(double lam) const;
  /// Smallest radius R (>= u0+1) with envelope(R)*exp(lam*R) <= threshold,
  /// capped at `cap`.
  double solve_radius(double threshold, double lam, double cap) const;
  /// Upper bound for integral_R^inf envelope(u)*exp(lam*u) du.
  double tail(double R, double lam) const;
  /// Envelope for P(u)*g(u) with P(u) <= coeff*(1+u)^deg: shaves mu and
  /// absorbs the polynomial sup into C.
  RayEnvelope loosened_by_poly(int deg, double coeff) const;
};

/// Evaluable scalar density field with gradient and certified decay data.
class Field {
 public:
  virtual ~Field() = default;

  /// f(point). Throws Errc::SingularPoint on the field's singular set.
  virtual double value(Vec2 point) const = 0;
  /// Closed-form gradient where the catalog provides one; the default is a
  /// central difference with step 1e-5*max(1, |x|).
  virtual Vec2 gradient(Vec2 point) const;
  virtual Smoothness smoothness() const { return Smoothness::Smooth; }
  virtual DecayMeta decay() const = 0;
  virtual RayEnvelope ray_envelope(Vec2 origin, Vec2 unit_dir) const = 0;
  /// u-coordinates in [-radius, radius] where the restriction to `line` is
  /// not smooth (branch-cut crossings and the like).
  virtual std::vector<double> breakpoints(const Line& line, double radius) const {
    (void)line;
    (void)radius;
    return {};
  }
  /// True when the line overlaps the singular set on positive length.
  virtual bool singular_on_line(const Line& line) const {
    (void)line;
    return false;
  }
  /// Offsets q_k with known transform anchors (condition-e data), if any.
  virtual std::optional<double> anchor_offset(int k) const {
    (void)k;
    return std::nullopt;
  }
  virtual std::string id() const = 0;
};

using FieldPtr = std::shared_ptr<const Field>;

double eval(const Field& f, Vec2 point);
/// Directional derivative <grad f, dir>. Throws Errc::NotDifferentiable for
/// continuous-only fields.
double grad(const Field& f, Vec2 point, Vec2 unit_dir);

FieldPtr make_zero();
/// exp(-|x|^2 / sigma^2).
FieldPtr make_gaussian(double sigma = 1.0);
/// Re or Im of exp(-z^beta), principal branch with cut on the negative real
/// axis; decays where cos(beta*arg z) > 0, i.e. |arg z| < pi/(2*beta).
FieldPtr stretched_exp_field(double beta, ComplexPart part);
/// exp(<w0,x>^2) * exp(-<w0_perp,x>^2) * sin(<w0,x>^2); vanishes identically
/// on every line <w0,x> = sqrt(k*pi).
FieldPtr make_condition_e(Direction omega0);
/// f(A x).
FieldPtr transport_affine(FieldPtr base, const AffineMap& map);
FieldPtr make_translated(FieldPtr base, Vec2 shift);
/// Convolution with the unit-mass bump of the given radius, evaluated per
/// point by tensor quadrature over the bump disk.
FieldPtr mollify(FieldPtr base, double radius, int radial_order = 24, int angular_order = 48);
/// a*f + b*g (envelopes combined conservatively).
FieldPtr make_linear_combination(double a, FieldPtr f, double b, FieldPtr g);
/// x -> <grad f(x), dir>, with a polynomially loosened envelope.
FieldPtr directional_derivative_field(FieldPtr base, Vec2 unit_dir);

/// Valid decay cone half-angle pi/(2*beta) of the stretched-exponential
/// field, clamped to pi.
double stretched_valid_cone_half_angle(double beta);

struct ConditionReport {
  bool pass = false;
  double worst = 0.0;
  double growth_ratio = 0.0;
  std::string note;
};

/// Numerical verdicts for the scan-class conditions on a field over
/// L(Omega, p0): (b) polynomial-weighted line integrability, (c) the same for
/// the omega-directional derivative, (d) exponentially weighted
/// integrability along omega0 lines, (e) transform anchors at declared
/// offsets.
struct ScanProbeReport {
  ConditionReport b, c, d, e;
  double mu_used = 0.0;
  std::string quantifier_note;
  std::vector<double> anchor_values;
  bool all_pass() const { return b.pass && c.pass && d.pass && e.pass; }
};

struct ProbeOptions {
  double mu_d = 0.1;     // weight rate for condition (d)
  int n_omega = 5;       // window samples
  double lambda = 0.0;   // weight for the condition-(e) anchors
  QuadratureSpec quad;
};

ScanProbeReport class_condition_probe(const Field& field, const ExteriorScanSet& scan,
                                      int k_max, const std::vector<double>& p_samples,
                                      const ProbeOptions& opt = {});

}  // namespace exradon
