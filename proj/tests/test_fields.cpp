#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "exradon/fields.hpp"
#include "oracle_helpers.hpp"

using namespace exradon;

namespace {

// Test-only field: constant 1 (no decay anywhere).
class ConstField final : public Field {
 public:
  double value(Vec2) const override { return 1.0; }
  Vec2 gradient(Vec2) const override { return {}; }
  DecayMeta decay() const override { return {0.0, 1.0}; }
  RayEnvelope ray_envelope(Vec2, Vec2) const override { return RayEnvelope::none(); }
  std::string id() const override { return "const1"; }
};

// Test-only field: compactly supported hat around a center.
class HatField final : public Field {
 public:
  HatField(Vec2 center, double radius) : c_(center), r_(radius) {}
  double value(Vec2 x) const override {
    const double d = (x - c_).norm();
    return d >= r_ ? 0.0 : 1.0 - d / r_;
  }
  Smoothness smoothness() const override { return Smoothness::Continuous; }
  DecayMeta decay() const override { return {1.0, 1.0}; }
  RayEnvelope ray_envelope(Vec2 o, Vec2) const override {
    RayEnvelope e;
    e.C = 1.0;
    e.mu = 50.0;
    e.beta = 1.0;
    e.u0 = (o - c_).norm() + r_;
    return e;
  }
  std::string id() const override { return "hat"; }

 private:
  Vec2 c_;
  double r_;
};

}  // namespace

TEST_CASE("eval examples") {
  CHECK(eval(*make_gaussian(), {0.0, 0.0}) == doctest::Approx(1.0));
  // exp(-z^0.3) at z = 1: 1^0.3 = 1.
  const FieldPtr f = stretched_exp_field(0.3, ComplexPart::Re);
  CHECK(eval(*f, {1.0, 0.0}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  // Condition-e field vanishes on <w0, x> = sqrt(pi).
  const FieldPtr ce = make_condition_e(Direction(0.0));
  CHECK(eval(*ce, {std::sqrt(kPi), 0.0}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(eval(*ce, {std::sqrt(kPi), 0.7})) < 1e-12);
}

TEST_CASE("stretched field branch cut and cone") {
  const FieldPtr f = stretched_exp_field(0.3, ComplexPart::Re);
  CHECK_THROWS_AS(eval(*f, {-1.0, 0.0}), Error);
  CHECK_NOTHROW(eval(*f, {-1.0, 0.5}));
  // beta = 0.3: the decay cone pi/0.6 exceeds pi, so it covers C minus the cut.
  CHECK(stretched_valid_cone_half_angle(0.3) == doctest::Approx(kPi));
  CHECK(stretched_valid_cone_half_angle(0.8) == doctest::Approx(kPi / 1.6));
  // Principal branch at z = i, beta = 0.5: |f| = exp(-Re z^0.5) = exp(-sqrt(2)/2).
  const FieldPtr re = stretched_exp_field(0.5, ComplexPart::Re);
  const FieldPtr im = stretched_exp_field(0.5, ComplexPart::Im);
  const double mod = std::hypot(eval(*re, {0.0, 1.0}), eval(*im, {0.0, 1.0}));
  CHECK(mod == doctest::Approx(std::exp(-std::sqrt(2.0) / 2.0)).epsilon(1e-12));
}

TEST_CASE("grad examples") {
  const FieldPtr g = make_gaussian();
  CHECK(grad(*g, {1.0, 0.0}, {1.0, 0.0}) ==
        doctest::Approx(-2.0 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(grad(*g, {0.0, 0.0}, {0.6, 0.8}) == doctest::Approx(0.0).epsilon(1e-13));
  const FieldPtr f = stretched_exp_field(0.3, ComplexPart::Re);
  // d/dz exp(-z^0.3) at z = 1 is -0.3 e^{-1}.
  CHECK(grad(*f, {1.0, 0.0}, {1.0, 0.0}) ==
        doctest::Approx(-0.3 * std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("closed-form gradients agree with central differences") {
  auto rng = oracle::rng(17);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  const std::vector<FieldPtr> fields{
      make_gaussian(1.0), make_gaussian(1.7), stretched_exp_field(0.3, ComplexPart::Re),
      stretched_exp_field(0.8, ComplexPart::Im), make_condition_e(Direction(0.4)),
      make_translated(make_gaussian(), {0.5, -0.25})};
  for (const auto& f : fields) {
    int done = 0;
    while (done < 100) {
      Vec2 x{coord(rng), coord(rng)};
      if (x.x < 0.3) x.x += 2.5;  // stay clear of the stretched branch cut
      const double phi = ang(rng);
      const Vec2 dir{std::cos(phi), std::sin(phi)};
      const double h = 1e-5 * std::max(1.0, x.norm());
      const double fd =
          (f->value(x + dir * h) - f->value(x - dir * h)) / (2.0 * h);
      const double an = grad(*f, x, dir);
      const double scale = std::max({std::abs(an), std::abs(fd), 1e-8});
      CHECK(std::abs(an - fd) / scale < 1e-6);
      ++done;
    }
  }
}

TEST_CASE("stretched decay envelope in the valid cone") {
  auto rng = oracle::rng(23);
  std::uniform_real_distribution<double> rad(10.0, 100.0);
  for (double beta : {0.3, 0.8}) {
    const FieldPtr re = stretched_exp_field(beta, ComplexPart::Re);
    const FieldPtr im = stretched_exp_field(beta, ComplexPart::Im);
    const double cone = stretched_valid_cone_half_angle(beta);
    std::uniform_real_distribution<double> ang(-0.95 * cone, 0.95 * cone);
    for (int i = 0; i < 100; ++i) {
      const double r = rad(rng);
      const double phi = ang(rng);
      const Vec2 z{r * std::cos(phi), r * std::sin(phi)};
      const double mod = std::hypot(eval(*re, z), eval(*im, z));
      const double bound = std::exp(-std::cos(beta * phi) * std::pow(r, beta));
      CHECK(mod <= bound * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("ray envelopes bound the fields they describe") {
  auto rng = oracle::rng(29);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  const std::vector<FieldPtr> fields{
      make_gaussian(0.8), make_condition_e(Direction(0.2)),
      stretched_exp_field(0.3, ComplexPart::Re),
      make_translated(make_gaussian(), {1.0, 0.5}),
      mollify(make_gaussian(), 0.25, 12, 24)};
  for (const auto& f : fields) {
    int done = 0;
    while (done < 40) {
      const Vec2 o{coord(rng), coord(rng)};
      const double phi = ang(rng);
      const Vec2 d{std::cos(phi), std::sin(phi)};
      const RayEnvelope env = f->ray_envelope(o, d);
      if (!env.finite) continue;
      for (double du : {0.0, 0.5, 2.0, 7.0, 31.0}) {
        const double u = env.u0 + du;
        double v;
        try {
          v = std::abs(f->value(o + d * u));
        } catch (const Error&) {
          continue;  // branch cut sample
        }
        if (v == 0.0) continue;  // underflowed past the envelope's reach
        CHECK(std::log(v) <= env.log_value(u) + 1e-9);
      }
      ++done;
    }
  }
}

TEST_CASE("transport_affine examples and composition") {
  const FieldPtr g = make_gaussian();
  SUBCASE("identity is pointwise identical") {
    const FieldPtr t = transport_affine(g, AffineMap::identity());
    for (double x : {-1.0, 0.3, 2.0})
      CHECK(eval(*t, {x, 0.5}) == doctest::Approx(eval(*g, {x, 0.5})).epsilon(1e-15));
  }
  SUBCASE("rotation leaves a radial field unchanged") {
    const FieldPtr t = transport_affine(g, AffineMap::rotation(kPi / 2.0));
    for (double x : {-1.0, 0.3, 2.0})
      CHECK(eval(*t, {x, 0.7}) == doctest::Approx(eval(*g, {x, 0.7})).epsilon(1e-12));
  }
  SUBCASE("diag(2,1) at (1,0) gives exp(-4)") {
    const FieldPtr t = transport_affine(g, AffineMap::make(Mat2::diag(2.0, 1.0)));
    CHECK(eval(*t, {1.0, 0.0}) == doctest::Approx(std::exp(-4.0)).epsilon(1e-13));
  }
  SUBCASE("transport composes: f_AB(x) = f_A(Bx)") {
    auto rng = oracle::rng(31);
    std::uniform_real_distribution<double> e(-1.5, 1.5);
    for (int i = 0; i < 50; ++i) {
      Mat2 ma{e(rng), e(rng), e(rng), e(rng)}, mb{e(rng), e(rng), e(rng), e(rng)};
      if (std::abs(ma.det()) < 0.05 || std::abs(mb.det()) < 0.05) continue;
      const AffineMap a = AffineMap::make(ma, {e(rng), e(rng)});
      const AffineMap b = AffineMap::make(mb, {e(rng), e(rng)});
      const FieldPtr fa = transport_affine(g, a);
      const FieldPtr fab = transport_affine(g, a.compose(b));
      const Vec2 x{e(rng), e(rng)};
      CHECK(eval(*fab, x) == doctest::Approx(eval(*fa, b.apply(x))).epsilon(1e-12));
    }
  }
}

TEST_CASE("mollify preserves constants and stays inside the Gaussian bracket") {
  const FieldPtr c1 = mollify(std::make_shared<ConstField>(), 0.3);
  for (double x : {-2.0, 0.0, 5.5}) CHECK(eval(*c1, {x, x / 2}) == doctest::Approx(1.0).epsilon(1e-12));

  const double r = 0.25;
  const FieldPtr mg = mollify(make_gaussian(), r);
  const double v = eval(*mg, {0.0, 0.0});
  CHECK(v < 1.0);
  CHECK(v > std::exp(-r * r));

  // Independent polar-quadrature oracle for the same convolution value.
  const double i0 = oracle::integrate(
      [](double rho) { return rho * std::exp(-1.0 / (1.0 - rho * rho)); }, 0.0, 1.0, 1e-12);
  const double expected = oracle::integrate(
                              [&](double rho) {
                                return rho * std::exp(-1.0 / (1.0 - rho * rho)) *
                                       std::exp(-r * r * rho * rho);
                              },
                              0.0, 1.0, 1e-12) /
                          i0;
  CHECK(v == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("mollified compactly supported field vanishes away from the support hull") {
  const FieldPtr hat = std::make_shared<HatField>(Vec2{3.0, 0.0}, 0.5);
  const FieldPtr smooth = mollify(hat, 0.2);
  // Support of the convolution lives within distance 0.5 + 0.2 of the center.
  CHECK(eval(*smooth, {3.0, 0.0}) > 0.0);
  for (const Vec2 x : {Vec2{3.0, 0.75}, Vec2{2.2, 0.0}, Vec2{0.0, 0.0}, Vec2{3.0, -0.71}})
    CHECK(eval(*smooth, x) == 0.0);
}

TEST_CASE("directional derivative of continuous-only fields is an error") {
  const FieldPtr hat = std::make_shared<HatField>(Vec2{0.0, 0.0}, 1.0);
  CHECK_THROWS_AS(grad(*hat, {0.2, 0.1}, {1.0, 0.0}), Error);
  CHECK_THROWS_AS(directional_derivative_field(hat, {1.0, 0.0}), Error);
}

TEST_CASE("condition_e anchors") {
  const FieldPtr ce = make_condition_e(Direction(0.0));
  CHECK(ce->anchor_offset(0).value() == doctest::Approx(0.0));
  CHECK(ce->anchor_offset(2).value() == doctest::Approx(std::sqrt(2.0 * kPi)));
  CHECK_FALSE(make_gaussian()->anchor_offset(1).has_value());
}

TEST_CASE("probe: gaussian passes all conditions") {
  const ExteriorScanSet scan(Direction(0.0), 0.3, 0.5);
  const auto rep = class_condition_probe(*make_gaussian(), scan, 4, {1.0, 2.0});
  CHECK(rep.b.pass);
  CHECK(rep.c.pass);
  CHECK(rep.d.pass);
  CHECK(rep.e.pass);
  for (double v : rep.anchor_values) CHECK(std::abs(v) < 1e-10);
}

TEST_CASE("probe: condition_e field passes (d) and its declared anchors") {
  const ExteriorScanSet scan(Direction(0.0), kPi / 8.0, 0.5);
  const auto rep = class_condition_probe(*make_condition_e(Direction(0.0)), scan, 3, {0.8, 1.2});
  CHECK(rep.b.pass);
  CHECK(rep.d.pass);
  CHECK(rep.e.pass);
  REQUIRE(rep.anchor_values.size() == 4);
  for (double v : rep.anchor_values) CHECK(std::abs(v) < 1e-7);
}

TEST_CASE("probe: stretched decay fails the exponential-weight condition") {
  const ExteriorScanSet scan(Direction(0.0), 0.2, 0.5);
  ProbeOptions opt;
  opt.mu_d = 0.1;
  const auto rep =
      class_condition_probe(*stretched_exp_field(0.3, ComplexPart::Re), scan, 2, {1.0}, opt);
  CHECK(rep.b.pass);   // polynomial weights stay integrable
  CHECK_FALSE(rep.d.pass);  // exponential weight diverges
  CHECK(rep.d.growth_ratio > 1.0);
}
