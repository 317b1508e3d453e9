#include <doctest.h>

#include <cmath>
#include <random>

#include "exradon/transform.hpp"
#include "oracle_helpers.hpp"

using namespace exradon;

namespace {
const double kSqrtPi = std::sqrt(kPi);
const QuadratureSpec kQuad;

double gaussian_closed_form(double lambda, double p) {
  return kSqrtPi * std::exp(lambda * lambda / 4.0) * std::exp(-p * p);
}
}  // namespace

TEST_CASE("line_integral closed forms for the gaussian") {
  const FieldPtr g = make_gaussian();
  const auto r0 = line_integral(*g, Line(1.1, 0.0), 0.0, kQuad);
  CHECK(r0.value == doctest::Approx(kSqrtPi).epsilon(1e-8));
  CHECK(std::abs(r0.value - kSqrtPi) <= 10.0 * r0.error + 1e-12);

  // Complete the square: integral exp(-lambda u - p^2 - u^2) du.
  const auto r1 = line_integral(*g, Line(0.0, 1.0), 0.5, kQuad);
  CHECK(r1.value == doctest::Approx(gaussian_closed_form(0.5, 1.0)).epsilon(1e-9));
  CHECK(r1.value == doctest::Approx(0.6941).epsilon(2e-4));
}

TEST_CASE("line_integral of the zero field is exactly zero") {
  const auto r = line_integral(*make_zero(), Line(0.3, 2.0), 0.7, kQuad);
  CHECK(r.value == 0.0);
}

TEST_CASE("stretched field vanishes on a line avoiding the cut") {
  // beta = 0.3 decays in every direction off the cut; the analytic transform
  // along x = 4 is exactly zero by the contour argument.
  const FieldPtr f = stretched_exp_field(0.3, ComplexPart::Re);
  const QuadratureSpec slow = QuadratureSpec::slow_decay();
  const auto r = line_integral(*f, Line(0.0, 4.0), 0.0, slow);
  double line_max = 0.0;
  for (double u = -10.0; u <= 10.0; u += 0.25)
    line_max = std::max(line_max, std::abs(f->value(Line(0.0, 4.0).point_at(u))));
  CHECK(std::abs(r.value) <= 1e-6 * line_max);
  CHECK(std::abs(r.value) <= 10.0 * r.error);
}

TEST_CASE("divergent and singular lines are loud for single calls") {
  const FieldPtr f = stretched_exp_field(0.3, ComplexPart::Re);
  CHECK_THROWS_AS(line_integral(*f, Line(0.0, 2.0), 0.5, kQuad), Error);  // lambda vs beta<1
  // The x axis overlaps the branch cut on half its length.
  CHECK_THROWS_AS(line_integral(*f, Line(kPi / 2.0, 0.0), 0.0, kQuad), Error);
}

TEST_CASE("weighted moments") {
  const FieldPtr g = make_gaussian();
  SUBCASE("odd moment vanishes") {
    const auto r = weighted_moment(*g, Line(0.7, 0.4), 0.0, 1, kQuad);
    CHECK(std::abs(r.value) < 1e-9);
  }
  SUBCASE("k = 2 on the central line") {
    const auto r = weighted_moment(*g, Line(0.0, 0.0), 0.0, 2, kQuad);
    CHECK(r.value == doctest::Approx(kSqrtPi / 2.0).epsilon(1e-9));
  }
  SUBCASE("k = 0 is the plain transform, same code path") {
    const Line l(0.4, 0.9);
    CHECK(weighted_moment(*g, l, 0.25, 0, kQuad).value ==
          line_integral(*g, l, 0.25, kQuad).value);
  }
  SUBCASE("condition-e anchors vanish for any k and lambda") {
    const FieldPtr ce = make_condition_e(Direction(0.0));
    const Line anchor(0.0, std::sqrt(2.0 * kPi));
    for (int k : {0, 1, 3}) {
      for (double lam : {0.0, 0.4}) {
        const auto r = weighted_moment(*ce, anchor, lam, k, kQuad);
        CHECK(std::abs(r.value) < 1e-6);
      }
    }
  }
}

TEST_CASE("orientation involution R_lambda f(-w, -p) = R_{-lambda} f(w, p)") {
  auto rng = oracle::rng(41);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  std::uniform_real_distribution<double> off(-2.0, 2.0);
  std::uniform_real_distribution<double> lam(-1.0, 1.0);

  QuadratureSpec tight;
  tight.abs_tol = 1e-12;
  tight.rel_tol = 1e-12;
  QuadratureSpec slow = QuadratureSpec::slow_decay();
  slow.abs_tol = 1e-13;
  slow.rel_tol = 1e-11;
  slow.max_panels = 80000;

  struct Case {
    FieldPtr field;
    bool lambda_free;
    QuadratureSpec quad;
  };
  const std::vector<Case> cases{
      {make_gaussian(), true, tight},
      {make_translated(make_gaussian(), {0.8, -0.3}), true, tight},
      {stretched_exp_field(0.3, ComplexPart::Re), false, slow},
  };
  for (const auto& c : cases) {
    std::vector<std::pair<double, double>> pairs;
    double field_scale = 0.0;
    while (pairs.size() < 50) {
      const double theta = ang(rng);
      const double p = off(rng);
      const double l = c.lambda_free ? lam(rng) : 0.0;
      if (!c.lambda_free && std::abs(p) < 0.2) continue;  // keep off the cut axis
      const Line fwd(theta, p);
      const Line rev(theta + kPi, -p);
      const double a = line_integral(*c.field, rev, l, c.quad).value;
      const double b = line_integral(*c.field, fwd, -l, c.quad).value;
      field_scale = std::max({field_scale, std::abs(a), std::abs(b)});
      pairs.emplace_back(a, b);
    }
    // Relative error with a floor at 1% of the transform's magnitude scale:
    // below that both sides are numerically zero and their ratio means nothing.
    for (const auto& [a, b] : pairs) {
      const double scale = std::max({std::abs(a), std::abs(b), 0.01 * field_scale});
      CHECK(std::abs(a - b) / scale < 1e-8);
    }
  }
}

TEST_CASE("linearity of the transform") {
  auto rng = oracle::rng(43);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  std::uniform_real_distribution<double> off(-1.5, 1.5);
  const FieldPtr f = make_gaussian();
  const FieldPtr h = make_translated(make_gaussian(0.7), {0.4, 0.6});
  for (int i = 0; i < 25; ++i) {
    const double a = coef(rng), b = coef(rng);
    const FieldPtr comb = make_linear_combination(a, f, b, h);
    const Line l(ang(rng), off(rng));
    const double lam = 0.5 * coef(rng);
    const double lhs = line_integral(*comb, l, lam, kQuad).value;
    const double rhs = a * line_integral(*f, l, lam, kQuad).value +
                       b * line_integral(*h, l, lam, kQuad).value;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("shift covariance") {
  auto rng = oracle::rng(47);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  std::uniform_real_distribution<double> off(-1.5, 1.5);
  std::uniform_real_distribution<double> lam(-0.8, 0.8);
  const FieldPtr f = make_gaussian();
  for (int i = 0; i < 30; ++i) {
    const Vec2 t{off(rng), off(rng)};
    const FieldPtr ft = make_translated(f, t);
    const Direction d(ang(rng));
    const double p = off(rng);
    const double l = lam(rng);
    const double lhs = line_integral(*ft, Line(d, p), l, kQuad).value;
    const double rhs = std::exp(-l * t.dot(d.omega_perp())) *
                       line_integral(*f, Line(d, p - t.dot(d.omega())), l, kQuad).value;
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-12});
    CHECK(std::abs(lhs - rhs) / scale < 1e-8);
  }
}

TEST_CASE("affine transport zero sets correspond") {
  // R f vanishes on lines avoiding the cut cone of the stretched field; the
  // transported field must vanish on the preimage lines.
  const FieldPtr f = stretched_exp_field(0.8, ComplexPart::Re);
  const AffineMap a = AffineMap::make(Mat2{1.2, 0.3, -0.2, 0.9}, {0.4, -0.1});
  const FieldPtr fa = transport_affine(f, a);
  const QuadratureSpec slow = QuadratureSpec::slow_decay();
  auto rng = oracle::rng(53);
  std::uniform_real_distribution<double> th(-0.3, 0.3);
  std::uniform_real_distribution<double> pp(1.0, 3.0);
  int done = 0;
  while (done < 10) {
    const Line img(th(rng), pp(rng));  // near-vertical lines, inside the cone
    const Line pre = transport_line(a.inverse(), img);
    double va, vb;
    try {
      va = line_integral(*f, img, 0.0, slow).value;
      vb = line_integral(*fa, pre, 0.0, slow).value;
    } catch (const Error&) {
      continue;
    }
    CHECK(std::abs(va) < 1e-6);
    CHECK(std::abs(vb) < 1e-6);
    ++done;
  }
}

TEST_CASE("sinogram fills the grid and honors the classical symmetry") {
  const FieldPtr g = make_gaussian();
  SinogramRequest req;
  req.theta = {0.0, kPi / 4.0, 8};
  req.p = {-4.0, 0.25, 33};
  req.lambda = 0.0;
  const Sinogram s = sinogram(*g, std::nullopt, req, kQuad);
  REQUIRE(static_cast<int>(s.values.size()) == 8 * 33);
  for (double v : s.values) CHECK(std::isfinite(v));
  // Rf(w, p) = Rf(-w, -p) cellwise.
  for (int it = 0; it < 8; ++it) {
    for (int ip = 0; ip < 33; ++ip) {
      const int it2 = (it + 4) % 8;
      const int ip2 = 32 - ip;
      CHECK(s.value_at(it, ip) ==
            doctest::Approx(s.value_at(it2, ip2)).epsilon(1e-9));
    }
  }
}

TEST_CASE("sinogram of the zero field is all zero") {
  SinogramRequest req;
  req.theta = {0.0, 0.5, 4};
  req.p = {-1.0, 0.5, 5};
  const Sinogram s = sinogram(*make_zero(), std::nullopt, req, kQuad);
  for (double v : s.values) CHECK(v == 0.0);
  for (CellMask m : s.mask) CHECK(m == CellMask::Exterior);
}

TEST_CASE("sinogram masks hole crossings and divergent cells") {
  const FieldPtr g = make_gaussian();
  SinogramRequest req;
  req.theta = {0.0, kPi / 8.0, 5};
  req.p = {-2.0, 0.5, 9};
  const ConvexRegion hole = ConvexRegion::quadrant();
  const Sinogram skip = sinogram(*g, hole, req, kQuad);
  int holes = 0;
  for (int c = 0; c < static_cast<int>(skip.values.size()); ++c) {
    if (skip.mask[c] == CellMask::IntersectsHole) {
      ++holes;
      CHECK_FALSE(std::isfinite(skip.values[c]));  // skipped without the flag
    }
  }
  CHECK(holes > 0);

  req.include_hole_cells = true;
  const Sinogram with = sinogram(*g, hole, req, kQuad);
  for (int c = 0; c < static_cast<int>(with.values.size()); ++c) {
    if (with.mask[c] == CellMask::IntersectsHole) CHECK(std::isfinite(with.values[c]));
  }

  // A stretched field with lambda != 0 diverges: masked, never thrown.
  const FieldPtr f = stretched_exp_field(0.3, ComplexPart::Re);
  SinogramRequest bad;
  bad.theta = {0.1, 0.2, 2};
  bad.p = {1.0, 0.5, 2};
  bad.lambda = 0.4;
  const Sinogram masked = sinogram(*f, std::nullopt, bad, kQuad);
  for (CellMask m : masked.mask) CHECK(m == CellMask::Divergent);
}

TEST_CASE("convolution identity on a reduced grid") {
  SinogramRequest req;
  req.theta = {0.0, kPi / 5.0, 5};
  req.p = {-2.0, 0.25, 17};
  for (double lam : {0.0, 0.5}) {
    req.lambda = lam;
    const auto rep = convolution_check(make_gaussian(), 0.25, std::nullopt, req, kQuad, 1e-3, 33);
    CAPTURE(lam);
    CHECK(rep.max_rel <= 1e-3);
    CHECK(rep.max_rel_refined <= rep.max_rel * 1.1 + 1e-12);
    CHECK(rep.pass);
    CHECK(rep.cells_checked == 5 * 17);
  }
}

TEST_CASE("convolution identity is trivial on the zero field") {
  SinogramRequest req;
  req.theta = {0.0, 0.5, 3};
  req.p = {-1.0, 0.5, 5};
  const auto rep = convolution_check(make_zero(), 0.2, std::nullopt, req, kQuad, 1e-3, 17);
  CHECK(rep.max_abs == 0.0);
  CHECK(rep.pass);
}

TEST_CASE("helgason moment check at lambda = 0") {
  const GridAxis theta{0.0, kTwoPi / 16.0, 16};
  SUBCASE("centered gaussian: M_0 is pi, M_1 vanishes") {
    const auto rep = helgason_moment_check(*make_gaussian(), 1, theta, {-8.0, 8.0}, kQuad);
    for (double m0 : rep.moments[0]) CHECK(m0 == doctest::Approx(kPi).epsilon(1e-9));
    CHECK(rep.residuals[0] <= 1e-8);
    CHECK(rep.residuals[1] <= 1e-8);
    CHECK(rep.pass);
  }
  SUBCASE("translated gaussian: M_1(theta) = pi cos theta") {
    const FieldPtr f = make_translated(make_gaussian(), {1.0, 0.0});
    const auto rep = helgason_moment_check(*f, 1, theta, {-9.0, 9.0}, kQuad);
    for (int it = 0; it < theta.count; ++it)
      CHECK(rep.moments[1][it] == doctest::Approx(kPi * std::cos(theta.at(it))).epsilon(1e-7));
    CHECK(rep.residuals[1] <= 1e-6);
    CHECK(rep.pass);
  }
  SUBCASE("lambda != 0 breaks the k = 0 condition for a shifted field") {
    const FieldPtr f = make_translated(make_gaussian(), {1.0, 0.0});
    const auto rep = helgason_moment_check(*f, 0, theta, {-9.0, 9.0}, kQuad, 0.5);
    CHECK(rep.residuals[0] > 1e-5);
  }
}
