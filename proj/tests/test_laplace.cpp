#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "exradon/laplace.hpp"
#include "oracle_helpers.hpp"

using namespace exradon;

namespace {
const QuadratureSpec kQuad;

Profile1D odd_exp_profile() {
  // x * exp(-|x|): odd, so every even moment vanishes.
  Profile1D p;
  p.f = [](double x) { return x * std::exp(-std::abs(x)); };
  p.C = 0.8;
  p.mu = 0.5;
  p.beta = 1.0;
  p.kind = "custom";
  return p;
}
}  // namespace

TEST_CASE("two_sided_laplace closed forms") {
  const Profile1D e = Profile1D::exp_abs();
  const auto r = two_sided_laplace(e, 0.5, kQuad);
  CHECK(r.value == doctest::Approx(8.0 / 3.0).epsilon(1e-10));

  // L(s) * (1 - s^2) = 2 across the strip.
  for (double s = 0.1; s < 0.95; s += 0.1) {
    const auto ls = two_sided_laplace(e, s, kQuad);
    CHECK(ls.value * (1.0 - s * s) == doctest::Approx(2.0).epsilon(1e-8));
  }

  // s -> 0+ recovers the total integral; the gaussian profile has no finite
  // strip edge.
  const auto g = two_sided_laplace(Profile1D::gaussian(), 1e-6, kQuad);
  CHECK(g.value == doctest::Approx(std::sqrt(kPi)).epsilon(1e-6));
}

TEST_CASE("two_sided_laplace strip and divergence errors") {
  CHECK_THROWS_AS(two_sided_laplace(Profile1D::exp_abs(), 1.0, kQuad), Error);
  CHECK_THROWS_AS(two_sided_laplace(Profile1D::exp_abs(), -0.2, kQuad), Error);
  CHECK_THROWS_AS(two_sided_laplace(Profile1D::stieltjes(), 0.5, kQuad), Error);
}

TEST_CASE("moments of exp(-|x|)") {
  const MomentList m = moments_1d(Profile1D::exp_abs(), 4, kQuad);
  CHECK(m.values[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(std::abs(m.values[1]) < 1e-10);
  CHECK(m.values[2] == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(std::abs(m.values[3]) < 1e-9);
  CHECK(m.values[4] == doctest::Approx(48.0).epsilon(1e-10));
}

TEST_CASE("odd profiles have vanishing even moments, termwise odd sums") {
  const MomentList m = moments_1d(odd_exp_profile(), 5, kQuad);
  for (int n = 0; n <= 5; n += 2) CHECK(std::abs(m.values[n]) < 1e-10 * m.abs_scales[1]);
  // m_1 = 2 * integral x^2 e^{-x} = 4; m_3 = 2 * 4! = 48.
  CHECK(m.values[1] == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(m.values[3] == doctest::Approx(48.0).epsilon(1e-9));
  // Partial sums built on these moments flip sign with s.
  for (double s : {0.1, 0.3}) {
    double sp = 0.0, sm = 0.0;
    for (int n = 0; n <= 5; ++n) {
      const double cp = std::exp(n * std::log(s) - std::lgamma(n + 1.0));
      sp += (n % 2 == 0 ? 1.0 : -1.0) * cp * m.values[n];
      sm += cp * m.values[n];  // (-1)^n (-s)^n = s^n
    }
    CHECK(sp == doctest::Approx(-sm).epsilon(1e-9));
  }
}

TEST_CASE("stieltjes control: vanishing moments of a nonzero profile") {
  const Profile1D st = Profile1D::stieltjes();
  CHECK(st.f(1.0) == doctest::Approx(std::exp(-1.0) * std::sin(1.0)));
  CHECK(st.beta == doctest::Approx(0.25));

  // Closed-form oracle: integral t^m e^{-t} sin t dt = Im(m! / (1-i)^(m+1)),
  // and (1-i)^(4n+4) = (-4)^(n+1) is real, so every x-moment vanishes.
  for (int n = 0; n <= 8; ++n) {
    const std::complex<double> den = std::pow(std::complex<double>(1.0, -1.0), 4 * n + 4);
    CHECK(std::abs(std::imag(std::tgamma(4.0 * n + 4.0) / den)) < 1e-9 * std::abs(den));
  }

  const MomentList m = moments_1d(st, 8, kQuad);
  for (int n = 0; n <= 8; ++n) {
    CAPTURE(n);
    CHECK(std::abs(m.values[n]) <= 1e-10 * m.abs_scales[n]);
  }
}

TEST_CASE("moment_vanishing_test verdicts") {
  CHECK(moment_vanishing_test(Profile1D::zero(), 6, 1e-8, kQuad) ==
        MomentVerdict::ConsistentWithZero);
  CHECK(moment_vanishing_test(Profile1D::exp_abs(), 6, 1e-8, kQuad) == MomentVerdict::Nonzero);
  CHECK(moment_vanishing_test(Profile1D::stieltjes(), 8, 1e-8, kQuad) ==
        MomentVerdict::Indeterminate);
}

TEST_CASE("series_vs_transform examples") {
  const Profile1D e = Profile1D::exp_abs();
  SUBCASE("s = 0.5, N = 10") {
    const auto rep = series_vs_transform(e, 0.5, 10, kQuad);
    // Even moments 2*n! make S_N a plain geometric sum.
    const double s = 0.5;
    double expect = 0.0;
    for (int n = 0; n <= 10; n += 2) expect += 2.0 * std::pow(s, n);
    CHECK(rep.S_N == doctest::Approx(expect).epsilon(1e-10));
    CHECK(rep.L_quadrature == doctest::Approx(8.0 / 3.0).epsilon(1e-10));
    CHECK(std::abs(rep.L_quadrature - rep.S_N) <= rep.bound_neg_axis + rep.bound_pos_axis);
    CHECK(rep.satisfied);
  }
  SUBCASE("zero profile is trivially satisfied") {
    const auto rep = series_vs_transform(Profile1D::zero(), 0.5, 6, kQuad);
    CHECK(rep.S_N == 0.0);
    CHECK(rep.L_quadrature == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.satisfied);
  }
  SUBCASE("near the strip edge the bound is large but holds") {
    const auto rep = series_vs_transform(e, 0.9, 8, kQuad);
    CHECK(rep.bound_neg_axis > 1.0);
    CHECK(rep.satisfied);
  }
}

TEST_CASE("series converges within the combined bound as N grows") {
  const Profile1D e = Profile1D::exp_abs();
  const double s = 0.4;  // inside (0, mu/2)
  double prev_bound = 1e300;
  for (int N = 2; N <= 16; N += 2) {
    const auto rep = series_vs_transform(e, s, N, kQuad);
    const double bound = rep.bound_neg_axis + rep.bound_pos_axis;
    CHECK(rep.satisfied);
    CHECK(bound < prev_bound);
    prev_bound = bound;
  }
  CHECK(prev_bound < 1e-6);
}

TEST_CASE("both tail bounds hold on random (profile, s, N) triples") {
  auto rng = oracle::rng(61);
  std::uniform_real_distribution<double> mu_dist(0.5, 3.0);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  std::uniform_int_distribution<int> n_dist(2, 14);
  for (int i = 0; i < 20; ++i) {
    const double mu = mu_dist(rng);
    const Profile1D prof = Profile1D::exp_abs(mu);
    const double s = frac(rng) * mu;
    const auto rep = series_vs_transform(prof, s, n_dist(rng), kQuad);
    CHECK(rep.satisfied);
  }
}

TEST_CASE("profiles can be restrictions of 2-D fields") {
  const Profile1D p = Profile1D::restrict_to_line(make_gaussian(), Line(0.0, 1.0));
  // f(u) = exp(-1 - u^2): total integral exp(-1) sqrt(pi).
  const MomentList m = moments_1d(p, 0, kQuad);
  CHECK(m.values[0] == doctest::Approx(std::exp(-1.0) * std::sqrt(kPi)).epsilon(1e-10));
}
