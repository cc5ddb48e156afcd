#include <doctest.h>

#include <random>

#include "npfaber/faber_grunsky.hpp"
#include "oracles.hpp"

using namespace npfaber;
using oracle::C;

namespace {

C eval_poly(const std::vector<C>& p, C z) {
  C acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * z + *it;
  return acc;
}

}  // namespace

TEST_SUITE("faber_grunsky") {
  TEST_CASE("first Faber polynomials") {
    const LaurentMapd m(1.3, C(0.2, -0.4), {C(0.3, 0.1), C(-0.05, 0.2)});
    const auto b = faber_polynomials(m, 3);
    const C a0 = m.a0(), a1 = m.coeff(1);
    REQUIRE(b.rows[1].size() == 2);
    CHECK(std::abs(b.rows[1][0] + a0) < 1e-15);
    CHECK(b.rows[1][1] == C(1));
    CHECK(std::abs(b.rows[2][0] - (a0 * a0 - 2.0 * a1)) < 1e-15);
    CHECK(std::abs(b.rows[2][1] + 2.0 * a0) < 1e-15);
    CHECK(b.rows[2][2] == C(1));
    for (int k = 0; k <= 3; ++k) CHECK(b.rows[k].back() == C(1));
  }

  TEST_CASE("identity map gives monomials") {
    const auto b = faber_polynomials(LaurentMapd::identity(), 6);
    for (int m = 0; m <= 6; ++m) {
      for (int j = 0; j < m; ++j) CHECK(b.rows[m][j] == C(0));
    }
  }

  TEST_CASE("ellipse F_3(2) matches the closed form") {
    const auto b = faber_polynomials(oracle::ellipse_map(0.25), 3);
    CHECK(std::abs(b.evaluate(3, C(2)) - oracle::ellipse_faber(0.25, 3, C(2))) < 1e-14);
  }

  TEST_CASE("Faber values agree with preimage power sums") {
    const auto boat = oracle::boat_map();
    const auto b = faber_polynomials(boat, 12);
    const auto scaled = boat.normalized_coeffs();
    for (C z : {C(0.2, 0.1), C(-0.5, 0.4), C(1.1, -0.3)}) {
      std::vector<C> v(13), d(13);
      normalized_faber_values<double>(boat, scaled, 12, z, v, d);
      for (int m = 0; m <= 12; ++m) {
        const C ref = oracle::faber_by_roots(boat, m, z);
        CHECK(std::abs(b.evaluate(m, z) - ref) < 1e-11 * (1 + std::abs(ref)));
        CHECK(std::abs(v[m] - ref) < 1e-11 * (1 + std::abs(ref)));
      }
      const double e = 1e-6;
      for (int m = 1; m <= 12; ++m) {
        const C fd = (b.evaluate(m, z + e) - b.evaluate(m, z - e)) / (2 * e);
        CHECK(std::abs(d[m] - fd) < 1e-6 * (1 + std::abs(fd)));
      }
    }
  }

  TEST_CASE("normalized values scale with gamma") {
    const LaurentMapd m(2.5, C(0.3, 0.2), {C(1.0, 0.5), C(0.2, -0.4)});
    const auto b = faber_polynomials(m, 8);
    const auto scaled = m.normalized_coeffs();
    const C z(0.7, -0.9);
    std::vector<C> v(9);
    normalized_faber_values<double>(m, scaled, 8, z, v);
    for (int k = 0; k <= 8; ++k) {
      const C ref = b.evaluate(k, z) / std::pow(2.5, k);
      CHECK(std::abs(v[k] - ref) < 1e-12 * (1 + std::abs(ref)));
    }
  }

  TEST_CASE("ellipse Grunsky coefficients are diagonal powers") {
    const double a = 0.4;
    const auto t = grunsky_table(oracle::ellipse_map(a), 10);
    for (int m = 1; m <= 10; ++m) {
      for (int k = 1; k <= 10; ++k) {
        const C expected = m == k ? C(std::pow(a, m)) : C(0);
        CHECK(std::abs(t.c(m, k) - expected) < 1e-15);
      }
    }
  }

  TEST_CASE("identity map has a zero table and a zero report") {
    const auto t = grunsky_table(LaurentMapd::identity(), 12);
    CHECK(t.normalized_matrix().cwiseAbs().maxCoeff() == 0.0);
    const auto r = grunsky_report(t);
    CHECK(r.identity_residual == 0.0);
    CHECK(r.mu_symmetry_residual == 0.0);
    CHECK(r.max_row_norm_squared == 0.0);
    CHECK(r.row_bound_holds);
  }

  TEST_CASE("boat table satisfies the Grunsky identity") {
    const auto t = grunsky_table(oracle::boat_map(), 20);
    const auto r = grunsky_report(t);
    CHECK(r.identity_residual < 1e-12);
    CHECK(r.mu_symmetry_residual < 1e-12);
    CHECK(r.row_bound_holds);
    for (int m = 1; m <= 20; ++m) {
      for (int k = 1; k <= 20; ++k) {
        CHECK(std::abs(double(k) * t.c(m, k) - double(m) * t.c(k, m)) <= 1e-12 * (1 + std::abs(t.c(m, k)) * k));
      }
    }
  }

  TEST_CASE("recursion matches Fourier analysis of F_m(Psi(w))") {
    for (const auto& map : {oracle::boat_map(), oracle::table1_map()}) {
      const auto t = grunsky_table(map, 12);
      for (int m = 1; m <= 6; ++m) {
        for (int k = 1; k <= 6; ++k) {
          CHECK(std::abs(t.normalized(m, k) - oracle::grunsky_by_dft(map, m, k)) < 1e-10);
        }
      }
    }
  }

  TEST_CASE("c_{n,1} = n a_n") {
    const auto t1 = oracle::table1_map();
    const auto t = grunsky_table(t1, 8);
    for (int n = 1; n <= 8; ++n) CHECK(std::abs(t.c(n, 1) - double(n) * t1.coeff(n)) < 1e-12);
  }

  TEST_CASE("table order is capped") {
    CHECK_THROWS_AS(grunsky_table(oracle::boat_map(), kDefaultMaxOrder + 1), ContractError);
    CHECK_THROWS_AS(grunsky_table(oracle::boat_map(), 0), ContractError);
  }

  TEST_CASE("poly_to_faber examples") {
    const auto ell = oracle::ellipse_map(0.3);
    const auto b = faber_polynomials(ell, 4);
    const std::vector<C> one{C(1)};
    auto e1 = poly_to_faber<double>(b, one);
    CHECK(e1.order() == 0);
    CHECK(e1.alpha[0] == C(1));

    auto e2 = poly_to_faber<double>(b, b.rows[2]);
    CHECK(std::abs(e2.alpha[2] - 1.0) < 1e-15);
    CHECK(std::abs(e2.alpha[1]) < 1e-15);
    CHECK(std::abs(e2.alpha[0]) < 1e-15);

    const std::vector<C> z2{C(0), C(0), C(1)};
    auto e3 = poly_to_faber<double>(b, z2);
    CHECK(std::abs(e3.alpha[0] - 0.6) < 1e-15);
    CHECK(std::abs(e3.alpha[1]) < 1e-15);
    CHECK(std::abs(e3.alpha[2] - 1.0) < 1e-15);

    const std::vector<C> too_long(6, C(1));
    CHECK_THROWS_AS(poly_to_faber<double>(b, too_long), ContractError);
  }

  TEST_CASE("Faber expansion re-expands to the polynomial") {
    const auto t1 = oracle::table1_map();
    const auto b = faber_polynomials(t1, 5);
    const std::vector<C> p{C(1, 2), C(-0.5, 0), C(0, 1), C(0.25, 0.25), C(0), C(2)};
    const auto e = poly_to_faber<double>(b, p);
    for (C z : {C(0.3, 0.1), C(-2, 1)}) {
      C s = 0;
      for (int m = 0; m <= e.order(); ++m) s += e.alpha[m] * b.evaluate(m, z);
      CHECK(std::abs(s - eval_poly(p, z)) < 1e-9 * (1 + std::abs(s)));
    }
  }

  TEST_CASE("Neumann trace of Re z on the unit circle") {
    const auto id = LaurentMapd::identity();
    const auto t = grunsky_table(id, 4);
    const auto b = faber_polynomials(id, 1);
    const std::vector<C> z{C(0), C(1)};
    const auto tr = neumann_trace_coeffs(t, poly_to_faber<double>(b, z));
    const auto re = real_part(tr.coeffs);
    CHECK(std::abs(re[1] - 0.5) < 1e-15);
    CHECK(std::abs(re[-1] - 0.5) < 1e-15);
    for (int k = 2; k <= 4; ++k) CHECK(std::abs(re[k]) + std::abs(re[-k]) == 0.0);
    REQUIRE(tr.coeffs.zero_mode());
    CHECK(*tr.coeffs.zero_mode() == C(0));
    CHECK_FALSE(tr.truncation_warning);
  }

  TEST_CASE("Neumann trace of F_2 on an ellipse matches boundary quadrature") {
    const auto ell = oracle::ellipse_map(0.5);
    const auto t = grunsky_table(ell, 16);
    FaberExpansion<double> f2{{C(0), C(0), C(1)}};
    const auto tr = neumann_trace_coeffs(t, f2);
    const auto b = faber_polynomials(ell, 2);
    auto dF2 = [&](C z) { return 2.0 * z + b.rows[2][1]; };
    for (int j = -6; j <= 6; ++j) {
      if (j == 0) continue;
      CHECK(std::abs(tr.coeffs[j] - oracle::neumann_coefficient_quadrature(ell, dF2, j)) < 1e-8);
    }
  }

  TEST_CASE("Neumann trace on a general map matches boundary quadrature") {
    const auto boat = oracle::boat_map();
    const auto t = grunsky_table(boat, 64);
    const auto b = faber_polynomials(boat, 3);
    FaberExpansion<double> f3{{C(0), C(0), C(0), C(1)}};
    const auto tr = neumann_trace_coeffs(t, f3);
    auto dF3 = [&](C z) { return 3.0 * z * z + 2.0 * b.rows[3][2] * z + b.rows[3][1]; };
    for (int j = -10; j <= 10; ++j) {
      if (j == 0) continue;
      CHECK(std::abs(tr.coeffs[j] - oracle::neumann_coefficient_quadrature(boat, dF3, j)) < 1e-10);
    }
  }

  TEST_CASE("truncation warning fires for an under-resolved table") {
    const auto t1 = oracle::table1_map();
    const auto t = grunsky_table(t1, 4);
    FaberExpansion<double> f{{C(0), C(0), C(0), C(1)}};
    CHECK(neumann_trace_coeffs(t, f).truncation_warning);
  }

  TEST_CASE("generating function remainder decays geometrically") {
    const auto boat = oracle::boat_map();
    const auto b = faber_polynomials(boat, 40);
    const C z(0.3, 0.2);
    const C w = std::polar(3.0, 0.9);
    const C exact = boat.derivative(w) / (boat.evaluate(w) - z);
    double prev = 1e300;
    for (int N : {5, 10, 20, 40}) {
      C s = 0;
      for (int m = 0; m <= N; ++m) s += b.evaluate(m, z) / std::pow(w, m + 1);
      const double r = std::abs(s - exact);
      CHECK(r < prev);
      CHECK(r < 10 * std::pow(1.0 / 2.5, N + 1));
      prev = r;
    }
  }

  TEST_CASE("exterior expansion of F_m at |w| = 2 gamma") {
    const auto t1 = oracle::table1_map();
    const int N = 60;
    const auto t = grunsky_table(t1, N);
    const auto b = faber_polynomials(t1, 8);
    for (int m = 1; m <= 8; ++m) {
      const C w = std::polar(2.0 * t1.gamma(), 0.3 * m);
      C s = std::pow(w, m);
      for (int k = 1; k <= N; ++k) s += t.c(m, k) * std::pow(w, -k);
      const C ref = b.evaluate(m, t1.evaluate(w));
      CHECK(std::abs(s - ref) < 1e-10 * std::max(1.0, std::abs(ref)));
    }
  }

  TEST_CASE("strong Grunsky inequality on a few weight vectors") {
    const auto t = grunsky_table(oracle::table1_map(), 30);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<C> lambda(15);
      for (auto& l : lambda) l = C(g(rng), g(rng));
      const auto [lhs, rhs] = strong_grunsky_sides<double>(t, lambda);
      CHECK(lhs <= rhs + 1e-10);
    }
    std::vector<C> too_many(31, C(1));
    CHECK_THROWS_AS(strong_grunsky_sides<double>(t, too_many), ContractError);
  }

  TEST_CASE("mu orientation: entries equal sqrt(m/k) c_{k,m} / gamma^{m+k}") {
    const auto t = grunsky_table(oracle::table1_map(), 10);
    for (int k = 1; k <= 10; ++k) {
      for (int m = 1; m <= 10; ++m) {
        const C expected = std::sqrt(double(m) / k) * t.c(k, m) / std::pow(2.0, m + k);
        CHECK(std::abs(t.mu(k, m) - expected) < 1e-14);
      }
    }
  }
}
