#include <doctest.h>

#include "npfaber/transmission.hpp"
#include "oracles.hpp"

using namespace npfaber;
using oracle::C;

namespace {

TransmissionSolution<double> solve_on(const LaurentMapd& map, const BackgroundFieldd& field, double eps_c, double eps_m,
                                      int n, int N) {
  return solve_transmission(map, grunsky_table(map, N), field, eps_c, eps_m, n);
}

}  // namespace

TEST_SUITE("transmission") {
  TEST_CASE("single layer basis matches boundary quadrature") {
    const auto boat = oracle::boat_map();
    const auto t = grunsky_table(boat, 64);
    for (int m = -5; m <= 5; ++m) {
      CAPTURE(m);
      for (C z : {C(0.2, 0.1), C(-0.4, -0.3)}) {
        CHECK(std::abs(single_layer_basis(boat, t, m, z, Side::interior) - oracle::single_layer_quadrature(boat, m, z)) <
              1e-12);
      }
      for (C z : {C(1.6, 0.4), C(-0.2, 1.4), C(3.0, -2.0)}) {
        bool truncated = true;
        const C v = single_layer_basis(boat, t, m, z, Side::exterior, &truncated);
        CHECK(std::abs(v - oracle::single_layer_quadrature(boat, m, z)) < 1e-12);
        CHECK_FALSE(truncated);
      }
    }
  }

  TEST_CASE("double layer basis matches boundary quadrature") {
    const auto map = oracle::table1_map();
    const auto t = grunsky_table(map, 100);
    for (int m = -4; m <= 4; ++m) {
      CAPTURE(m);
      for (C z : {C(0.3, 0.2), C(-1.0, 0.5)}) {
        CHECK(std::abs(double_layer_basis(map, t, m, z, Side::interior) - oracle::double_layer_quadrature(map, m, z)) <
              1e-10);
      }
      for (C z : {C(6.0, 1.0), C(-2.0, 7.0)}) {
        CHECK(std::abs(double_layer_basis(map, t, m, z, Side::exterior) - oracle::double_layer_quadrature(map, m, z)) <
              1e-10);
      }
    }
  }

  TEST_CASE("side classification agrees with the explicit overload") {
    const auto boat = oracle::boat_map();
    const auto t = grunsky_table(boat, 32);
    for (C z : {C(0.1, 0.0), C(1.5, 0.0), C(0.0, 1.1), C(-1.0, -1.0)}) {
      const Side side = Locator<double>(boat).side(z);
      CHECK(single_layer_basis(boat, t, 3, z) == single_layer_basis(boat, t, 3, z, side));
      CHECK(double_layer_basis(boat, t, -2, z) == double_layer_basis(boat, t, -2, z, side));
    }
    CHECK(Locator<double>(boat).side(C(0.1, 0.0)) == Side::interior);
    CHECK(Locator<double>(boat).side(C(1.5, 0.0)) == Side::exterior);
  }

  TEST_CASE("jump relations across the boundary") {
    const auto boat = oracle::boat_map();
    const auto t = grunsky_table(boat, 64);
    for (int m : {-3, -1, 1, 2, 5}) {
      for (double theta : {0.0, 1.0, 2.5, 4.0}) {
        const C z = boat.evaluate(std::polar(1.0, theta));
        const CurvilinearPoint<double> on{0.0, theta};
        const C s_in = single_layer_basis(boat, t, m, z, Side::interior);
        const C s_out = single_layer_basis(boat, t, m, on);
        CHECK(std::abs(s_in - s_out) < 1e-12);
        const C d_in = double_layer_basis(boat, t, m, z, Side::interior);
        const C d_out = double_layer_basis(boat, t, m, on);
        CHECK(std::abs(d_in - d_out - std::polar(1.0, m * theta)) < 1e-12);
      }
    }
  }

  TEST_CASE("zero mode of the layer potentials") {
    const auto map = oracle::ellipse_map(0.5, 2.0);
    const auto t = grunsky_table(map, 8);
    CHECK(std::abs(single_layer_basis(map, t, 0, C(0.1), Side::interior) - std::log(2.0)) < 1e-15);
    const CurvilinearPoint<double> p{std::log(3.0), 0.7};
    CHECK(std::abs(single_layer_basis(map, t, 0, p) - std::log(3.0)) < 1e-15);
    CHECK(std::abs(double_layer_basis(map, t, 0, C(0.1), Side::interior) - 1.0) < 1e-15);
    CHECK(std::abs(double_layer_basis(map, t, 0, p)) < 1e-15);
  }

  TEST_CASE("layer basis errors") {
    const auto boat = oracle::boat_map();
    const auto t = grunsky_table(boat, 8);
    CHECK_THROWS_AS(single_layer_basis(boat, t, 9, C(0.1), Side::interior), ContractError);
    CHECK_THROWS_AS(double_layer_basis(boat, t, -9, C(0.1), Side::interior), ContractError);
    CHECK_THROWS_AS(single_layer_basis(boat, t, 1, CurvilinearPoint<double>{-0.1, 0.0}), DomainError);
    CHECK_THROWS_AS(double_layer_basis(boat, t, 1, CurvilinearPoint<double>{-0.1, 0.0}), DomainError);
  }

  TEST_CASE("contrast parameter") {
    CHECK(contrast_parameter(3.0, 1.0) == doctest::Approx(1.0));
    CHECK(contrast_parameter(1.0, 3.0) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(contrast_parameter(2.0, 2.0), ContrastError);
    CHECK_THROWS_AS(contrast_parameter(0.0, 2.0), ContractError);
    CHECK_THROWS_AS(contrast_parameter(2.0, -1.0), ContractError);
  }

  TEST_CASE("disk in a uniform field") {
    const double eps_c = 3.0, eps_m = 1.0;
    const auto sol = solve_on(LaurentMapd::identity(), BackgroundFieldd::x(), eps_c, eps_m, 10, 20);
    const double k = (eps_c - eps_m) / (eps_c + eps_m);
    CHECK(std::abs(sol.phi[1] - k) < 1e-15);
    CHECK(std::abs(sol.phi[-1] - k) < 1e-15);
    for (int m = 2; m <= 10; ++m) CHECK(std::abs(sol.phi[m]) + std::abs(sol.phi[-m]) == 0.0);
    const std::vector<C> inside{C(0.1, 0.2), C(-0.5, 0.3), C(0.0, -0.9)};
    const std::vector<C> outside{C(1.2, 0.0), C(-2.0, 1.0), C(0.3, -5.0)};
    const auto ui = eval_field(sol, std::span<const C>(inside), Side::interior);
    const auto uo = eval_field(sol, std::span<const C>(outside), Side::exterior);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(std::abs(ui[i] - oracle::disk_field(eps_c, eps_m, inside[i])) < 1e-14);
      CHECK(std::abs(uo[i] - oracle::disk_field(eps_c, eps_m, outside[i])) < 1e-14);
    }
    const auto auto_side = eval_field(sol, std::span<const C>(outside));
    for (std::size_t i = 0; i < 3; ++i) CHECK(auto_side[i] == uo[i]);
  }

  TEST_CASE("ellipse interior field is uniform") {
    const double a = 0.5, eps_c = 5.0, eps_m = 1.0;
    const auto sol = solve_on(oracle::ellipse_map(a), BackgroundFieldd::x(), eps_c, eps_m, 12, 24);
    const double factor = oracle::ellipse_interior_factor(1 + a, 1 - a, eps_c, eps_m);
    const std::vector<C> pts{C(0.3, 0.1), C(-1.0, 0.2), C(1.2, -0.1), C(0.0, 0.3)};
    const auto u = eval_field(sol, std::span<const C>(pts), Side::interior);
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(std::abs(u[i] - factor * pts[i].real()) < 1e-13);
  }

  TEST_CASE("solve_transmission contract") {
    const auto boat = oracle::boat_map();
    const auto t = grunsky_table(boat, 10);
    CHECK_THROWS_AS(solve_transmission(boat, t, BackgroundFieldd::x(), 2.0, 2.0, 5), ContrastError);
    CHECK_THROWS_AS(solve_transmission(boat, t, BackgroundFieldd::x(), -2.0, 1.0, 5), ContractError);
    CHECK_THROWS_AS(solve_transmission(boat, t, BackgroundFieldd::x(), 2.0, 1.0, 11), ContractError);
    CHECK_THROWS_AS(solve_transmission(boat, t, BackgroundFieldd::x(), 2.0, 1.0, 0), ContractError);
    const BackgroundFieldd constant{{C(1)}, BackgroundFieldd::Part::real};
    CHECK_THROWS_AS(solve_transmission(boat, t, constant, 2.0, 1.0, 5), ContractError);
    std::vector<C> deg11(12, C(0));
    deg11.back() = C(1);
    CHECK_THROWS_AS(solve_transmission(boat, t, BackgroundFieldd{deg11}, 2.0, 1.0, 5), ContractError);
    CHECK_THROWS_AS(solve_transmission(boat, grunsky_table(oracle::ellipse_map(0.2, 2.0), 10),
                                       BackgroundFieldd::x(), 2.0, 1.0, 5),
                    ContractError);
  }

  TEST_CASE("boat transmission satisfies the interface conditions") {
    const auto sol = solve_on(oracle::boat_map(), BackgroundFieldd::y(), 10.0, 1.0, 60, 120);
    CHECK(sol.asymmetry < 1e-12);
    CHECK_FALSE(sol.truncation_warning);
    const auto d = diagnose(sol);
    CHECK(d.continuity_residual < 1e-8);
    CHECK(d.flux_residual < 1e-10);
    CHECK(d.decay_ok);
  }

  TEST_CASE("normal derivative jump equals the density") {
    const auto sol = solve_on(oracle::boat_map(), BackgroundFieldd::x(), 4.0, 1.0, 40, 80);
    for (double theta : {0.3, 1.7, 3.1, 5.0}) {
      const C w = std::polar(1.0, theta);
      const double h = std::abs(w * sol.map.derivative(w));
      C phi(0);
      for (int m = 1; m <= 40; ++m) {
        phi += std::sqrt(double(m)) * (sol.phi[m] * std::polar(1.0, m * theta) + sol.phi[-m] * std::polar(1.0, -m * theta));
      }
      const double jump = boundary_normal_derivative(sol, theta, Side::exterior) -
                          boundary_normal_derivative(sol, theta, Side::interior);
      CHECK(std::abs(jump - phi.real() / h) < 1e-10);
      CHECK(std::abs(phi.imag()) < 1e-12);
    }
  }

  TEST_CASE("field is harmonic on both sides") {
    const auto sol = solve_on(oracle::boat_map(), BackgroundFieldd::x(), 4.0, 1.0, 40, 80);
    const double e = 1e-3;
    for (auto [z, side] : {std::pair{C(0.1, 0.2), Side::interior}, std::pair{C(1.8, -0.5), Side::exterior}}) {
      const std::vector<C> pts{z, z + e, z - e, z + C(0, e), z - C(0, e)};
      const auto u = eval_field(sol, std::span<const C>(pts), side);
      const double lap = (u[1] + u[2] + u[3] + u[4] - 4 * u[0]) / (e * e);
      CHECK(std::abs(lap) < 1e-5);
    }
  }

  TEST_CASE("curvilinear evaluation agrees with point evaluation") {
    const auto sol = solve_on(oracle::boat_map(), BackgroundFieldd::x(), 4.0, 1.0, 30, 60);
    const CurvilinearPoint<double> p{0.3, 2.0};
    const std::vector<C> z{sol.map.evaluate(p.w())};
    CHECK(std::abs(eval_field(sol, p) - eval_field(sol, std::span<const C>(z))[0]) < 1e-12);
    CHECK_THROWS_AS(eval_field(sol, CurvilinearPoint<double>{-0.2, 0.0}), DomainError);
  }

  TEST_CASE("points on the boundary are rejected") {
    const auto sol = solve_on(oracle::boat_map(), BackgroundFieldd::x(), 4.0, 1.0, 10, 20);
    const std::vector<C> z{sol.map.evaluate(C(1, 0))};
    CHECK_THROWS_AS(eval_field(sol, std::span<const C>(z)), DomainError);
  }

  TEST_CASE("polynomial background field") {
    const BackgroundFieldd quad{{C(0), C(0), C(1, 0.5)}, BackgroundFieldd::Part::real};
    const auto sol = solve_on(oracle::table1_map(), quad, 0.2, 1.0, 60, 120);
    const auto d = diagnose(sol);
    CHECK(d.continuity_residual < 1e-8);
    CHECK(d.flux_residual < 1e-8);
    // The dipole moment may vanish for a quadratic field, so only require
    // decay at least as fast as 1/|z|.
    CHECK(d.decay_ratios[0] < 0.55);
    CHECK(d.decay_ratios[1] < 0.55);
  }

  TEST_CASE("background field helpers") {
    const BackgroundFieldd f{{C(1), C(0, 2), C(3)}, BackgroundFieldd::Part::imaginary};
    CHECK(f.degree() == 2);
    const C z(0.5, -1.0);
    CHECK(std::abs(f.value(z) - std::imag(C(1) + C(0, 2) * z + 3.0 * z * z)) < 1e-15);
    CHECK(std::abs(f.analytic_derivative(z) - (C(0, 2) + 6.0 * z)) < 1e-15);
    const BackgroundFieldd padded{{C(0), C(1), C(0), C(0)}, BackgroundFieldd::Part::real};
    CHECK(padded.degree() == 1);
  }
}
