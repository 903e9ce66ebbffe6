#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "torpass/field_io.hpp"
#include "torpass/grid.hpp"
#include "torpass/rng.hpp"

using namespace torpass;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

ManifoldGrid unit_t3(int n = 8) {
  return build_torus(3, {n, n, n}, {1.0, 1.0, 1.0});
}

Field random_field(const ManifoldGrid& g, std::uint64_t seed,
                   double amp = 1.0) {
  Rng rng(seed);
  Field u = make_field(g);
  for (double& v : u.values) v = amp * rng.normal();
  return u;
}

/// Independent Dirichlet-energy oracle: naive DFT per node pair, O(n^2).
/// Computes int |grad u|^2 via Parseval on the flat torus.
double dirichlet_energy_naive(const ManifoldGrid& g, const Field& u) {
  const std::size_t n = g.node_count();
  const double cell = g.cell_volume();
  double energy = 0.0;
  std::vector<int> mi(g.dim), mj(g.dim);
  // Loop over all frequencies m, computing |u_hat(m)|^2 |k|^2 directly.
  for (std::size_t f = 0; f < n; ++f) {
    g.to_multi_index(f, mi);
    double k2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      int m = mi[a];
      if (m > g.points_per_axis[a] / 2) m -= g.points_per_axis[a];
      const double k = 2.0 * kPi * m / g.lengths[a];
      k2 += k * k;
    }
    if (k2 == 0.0) continue;
    std::complex<double> uhat = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      g.to_multi_index(x, mj);
      double phase = 0.0;
      for (int a = 0; a < g.dim; ++a)
        phase += 2.0 * kPi * mi[a] * mj[a] / g.points_per_axis[a];
      uhat += u.values[x] * std::polar(1.0, -phase);
    }
    uhat /= static_cast<double>(n);
    energy += k2 * std::norm(uhat);
  }
  return energy * cell * static_cast<double>(n);
}

}  // namespace

TEST_CASE("build_torus volumes") {
  SECTION("unit cube") {
    auto g = unit_t3();
    CHECK(g.total_volume == Approx(1.0).epsilon(1e-14));
    CHECK(g.node_count() == 512);
  }
  SECTION("stretched periods") {
    auto g = build_torus(3, {8, 8, 8}, {2.0, 1.0, 1.0});
    CHECK(g.total_volume == Approx(2.0).epsilon(1e-14));
  }
  SECTION("constant conformal factor ln 2 gives volume 2^N") {
    std::vector<double> phi(512, std::log(2.0));
    auto g = build_torus(3, {8, 8, 8}, {1.0, 1.0, 1.0}, phi);
    CHECK(g.total_volume == Approx(8.0).epsilon(1e-12));
  }
  SECTION("flat weights equal cell volume") {
    auto g = build_torus(3, {4, 8, 16}, {1.0, 2.0, 0.5});
    for (double w : g.volume_weights)
      CHECK(w == Approx(1.0 / (4 * 8 * 16) * 1.0).epsilon(1e-14));
  }
  SECTION("rejects bad input") {
    CHECK_THROWS_AS(build_torus(2, {8, 8}, {1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(build_torus(3, {8, 8, 8}, {1, -1, 1}), std::domain_error);
    CHECK_THROWS_AS(build_torus(3, {8, 8, 2}, {1, 1, 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_torus(3, {8, 8, 9}, {1, 1, 1}),
                    std::invalid_argument);
  }
}

TEST_CASE("integrate basics") {
  auto g = unit_t3();
  SECTION("constant one integrates to the volume") {
    CHECK(integrate(g, make_field(g, 1.0)) == Approx(1.0).epsilon(1e-14));
  }
  SECTION("odd harmonic integrates to zero") {
    auto u = make_field_from(
        g, [&](std::size_t i) { return std::sin(2 * kPi * g.coordinate(i, 0)); });
    CHECK(std::abs(integrate(g, u)) < 1e-14);
  }
  SECTION("constant on stretched torus") {
    auto g2 = build_torus(3, {8, 8, 8}, {2.0, 1.0, 1.0});
    CHECK(integrate(g2, make_field(g2, 3.5)) == Approx(7.0).epsilon(1e-14));
  }
  SECTION("linearity") {
    auto u = random_field(g, 11);
    auto v = random_field(g, 12);
    const double lhs = integrate(g, axpy(2.5, u, v));
    CHECK(lhs == Approx(2.5 * integrate(g, u) + integrate(g, v)).margin(1e-12));
  }
  SECTION("grid mismatch is rejected") {
    auto g2 = unit_t3();
    auto u = make_field(g2, 1.0);
    CHECK_THROWS_AS(integrate(g, u), std::invalid_argument);
  }
}

TEST_CASE("flat Laplacian: plane waves are exact eigenfunctions") {
  auto g = unit_t3(16);
  SECTION("constants are annihilated") {
    auto lap = laplace_beltrami(g, make_field(g, 3.0));
    for (double v : lap.values) CHECK(std::abs(v) < 1e-12);
  }
  SECTION("sin(2 pi x) has eigenvalue -4 pi^2") {
    auto u = make_field_from(
        g, [&](std::size_t i) { return std::sin(2 * kPi * g.coordinate(i, 0)); });
    auto lap = laplace_beltrami(g, u);
    for (std::size_t i = 0; i < g.node_count(); ++i)
      CHECK(lap.values[i] == Approx(-4 * kPi * kPi * u.values[i]).margin(1e-10));
  }
}

TEST_CASE("Laplacian is self-adjoint in the integrate pairing") {
  auto g = unit_t3();
  auto u = random_field(g, 21);
  auto v = random_field(g, 22);
  auto lu = laplace_beltrami(g, u);
  auto lv = laplace_beltrami(g, v);
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    a += lu.values[i] * v.values[i] * g.volume_weights[i];
    b += lv.values[i] * u.values[i] * g.volume_weights[i];
  }
  const double scale = lp_norm(g, u, 2) * lp_norm(g, v, 2) * 4 * kPi * kPi * 64;
  CHECK(std::abs(a - b) < 1e-12 * scale);
}

TEST_CASE("gradient norm matches naive DFT Parseval oracle") {
  auto g = unit_t3();
  auto u = random_field(g, 31);
  // -int u Delta u is the gradient norm used by h1_norm_sq.
  auto lap = laplace_beltrami(g, u);
  double grad_sq = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i)
    grad_sq += -u.values[i] * lap.values[i] * g.volume_weights[i];
  const double oracle = dirichlet_energy_naive(g, u);
  CHECK(grad_sq == Approx(oracle).epsilon(1e-9));
}

TEST_CASE("h1_norm_sq closed forms") {
  auto g = unit_t3(16);
  auto V1 = make_field(g, 1.0);
  SECTION("constants: gradient term vanishes") {
    CHECK(h1_norm_sq(g, V1, make_field(g, 2.5)) ==
          Approx(6.25).epsilon(1e-12));
  }
  SECTION("single mode: Parseval") {
    auto u = make_field_from(
        g, [&](std::size_t i) { return std::sin(2 * kPi * g.coordinate(i, 0)); });
    CHECK(h1_norm_sq(g, V1, u) ==
          Approx((4 * kPi * kPi + 1.0) * 0.5).epsilon(1e-12));
  }
}

TEST_CASE("lp_norm basics") {
  auto g = unit_t3();
  SECTION("constants") {
    CHECK(lp_norm(g, make_field(g, 2.0), 2.0) == Approx(2.0).epsilon(1e-14));
    CHECK(lp_norm(g, make_field(g, 2.0), 6.0) == Approx(2.0).epsilon(1e-14));
  }
  SECTION("p = 1 equals integral of |u|") {
    auto u = random_field(g, 41);
    Field au = u;
    for (double& v : au.values) v = std::abs(v);
    CHECK(lp_norm(g, u, 1.0) == Approx(integrate(g, au)).epsilon(1e-13));
  }
  SECTION("p < 1 rejected") {
    CHECK_THROWS_AS(lp_norm(g, make_field(g, 1.0), 0.5),
                    std::invalid_argument);
  }
}

TEST_CASE("conformal Laplacian matches dense application of the stencil") {
  // Assemble the flux stencil directly as a dense matrix and compare the
  // matrix-free path against it on a random field.
  const int n = 8;
  ManifoldGrid flat = build_torus(3, {n, n, n}, {1, 1, 1});
  std::vector<double> phi(flat.node_count());
  for (std::size_t i = 0; i < phi.size(); ++i)
    phi[i] = 0.1 * std::sin(2 * kPi * flat.coordinate(i, 0));
  auto g = build_torus(3, {n, n, n}, {1, 1, 1}, phi);

  const std::size_t count = g.node_count();
  std::vector<double> dense(count * count, 0.0);
  const double h = 1.0 / n;
  std::vector<int> idx(3);
  for (std::size_t i = 0; i < count; ++i) {
    g.to_multi_index(i, idx);
    for (int a = 0; a < 3; ++a) {
      for (int dir : {-1, +1}) {
        auto nb = idx;
        nb[a] = (nb[a] + dir + n) % n;
        const std::size_t j = g.to_linear(nb);
        const double af = std::exp(0.5 * (phi[i] + phi[j]));
        dense[i * count + j] += af / (h * h) * std::exp(-3.0 * phi[i]);
        dense[i * count + i] -= af / (h * h) * std::exp(-3.0 * phi[i]);
      }
    }
  }

  Rng rng(51);
  Field u = make_field(g);
  for (double& v : u.values) v = rng.normal();
  auto lap = laplace_beltrami(g, u);
  for (std::size_t i = 0; i < count; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < count; ++j)
      acc += dense[i * count + j] * u.values[j];
    CHECK(lap.values[i] == Approx(acc).margin(1e-9));
  }
}

TEST_CASE("conformal Laplacian converges to the analytic operator at order 2") {
  // Delta_g u = e^{-2 phi}(Delta u + (N-2) grad phi . grad u) for
  // g = e^{2 phi} delta; compare against the closed form on two grids.
  auto err_for = [&](int n) {
    ManifoldGrid flat = build_torus(3, {n, n, n}, {1, 1, 1});
    std::vector<double> phi(flat.node_count());
    for (std::size_t i = 0; i < phi.size(); ++i)
      phi[i] = 0.1 * std::sin(2 * kPi * flat.coordinate(i, 0));
    auto g = build_torus(3, {n, n, n}, {1, 1, 1}, phi);
    auto u = make_field_from(g, [&](std::size_t i) {
      return std::sin(2 * kPi * g.coordinate(i, 0)) *
             std::cos(2 * kPi * g.coordinate(i, 1));
    });
    auto lap = laplace_beltrami(g, u);
    double err = 0.0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      const double x = g.coordinate(i, 0), y = g.coordinate(i, 1);
      const double ph = 0.1 * std::sin(2 * kPi * x);
      const double lap_u = -8 * kPi * kPi * u.values[i];
      const double grad_dot = 0.1 * 2 * kPi * std::cos(2 * kPi * x) * 2 * kPi *
                              std::cos(2 * kPi * x) * std::cos(2 * kPi * y);
      const double exact = std::exp(-2 * ph) * (lap_u + grad_dot);
      err = std::max(err, std::abs(lap.values[i] - exact));
    }
    return err;
  };
  const double e8 = err_for(8);
  const double e16 = err_for(16);
  CHECK(e8 / e16 > 3.0);
  CHECK(e8 / e16 < 5.2);
}

TEST_CASE("conformal Laplacian stays self-adjoint in L^2(dv_g)") {
  const int n = 8;
  ManifoldGrid flat = build_torus(3, {n, n, n}, {1, 1, 1});
  std::vector<double> phi(flat.node_count());
  for (std::size_t i = 0; i < phi.size(); ++i)
    phi[i] = 0.3 * std::cos(2 * kPi * flat.coordinate(i, 2));
  auto g = build_torus(3, {n, n, n}, {1, 1, 1}, phi);
  auto u = random_field(g, 61);
  auto v = random_field(g, 62);
  auto lu = laplace_beltrami(g, u);
  auto lv = laplace_beltrami(g, v);
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    a += lu.values[i] * v.values[i] * g.volume_weights[i];
    b += lv.values[i] * u.values[i] * g.volume_weights[i];
  }
  CHECK(std::abs(a - b) < 1e-10 * (1.0 + std::abs(a)));
}

TEST_CASE("FLD1 round trip and CSV header") {
  auto g = build_torus(3, {4, 6, 8}, {1.0, 2.0, 0.5});
  auto u = random_field(g, 71);
  const std::string dir = "io_test_out";
  std::filesystem::create_directories(dir);
  write_fld(dir + "/u.fld", u);
  Field v = load_field(dir + "/u.fld", g);
  for (std::size_t i = 0; i < g.node_count(); ++i)
    CHECK(v.values[i] == u.values[i]);

  write_csv(dir + "/u.csv", u);
  std::ifstream is(dir + "/u.csv");
  std::string header;
  std::getline(is, header);
  CHECK(header == "# FLD dims=4x6x8 lengths=1,2,0.5");
  std::string line;
  std::size_t rows = 0;
  while (std::getline(is, line))
    if (!line.empty()) ++rows;
  CHECK(rows == g.node_count());

  SECTION("geometry mismatch rejected") {
    auto g2 = build_torus(3, {4, 6, 8}, {1.0, 2.0, 0.6});
    CHECK_THROWS_AS(load_field(dir + "/u.fld", g2), ConfigError);
  }
}
