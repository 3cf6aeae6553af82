#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "floqsense/correlations.hpp"
#include "floqsense/floquet.hpp"

using namespace floqsense;

namespace {

// Classic RK4 on i d/dt U = H U with many steps, as an integrator independent of the Magnus scheme.
Matrix2c rk4_propagator(Real k, const ChainParams& cp, const DriveParams& dp, int steps) {
  const Real dt = dp.tau / steps;
  Matrix2c U = Matrix2c::Identity();
  auto f = [&](Real t, const Matrix2c& X) -> Matrix2c { return -kI * mode_hamiltonian(k, t, cp, dp) * X; };
  for (int m = 0; m < steps; ++m) {
    const Real t = m * dt;
    const Matrix2c k1 = f(t, U);
    const Matrix2c k2 = f(t + dt / 2, U + dt / 2 * k1);
    const Matrix2c k3 = f(t + dt / 2, U + dt / 2 * k2);
    const Matrix2c k4 = f(t + dt, U + dt * k3);
    U += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return U;
}

}  // namespace

TEST_SUITE("floquet") {
  TEST_CASE("fold quasienergy") {
    CHECK(fold_quasienergy(0.3, 1.0) == doctest::Approx(0.3));
    CHECK(fold_quasienergy(0.7, 1.0) == doctest::Approx(-0.3));
    CHECK(fold_quasienergy(-2.2, 1.0) == doctest::Approx(-0.2));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<Real> u(-50.0, 50.0);
    for (int i = 0; i < 200; ++i) {
      const Real w = 0.3 + std::abs(u(rng)) / 10;
      const Real f = fold_quasienergy(u(rng), w);
      CHECK(std::abs(f) <= 0.5 * w);
      CHECK(fold_quasienergy(f, w) == f);
    }
  }

  TEST_CASE("pauli exponential is exact") {
    const Eigen::Vector3d n(0.3, -0.2, 0.5);
    Matrix2c gen;
    gen << Complex(n.z()), Complex(n.x(), -n.y()), Complex(n.x(), n.y()), Complex(-n.z());
    Eigen::SelfAdjointEigenSolver<Matrix2c> es(gen);
    const Matrix2c ref = es.eigenvectors() *
                         es.eigenvalues().unaryExpr([](Real l) { return std::exp(Complex(0.0, -l)); }).asDiagonal() *
                         es.eigenvectors().adjoint();
    CHECK((pauli_exponential(n) - ref).norm() < 1e-14);
    CHECK((pauli_exponential(Eigen::Vector3d::Zero()) - Matrix2c::Identity()).norm() == 0.0);
  }

  TEST_CASE("undriven propagator") {
    ChainParams cp;
    cp.gamma = 0.8;
    cp.h0 = 0.7;
    const auto dp = DriveParams::make(0.0, 1.3);
    const Real k = 0.9;
    const auto prop = one_period_propagator(k, cp, dp);
    Eigen::SelfAdjointEigenSolver<Matrix2c> es(mode_hamiltonian(k, 0.0, cp, dp));
    const Matrix2c ref = es.eigenvectors() *
                         es.eigenvalues()
                             .unaryExpr([&](Real l) { return std::exp(Complex(0.0, -l * dp.tau)); })
                             .asDiagonal() *
                         es.eigenvectors().adjoint();
    CHECK((prop.U - ref).cwiseAbs().maxCoeff() < 1e-12);

    const auto fd = floquet_modes(prop, dp, ground_mode(k, cp));
    const Real E = instantaneous_energy(k, 0.0, cp, dp);
    const Real mu = fold_quasienergy(E, dp.omega);
    CHECK(std::min(std::abs(fd.mu_plus - mu), std::abs(fd.mu_minus - mu)) < 1e-10);
  }

  TEST_CASE("undriven quasienergies without folding") {
    ChainParams cp;
    cp.N = 40;
    cp.gamma = 1.0;
    cp.h0 = 0.5;
    // max E_k = h0 + 1 = 1.5, so omega = 4 keeps 2E < omega
    const auto dp = DriveParams::make(0.0, 4.0);
    for (const auto& fd : floquet_spectrum(cp, dp)) {
      const Real E = instantaneous_energy(fd.k, 0.0, cp, dp);
      CHECK(std::abs(fd.mu_plus - E) < 1e-8);
      CHECK(std::abs(fd.mu_minus + E) < 1e-8);
      CHECK(std::abs(fd.mu_plus - fd.mu_minus - 2 * E) < 1e-8);
    }
  }

  TEST_CASE("step doubling converges") {
    ChainParams cp;
    cp.gamma = 1.0;
    cp.h0 = 1.0;
    const auto dp = DriveParams::make(1.5, 2.0);
    IntegratorConfig a{1024, StepScheme::magnus4};
    IntegratorConfig b{2048, StepScheme::magnus4};
    const auto Ua = one_period_propagator(1.0, cp, dp, a).U;
    const auto Ub = one_period_propagator(1.0, cp, dp, b).U;
    CHECK((Ua - Ub).cwiseAbs().maxCoeff() < 1e-8);

    // the second-order scheme converges, just more slowly
    IntegratorConfig c{1024, StepScheme::midpoint};
    IntegratorConfig d{2048, StepScheme::midpoint};
    const Real mid = (one_period_propagator(1.0, cp, dp, c).U - one_period_propagator(1.0, cp, dp, d).U)
                         .cwiseAbs()
                         .maxCoeff();
    CHECK(mid < 1e-5);
    CHECK(mid > (Ua - Ub).cwiseAbs().maxCoeff());
  }

  TEST_CASE("agreement with an independent integrator") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<Real> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
      ChainParams cp;
      cp.gamma = 2 * u(rng) - 1;
      cp.h0 = 2 * u(rng);
      const auto dp = DriveParams::make(2 * u(rng), 0.5 + 3.5 * u(rng));
      const Real k = kPi * u(rng);
      const Matrix2c U = one_period_propagator(k, cp, dp).U;
      const Matrix2c R = rk4_propagator(k, cp, dp, 40000);
      CHECK((U - R).cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  TEST_CASE("floquet data invariants on random draws") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<Real> u(0.0, 1.0);
    for (int i = 0; i < 30; ++i) {
      ChainParams cp;
      cp.gamma = 2 * u(rng) - 1;
      cp.h0 = 2 * u(rng);
      const auto dp = DriveParams::make(2 * u(rng), 0.5 + 3.5 * u(rng));
      const Real k = kPi * (0.01 + 0.98 * u(rng));
      const auto prop = one_period_propagator(k, cp, dp);
      CHECK(unitarity_defect(prop.U) < 1e-10);
      CHECK(std::abs(std::abs(prop.U.determinant()) - 1.0) < 1e-10);
      const auto fd = floquet_modes(prop, dp, ground_mode(k, cp));
      CHECK(std::abs(std::norm(fd.r_plus) + std::norm(fd.r_minus) - 1.0) < 1e-10);
      CHECK(fd.mu_plus >= fd.mu_minus);
      CHECK(std::abs(fd.mu_plus) <= dp.omega / 2 + 1e-15);
      CHECK(std::abs(fd.mu_minus) <= dp.omega / 2 + 1e-15);
      const Vector2c ep = prop.U * fd.phi_plus - std::exp(Complex(0.0, -fd.mu_plus * dp.tau)) * fd.phi_plus;
      const Vector2c em = prop.U * fd.phi_minus - std::exp(Complex(0.0, -fd.mu_minus * dp.tau)) * fd.phi_minus;
      CHECK(ep.norm() < 1e-8);
      CHECK(em.norm() < 1e-8);
      CHECK(std::abs(fd.phi_plus.dot(fd.phi_minus)) < 1e-12);
    }
  }

  TEST_CASE("polar projection restores unitarity") {
    Matrix2c U = pauli_exponential(Eigen::Vector3d(0.1, 0.4, -0.3));
    U(0, 0) += 1e-9;
    CHECK(unitarity_defect(U) > 1e-10);
    CHECK(unitarity_defect(polar_unitary(U)) < 1e-14);
  }

  TEST_CASE("degenerate multipliers are flagged") {
    // h1 = 0 and E tau = pi: U = -1 on the mode
    ChainParams cp;
    cp.gamma = 0.0;
    cp.h0 = 0.5;
    const Real k = kPi / 2;  // E = 0.5
    const auto dp = DriveParams::make(0.0, 1.0);  // E tau = pi
    const auto fd = floquet_modes(one_period_propagator(k, cp, dp), dp, ground_mode(k, cp));
    CHECK(fd.degenerate);
    CHECK(std::abs(std::norm(fd.r_plus) + std::norm(fd.r_minus) - 1.0) < 1e-12);
  }

  TEST_CASE("degenerate steady state does not depend on the basis") {
    ChainParams cp;
    cp.gamma = 0.0;
    cp.h0 = 0.5;
    const Real k = kPi / 2;
    const auto dp = DriveParams::make(0.0, 1.0);
    ModeState psi{k, Complex(0.6, 0.0), Complex(0.0, 0.8)};
    auto fd = floquet_modes(one_period_propagator(k, cp, dp), dp, psi);
    REQUIRE(fd.degenerate);
    const auto a = steady_mode_expectations(fd, psi);
    // rotate the eigenbasis by hand
    const Real c = std::cos(0.37), s = std::sin(0.37);
    const Vector2c p = c * fd.phi_plus + s * fd.phi_minus;
    const Vector2c m = -s * fd.phi_plus + c * fd.phi_minus;
    fd.phi_plus = p;
    fd.phi_minus = m;
    fd.r_plus = p.dot(psi.amplitudes());
    fd.r_minus = m.dot(psi.amplitudes());
    const auto b = steady_mode_expectations(fd, psi);
    CHECK(std::abs(a.occupation - b.occupation) < 1e-14);
    CHECK(std::abs(a.pairing - b.pairing) < 1e-14);
    // a stationary state is its own time average
    const auto e = mode_expectations(psi);
    CHECK(std::abs(a.occupation - e.occupation) < 1e-14);
  }

  TEST_CASE("boundary gap examples") {
    ChainParams cp;
    cp.h0 = 1.0;
    CHECK(quasienergy_gap_boundary(BoundaryMode::kpi, cp, DriveParams::make(1.0, 1.0)) < 1e-12);
    cp.h0 = 0.5;
    CHECK(quasienergy_gap_boundary(BoundaryMode::kpi, cp, DriveParams::make(1.0, 1.0)) < 1e-12);
    cp.h0 = 0.9;
    // 2(h0 + 1) = 3.8 sits 0.2 below the ladder rung 8 omega
    CHECK(quasienergy_gap_boundary(BoundaryMode::kpi, cp, DriveParams::make(1.0, 0.5)) ==
          doctest::Approx(0.2).epsilon(1e-9));
    CHECK(quasienergy_gap_boundary(BoundaryMode::kpi, cp, DriveParams::make(1.0, 0.5)) > 0.0);
  }

  TEST_CASE("resonance fields") {
    auto has = [](const std::vector<Resonance>& rs, Real h0, BoundaryMode b) {
      for (const auto& r : rs)
        if (std::abs(r.h0 - h0) < 1e-12 && r.branch == b) return true;
      return false;
    };
    const auto w4 = resonance_fields(DriveParams::make(1.0, 4.0), 1.0, 1);
    CHECK(has(w4, 1.0, BoundaryMode::kpi));
    CHECK(has(w4, 3.0, BoundaryMode::k0));

    const auto w1 = resonance_fields(DriveParams::make(1.0, 1.0), 1.0, 4);
    for (Real h : {0.0, 0.5, 1.0, 1.5}) {
      CHECK((has(w1, h, BoundaryMode::k0) || has(w1, h, BoundaryMode::kpi)));
    }
    const auto w2 = resonance_fields(DriveParams::make(1.0, 2.0), 1.0, 2);
    CHECK(has(w2, 0.0, BoundaryMode::kpi));

    for (Real w : {0.5, 1.0, 2.0, 4.0}) {
      const auto dp = DriveParams::make(1.0, w);
      const auto rs = resonance_fields(dp, 1.0, 6);
      for (std::size_t i = 0; i < rs.size(); ++i) {
        CHECK(rs[i].h0 >= 0.0);
        if (i > 0) CHECK(rs[i].h0 >= rs[i - 1].h0);
        ChainParams c;
        c.h0 = rs[i].h0;
        CHECK(quasienergy_gap_boundary(rs[i].branch, c, dp) < 1e-9);
      }
    }
    CHECK_THROWS_AS(resonance_fields(DriveParams::make(1.0, 1.0), 1.0, 0), InvalidParameter);
  }

  TEST_CASE("quasienergy gap closes only at the boundary") {
    ChainParams cp;
    cp.N = 200;
    cp.gamma = 1.0;
    cp.h0 = 1.0;
    Real prev_interior = 0.0;
    for (Real h1 : {0.0, 0.5, 1.0}) {
      const auto dp = DriveParams::make(h1, 0.5);
      const auto fs = floquet_spectrum(cp, dp, {1024, StepScheme::magnus4});
      auto gap = [&](const FloquetData& f) {
        const Real d = f.mu_plus - f.mu_minus;
        return std::min(d, dp.omega - d);
      };
      const Real edge = std::min(gap(fs.front()), gap(fs.back()));
      Real interior = 1e9;
      for (std::size_t m = fs.size() / 4; m < 3 * fs.size() / 4; ++m) interior = std::min(interior, gap(fs[m]));
      if (h1 > 0.0) {
        CHECK(edge < 0.05);
        CHECK(interior > edge);
      }
      (void)prev_interior;
      prev_interior = interior;
    }
  }

  TEST_CASE("stroboscopic evolution") {
    ChainParams cp;
    cp.gamma = 0.9;
    cp.h0 = 0.8;
    const Real k = 1.2;
    const auto g = ground_mode(k, cp);
    const auto dp = DriveParams::make(1.0, 1.7);
    const auto prop = one_period_propagator(k, cp, dp);
    const auto fd = floquet_modes(prop, dp, g);
    const auto s0 = stroboscopic_mode_state(fd, 0, g);
    CHECK(s0.v == g.v);
    CHECK(s0.u == g.u);
    Vector2c psi = g.amplitudes();
    for (long n = 1; n <= 10; ++n) {
      psi = prop.U * psi;
      const auto s = stroboscopic_mode_state(fd, n, g);
      CHECK(std::abs(s.amplitudes().dot(psi)) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(s.norm_squared() - 1.0) < 1e-12);
    }

    const auto undriven = DriveParams::make(0.0, 1.7);
    const auto f0 = floquet_modes(one_period_propagator(k, cp, undriven), undriven, g);
    for (long n : {1L, 10L, 100L}) {
      CHECK(std::abs(std::norm(stroboscopic_mode_state(f0, n, g).u) - std::norm(g.u)) < 1e-10);
    }
    CHECK_THROWS_AS(stroboscopic_mode_state(fd, -1, g), InvalidParameter);
  }
}
