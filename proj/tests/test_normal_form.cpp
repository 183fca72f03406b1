#include <doctest/doctest.h>

#include "support.hpp"
#include "wavetrace/normal_form.hpp"
#include "wavetrace/sampling.hpp"

using namespace wavetrace;
using namespace wt_test;

namespace {

Eigen::MatrixXcd random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = complex(g(rng), g(rng));
  return (m + m.adjoint()) / 2.0;
}

std::shared_ptr<const Profile> make(CoriolisSpec c, FlowSpec f) { return std::make_shared<const Profile>(c, f); }

}  // namespace

TEST_SUITE("normal_form") {

TEST_CASE("Poincare Hamiltonians") {
  const Profile lin(LinearCoriolis{1.0}, ZeroFlow{});
  CHECK(std::abs(tau_pm(lin, PhasePoint{0, 4, 3, 0}, +1) - 5.0) < 1e-15);
  CHECK(std::abs(tau_pm(lin, PhasePoint{0, 4, 3, 0}, -1) + 5.0) < 1e-15);
  for (const auto& p : sample_box(PhaseBox{{-2, -2, -2, -2}, {2, 2, 2, 2}}, 100, 3)) {
    CHECK(tau_pm(lin, p, +1) == xi_b(p, lin));
    CHECK(tau_pm(lin, p, -1) == -xi_b(p, lin));
  }
}

TEST_CASE("Rossby Hamiltonian examples") {
  const Profile lin(LinearCoriolis{1.0}, ZeroFlow{});
  CHECK(std::abs(tau_R(lin, PhasePoint{0.3, 0, 1, 0}) - 1.0) < 1e-15);
  const Profile sine(ShiftedSineCoriolis{}, ZeroFlow{});
  for (double x2 : {-1.0, 0.0, 2.0}) CHECK(tau_R(sine, PhasePoint{0.5, x2, 0.0, 0.7}) == 0.0);
}

TEST_CASE("generic subprincipal formula reproduces tau_R") {
  const auto lin = make(LinearCoriolis{1.0}, ZeroFlow{});
  const SubprincipalReport r = subprincipal_diagonal(lin, PhasePoint{0.3, 0, 1, 0}, ModeId::Rossby);
  CHECK(std::abs(r.total - 1.0) < 1e-13);
  const auto sine = make(ShiftedSineCoriolis{}, ZeroFlow{});
  CHECK(std::abs(subprincipal_diagonal(sine, PhasePoint{0.5, 1.0, 0.0, 0.7}, ModeId::Rossby).total) < 1e-13);

  const std::vector<std::shared_ptr<const Profile>> profiles{
      lin, sine, make(TanhCoriolis{}, ZeroFlow{}), make(LinearCoriolis{0.5}, BumpFlow{0.2, -0.1, 1.5, 0.6}),
      make(ShiftedSineCoriolis{}, BumpFlow{0.0, 0.0, 1.2, 0.4})};
  for (const auto& prof : profiles) {
    BoxSampler s(PhaseBox{{-1.5, -1.5, -2, -2}, {1.5, 1.5, 2, 2}}, 8);
    CHECK(verify_tau_R(prof, s, 1000) <= 1e-8);
  }
  // b' == 0 and u == 0: both sides vanish identically.
  const auto flat = make(ShiftedSineCoriolis{2.0, 0.0, 1.0}, ZeroFlow{});
  for (const auto& p : sample_box(PhaseBox{{-1, -1, -1, -1}, {1, 1, 1, 1}}, 50, 2)) {
    CHECK(tau_R(*flat, p) == 0.0);
    CHECK(std::abs(subprincipal_diagonal(flat, p, ModeId::Rossby).total) < 1e-14);
  }
}

TEST_CASE("subprincipal values are gauge invariant and real") {
  const auto prof = make(ShiftedSineCoriolis{}, BumpFlow{0.0, 0.0, 1.2, 0.4});
  const SubprincipalEvaluator ev(prof);
  for (const auto& p : sample_box(PhaseBox{{-1, -1, -2, -2}, {1, 1, 2, 2}}, 100, 5)) {
    for (ModeId m : {ModeId::Rossby, ModeId::PoincarePlus, ModeId::PoincareMinus}) {
      const SubprincipalReport a = ev.evaluate(p, m);
      const SubprincipalReport b = ev.evaluate(p, m, 0.83);
      CHECK(std::abs(a.total - b.total) < 1e-12);
      CHECK(std::abs(a.total.imag()) < 1e-12);
      CHECK(std::abs(a.total - a.bracket_part - a.flow_part) < 1e-14);
    }
  }
}

TEST_CASE("homological equation examples") {
  Eigen::VectorXd d(3);
  d << 0, 1, -1;
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(3, 3);
  D(0, 1) = 2.0;
  D(1, 0) = 2.0;
  const auto s = homological_solve(d, D);
  // (delta_i - delta_j) W_ij = -Delta_ij, so W_01 = 2 / (delta_1 - delta_0) = 2.
  CHECK(std::abs(s.W0(0, 1) - 2.0) < 1e-15);
  CHECK(std::abs(s.W0(1, 0) + 2.0) < 1e-15);
  Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(3, 3);
  diag.diagonal() << 0.5, -1.0, 2.0;
  const auto t = homological_solve(d, diag);
  CHECK(t.W0.norm() == 0.0);
  CHECK((t.D1 - Eigen::Vector3d(0.5, -1.0, 2.0)).norm() == 0.0);
  Eigen::VectorXd close(3);
  close << 0, 1e-9, 1;
  CHECK_THROWS_AS(homological_solve(close, D), DegenerateError);
  Eigen::MatrixXcd nh = D;
  nh(0, 1) = 1.0;
  CHECK_THROWS_AS(homological_solve(d, nh), NotHermitian);
}

TEST_CASE("homological identity on random Hermitian instances") {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 200; ++k) {
    const int n = 3 + k % 4;
    Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(n, -2.0, 2.0);
    const Eigen::MatrixXcd D1 = random_hermitian(n, rng);
    const auto s = homological_solve(d, D1);
    const Eigen::MatrixXcd lhs = d.asDiagonal() * s.W0 - s.W0 * d.asDiagonal() + D1;
    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(n, n);
    rhs.diagonal() = s.D1.cast<complex>();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK((s.W0 + s.W0.adjoint()).cwiseAbs().maxCoeff() <= 1e-13);  // anti-Hermitian
  }
}

TEST_CASE("unitarity correction") {
  const Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(3, 3);
  CHECK(unitarity_correction(Eigen::MatrixXcd::Zero(3, 3), U).norm() == 0.0);
  CHECK((unitarity_correction(U, U) + 0.5 * U).norm() == 0.0);
  std::mt19937_64 rng(4);
  for (int k = 0; k < 20; ++k) {
    const Eigen::MatrixXcd I1 = random_hermitian(4, rng);
    const Eigen::MatrixXcd V = random_hermitian(4, rng) + complex(0, 1) * random_hermitian(4, rng);
    Eigen::MatrixXcd expected(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        complex acc = 0.0;
        for (int l = 0; l < 4; ++l) acc += V(i, l) * I1(l, j);
        expected(i, j) = -0.5 * acc;
      }
    CHECK((unitarity_correction(I1, V) - expected).norm() < 1e-13);
  }
  // Corrected frame is unitary to second order: for Q = I + eps H (H Hermitian),
  // (Q + eps V0)^*(Q + eps V0) - I = O(eps^2) with I1 = 2 H.
  const Eigen::MatrixXcd H = random_hermitian(4, rng);
  std::vector<double> err;
  for (double eps : {1e-2, 5e-3}) {
    const Eigen::MatrixXcd Q = Eigen::MatrixXcd::Identity(4, 4) + eps * H;
    const Eigen::MatrixXcd I1 = (Q.adjoint() * Q - Eigen::MatrixXcd::Identity(4, 4)) / eps;
    const Eigen::MatrixXcd C = Q + eps * unitarity_correction(I1, Q);
    err.push_back((C.adjoint() * C - Eigen::MatrixXcd::Identity(4, 4)).norm());
  }
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("Hamiltonian sweep rows") {
  const auto prof = make(ShiftedSineCoriolis{}, ZeroFlow{});
  std::vector<PhasePoint> pts = sample_box(PhaseBox{{-1, -1, -1, -1}, {1, 1, 1, 1}}, 200, 1);
  pts.push_back({0.0, 0.4, 0.0, 0.3});
  const auto rows = hamiltonian_sweep(prof, pts);
  REQUIRE(rows.size() == pts.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].point == pts[i]);
    CHECK(rows[i].abs_error <= 1e-8);
    CHECK(rows[i].tau_plus == -rows[i].tau_minus);
    CHECK(rows[i].closed_form == tau_R(*prof, pts[i]));
  }
  CHECK(rows.back().closed_form == 0.0);
  const auto lin = make(LinearCoriolis{1.0}, ZeroFlow{});
  CHECK_THROWS_AS(hamiltonian_sweep(lin, {PhasePoint{0, 0, 0, 0}}), DegenerateError);
}

}  // TEST_SUITE
