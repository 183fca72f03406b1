#include <doctest/doctest.h>

#include "support.hpp"
#include "wavetrace/normal_form.hpp"
#include "wavetrace/raytrace.hpp"

using namespace wavetrace;
using namespace wt_test;

namespace {

const std::array<ModeId, 3> kModes{ModeId::Rossby, ModeId::PoincarePlus, ModeId::PoincareMinus};

double state_dist(const PhasePoint& a, const PhasePoint& b) {
  return std::max({std::abs(a.x1 - b.x1), std::abs(a.x2 - b.x2), std::abs(a.xi1 - b.xi1), std::abs(a.xi2 - b.xi2)});
}

// d tau / dt along f, with the gradient of tau from finite differences.
double hamiltonian_rate(const Profile& prof, const PhasePoint& p, ModeId m, const State& f) {
  auto tau = [&](const PhasePoint& q) { return mode_hamiltonian(prof, q, m); };
  return fd4(tau, p, Coordinate::X1) * f[0] + fd4(tau, p, Coordinate::X2) * f[1] +
         fd4(tau, p, Coordinate::Xi1) * f[2] + fd4(tau, p, Coordinate::Xi2) * f[3];
}

RayConfig config(ModeId m, double t_max) {
  RayConfig c;
  c.hamiltonian = m;
  c.t_max = t_max;
  return c;
}

}  // namespace

TEST_SUITE("raytrace") {

TEST_CASE("hand-derived vector field matches the symbolic gradient") {
  const auto prof = sine_bump_profile();
  const auto lin = std::make_shared<const Profile>(LinearCoriolis{0.8}, BumpFlow{0.1, 0.2, 1.0, 0.5});
  for (const auto& pr : {prof, lin}) {
    for (const auto& p : sample_box(PhaseBox{{-1, -1, -2, -2}, {1, 1, 2, 2}}, 300, 21)) {
      if (xi_b(p, *pr) < 0.1) continue;
      for (ModeId m : kModes) {
        const State a = hamiltonian_rhs(*pr, p, m);
        const State b = hamiltonian_rhs_symbolic(pr, p, m);
        for (int i = 0; i < 4; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12 * std::max(1.0, std::abs(b[i])));
        CHECK(std::abs(hamiltonian_rate(*pr, p, m, a)) < 1e-7);
      }
    }
  }
}

TEST_CASE("trivial Rossby vector field: uniform motion along x1") {
  const Profile sine(ShiftedSineCoriolis{}, ZeroFlow{});
  const PhasePoint p{0.3, 0.7, 0.0, -0.4};
  const State f = hamiltonian_rhs(sine, p, ModeId::Rossby);
  const double r2 = 0.16 + sine.b(0.7) * sine.b(0.7);
  CHECK(std::abs(f[0] - sine.db(0.7) / r2) < 1e-15);
  CHECK(f[1] == 0.0);
  CHECK(f[2] == 0.0);
  CHECK(f[3] == 0.0);
  CHECK_THROWS_AS(hamiltonian_rhs(Profile(LinearCoriolis{}, ZeroFlow{}), PhasePoint{}, ModeId::Rossby), DegenerateError);
}

TEST_CASE("commonly printed Rossby system is not Hamiltonian when b'' != 0") {
  const Profile lin(LinearCoriolis{1.3}, ZeroFlow{});
  const Profile sine(ShiftedSineCoriolis{}, ZeroFlow{});
  const PhasePoint p{0.0, 0.6, 0.7, -0.3};
  const State a = rossby_rhs_printed(lin, p);
  const State b = hamiltonian_rhs(lin, p, ModeId::Rossby);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-14);
  const State c = rossby_rhs_printed(sine, p);
  const State d = hamiltonian_rhs(sine, p, ModeId::Rossby);
  CHECK(std::abs(c[3] - d[3]) > 1e-3);
  CHECK(std::abs(hamiltonian_rate(sine, p, ModeId::Rossby, c)) > 1e-4);
  CHECK(std::abs(hamiltonian_rate(sine, p, ModeId::Rossby, d)) < 1e-9);
}

TEST_CASE("trivial Rossby ray drifts at b'/<xi>_b^2") {
  // b = x2, p0 = (0, 1, 0, 1): <xi>_b^2 = 2, so x1(t) = t / 2 with x2, xi frozen.
  const Profile lin(LinearCoriolis{1.0}, ZeroFlow{});
  const Trajectory tr = integrate(lin, PhasePoint{0, 1, 0, 1}, config(ModeId::Rossby, 10));
  for (std::size_t i = 0; i < tr.size(); ++i) {
    CHECK(std::abs(tr.points[i].x1 - tr.times[i] / 2) < 1e-9);
    CHECK(tr.points[i].x2 == 1.0);
    CHECK(tr.points[i].xi2 == 1.0);
  }
  CHECK(tr.t_end() == 10.0);
  CHECK(tr.stop == StopReason::TMax);
}

TEST_CASE("adaptive integrator against fixed-step RK4, dense output and time reversal") {
  const auto prof = sine_bump_profile();
  for (const auto& p0 : sample_box(PhaseBox{{-0.5, -0.5, 0.3, -1}, {0.5, 0.5, 1, 1}}, 6, 31)) {
    for (ModeId m : kModes) {
      const Trajectory tr = integrate(*prof, p0, config(m, 5.0));
      const PhasePoint ref = integrate_rk4(*prof, p0, m, 5.0, 1e-3);
      CHECK(state_dist(tr.points.back(), ref) < 1e-8);
      const PhasePoint mid = integrate_rk4(*prof, p0, m, 2.345, 1e-3);
      CHECK(state_dist(tr.state_at(2.345), mid) < 1e-7);
      RayConfig back = config(m, 5.0);
      back.reverse = true;
      const Trajectory rt = integrate(*prof, tr.points.back(), back);
      CHECK(state_dist(rt.points.back(), p0) < 1e-8);
    }
  }
}

TEST_CASE("logged invariants") {
  const Profile sine(ShiftedSineCoriolis{}, ZeroFlow{});
  for (const auto& p0 : sample_box(PhaseBox{{-1, -1, 0.2, -1}, {1, 1, 1, 1}}, 5, 3)) {
    for (ModeId m : kModes) {
      RayConfig c = config(m, 100);
      c.rtol = 1e-12;
      c.atol = 1e-14;
      const Trajectory tr = integrate(sine, p0, c);
      const InvariantReport r = invariant_report(tr);
      CHECK(r.tau_drift <= 1e-8 * std::max(1.0, std::abs(tr.tau.front())));
      double mn = 1e300;
      for (double v : tr.xi_b) mn = std::min(mn, v);
      CHECK(r.min_xi_b == mn);
      if (m != ModeId::Rossby) {
        CHECK(r.xi1_drift <= 1e-12);
        CHECK(r.poincare_inv_drift <= 1e-8);
        CHECK(r.dx1_spread <= 1e-8);
      }
    }
  }
}

TEST_CASE("stop conditions and configuration errors") {
  const Profile lin(LinearCoriolis{1.0}, ZeroFlow{});
  RayConfig c = config(ModeId::Rossby, 100);
  c.max_steps = 5;
  CHECK(integrate(lin, PhasePoint{0, 0.5, 0.3, 0}, c).stop == StopReason::MaxSteps);
  // A ray whose <xi>_b dips below its start value stops at a floor placed in between.
  // (<xi>_b is conserved on Rossby rays when b is affine, so use the sine profile.)
  const Profile sine(ShiftedSineCoriolis{}, ZeroFlow{});
  const PhasePoint p0{0, 0.0, 0.5, 0.5};
  const Trajectory free = integrate(sine, p0, config(ModeId::Rossby, 20));
  const double start = free.xi_b.front();
  const double low = invariant_report(free).min_xi_b;
  REQUIRE(low < start - 0.1);
  RayConfig g = config(ModeId::Rossby, 20);
  g.gap_tol = 0.5 * (start + low);
  const Trajectory stopped = integrate(sine, p0, g);
  CHECK(stopped.stop == StopReason::DegenerateEvent);
  CHECK(stopped.t_end() < 20.0);
  g.gap_tol = start + 0.1;
  CHECK_THROWS_AS(integrate(sine, p0, g), DegenerateError);
  RayConfig bad = config(ModeId::Rossby, 1);
  bad.rtol = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK(std::string(stop_reason_name(StopReason::TMax)) == "t_max");
}

TEST_CASE("floor parameter and lower bound") {
  const Profile lin(LinearCoriolis{1.0}, ZeroFlow{});
  CHECK(validate_eta(lin, 1.0).beta == 1.0);
  CHECK(xi_b_lower_bound(lin, 1.0, 1.0) == 1.0);
  // An eddy normalized to sup |u| = 1, tau_max = 0: min(1, 1 / (0 + 1)) = 1.
  const Profile unit_eddy(LinearCoriolis{1.0}, BumpFlow{0, 0, 1.0, 1.0 / Profile(LinearCoriolis{}, BumpFlow{0, 0, 1.0, 1.0}).u_inf_norm()});
  CHECK(std::abs(unit_eddy.u_inf_norm() - 1.0) < 1e-15);
  CHECK(std::abs(xi_b_lower_bound(unit_eddy, 0.0, 1.0) - 1.0) < 1e-15);
  CHECK(std::isinf(validate_eta(Profile(ShiftedSineCoriolis{}, ZeroFlow{}), 0.5).beta));
  CHECK_THROWS_AS(validate_eta(Profile(TanhCoriolis{}, ZeroFlow{}), 1.5), ProfileAssumptionError);
  CHECK(validate_eta(Profile(TanhCoriolis{}, ZeroFlow{}), 0.5).beta >= 0.75 - 1e-9);
}

TEST_CASE("floor bound can exceed <xi>_b at the initial point") {
  // b = x2, eta = 1, p0 = (0, 0.1, 0.1, 0.1): tau_R = 10/3, so the bound is 0.3 while
  // <xi>_b(p0) = sqrt(0.03) ~ 0.173. The bound is kept as stated and this case is recorded.
  const Profile lin(LinearCoriolis{1.0}, ZeroFlow{});
  const PhasePoint p0{0, 0.1, 0.1, 0.1};
  const double tau = std::abs(tau_R(lin, p0));
  CHECK(tau == doctest::Approx(10.0 / 3.0));
  CHECK(xi_b_lower_bound(lin, tau, 1.0) == doctest::Approx(0.3));
  CHECK(xi_b(p0, lin) < xi_b_lower_bound(lin, tau, 1.0));
}

TEST_CASE("exit times") {
  const Profile sine(ShiftedSineCoriolis{}, ZeroFlow{});
  const Trajectory edge = integrate(sine, PhasePoint{2.0, 0.3, 0.5, 0.1}, config(ModeId::PoincarePlus, 1));
  CHECK(exit_time(edge, -2.0, 2.0) == 0.0);
  for (const auto& p0 : sample_box(PhaseBox{{-1, -1, 0.3, -1}, {1, 1, 1.5, 1}}, 20, 5)) {
    const Trajectory tr = integrate(sine, p0, config(ModeId::PoincarePlus, 50));
    const auto t = exit_time(tr, -3.0, 3.0);
    REQUIRE(t.has_value());
    CHECK(std::abs(*t - (3.0 - p0.x1) * xi_b(p0, sine) / p0.xi1) < 1e-6);
  }
  const Profile lin(LinearCoriolis{1.0}, ZeroFlow{});
  const Trajectory r = integrate(lin, PhasePoint{0, 1, 0, 1}, config(ModeId::Rossby, 10));
  CHECK(std::abs(*exit_time(r, -1.0, 2.0) - 2.0 * 2.0 / 1.0) < 1e-9);
  CHECK_FALSE(exit_time(r, -1.0, 100.0).has_value());
}

TEST_CASE("trapping classification") {
  const Profile sine(ShiftedSineCoriolis{}, ZeroFlow{});
  const double half_pi = std::acos(0.0);
  CHECK(trapping_classify(sine, PhasePoint{0, half_pi, 0, 0.3}, config(ModeId::Rossby, 50)).kind == TrappingKind::FixedPoint);
  const Profile up(LinearCoriolis{1.0}, ZeroFlow{});
  const Profile down(LinearCoriolis{-1.0}, ZeroFlow{});
  const auto r = trapping_classify(up, PhasePoint{0, 1, 0, 1}, config(ModeId::Rossby, 50));
  CHECK(r.kind == TrappingKind::DriftRight);
  CHECK_FALSE(r.period.has_value());
  CHECK(trapping_classify(down, PhasePoint{0, 1, 0, 1}, config(ModeId::Rossby, 50)).kind == TrappingKind::DriftLeft);
  CHECK_THROWS_AS(trapping_classify(*sine_bump_profile(), PhasePoint{0, 0, 0.3, 0}, config(ModeId::Rossby, 5)), ConfigError);

  // Long-horizon oracle: x2 stays bounded while x1 grows linearly at the reported mean rate.
  for (const PhasePoint& p0 : {PhasePoint{0, 0.5, 0.3, 0.0}, PhasePoint{0, -0.2, -0.6, 0.4}}) {
    const auto v = trapping_classify(up, p0, config(ModeId::Rossby, 100));
    REQUIRE(v.mean_dx1.has_value());
    REQUIRE(v.period.has_value());
    const Trajectory tr = integrate(up, p0, config(ModeId::Rossby, 2000));
    double x2lo = 1e300, x2hi = -1e300;
    for (const auto& q : tr.points) {
      x2lo = std::min(x2lo, q.x2);
      x2hi = std::max(x2hi, q.x2);
    }
    CHECK(x2hi - x2lo < 3.0);
    const double rate = (tr.points.back().x1 - p0.x1) / tr.t_end();
    CHECK(rate == doctest::Approx(*v.mean_dx1).epsilon(0.01));
    CHECK(v.kind == (rate > 0 ? TrappingKind::DriftRight : TrappingKind::DriftLeft));
  }
}

TEST_CASE("Mourre bracket") {
  const auto lin = std::make_shared<const Profile>(LinearCoriolis{1.0}, ZeroFlow{});
  BoxSampler one(PhaseBox{{0, 4, 3, 0}, {0, 4, 3, 0}}, 1);
  CHECK(mourre_bound(lin, one, 1).inf_bracket == doctest::Approx(0.6).epsilon(1e-15));
  BoxSampler flat(PhaseBox{{-1, 0, 1, 0}, {1, 0, 2, 0}}, 1);
  const MourreReport f = mourre_bound(lin, flat, 100);
  CHECK(std::abs(f.inf_bracket - 1.0) < 1e-15);
  CHECK(f.holds);
  const auto sine = std::make_shared<const Profile>(ShiftedSineCoriolis{}, ZeroFlow{});
  BoxSampler k(PhaseBox{{-1, -1, 1, -1}, {1, 1, 2, 1}}, 3);
  const MourreReport r = mourre_bound(sine, k, 4000);
  double scan = 1e300;
  for (int i = 0; i <= 60; ++i)
    for (int j = 0; j <= 60; ++j)
      for (int l = 0; l <= 60; ++l) {
        const PhasePoint p{0, -1 + 2.0 * i / 60, 1 + 1.0 * j / 60, -1 + 2.0 * l / 60};
        scan = std::min(scan, p.xi1 / xi_b(p, *sine));
      }
  CHECK(r.inf_bracket >= scan - 1e-12);
  CHECK(r.inf_bracket <= scan + 0.01);
  CHECK(r.holds);
  CHECK(r.theoretical == doctest::Approx(r.d0 / r.D1));
  BoxSampler neg(PhaseBox{{0, 0, -0.5, 0}, {1, 1, 1, 1}}, 3);
  CHECK_THROWS_AS(mourre_bound(sine, neg, 100), Cond2Violation);
}

TEST_CASE("ensemble: parallel equals serial; bounding boxes; invariance statements") {
  const Profile lin(LinearCoriolis{1.0}, ZeroFlow{});
  const auto starts = sample_box(PhaseBox{{-1, 0.5, 0.2, -0.2}, {1, 1, 0.6, 0.2}}, 40, 42);
  RayConfig c = config(ModeId::Rossby, 50);
  const EnsembleResult a = ensemble_evolve(lin, starts, c, {10, 50});
  const EnsembleResult b = ensemble_evolve_serial(lin, starts, c, {10, 50});
  REQUIRE(a.rays.size() == starts.size());
  for (std::size_t i = 0; i < a.rays.size(); ++i) {
    CHECK(a.rays[i].index == i);
    CHECK(a.rays[i].final == b.rays[i].final);
    CHECK(a.rays[i].steps == b.rays[i].steps);
  }
  CHECK(a.bbox.lo == b.bbox.lo);
  CHECK(a.bbox.hi == b.bbox.hi);
  CHECK(a.min_xi_b == b.min_xi_b);
  for (int d = 0; d < 4; ++d) {
    CHECK(a.bbox_at[0].lo[d] >= a.bbox_at[1].lo[d]);
    CHECK(a.bbox_at[0].hi[d] <= a.bbox_at[1].hi[d]);
  }
  double tau_max = 0.0;
  for (const auto& r : a.rays) tau_max = std::max(tau_max, std::abs(r.tau0));
  CHECK(a.min_xi_b >= xi_b_lower_bound(lin, tau_max, 0.5) - 1e-9);

  const Profile sine(ShiftedSineCoriolis{}, ZeroFlow{});
  const auto pstarts = sample_box(PhaseBox{{-1, -1, 1, -1}, {1, 1, 2, 1}}, 40, 43);
  const EnsembleResult p = ensemble_evolve(sine, pstarts, config(ModeId::PoincarePlus, 50));
  double lo = 1e300, hi = -1e300;
  for (const auto& s : pstarts) {
    lo = std::min(lo, s.xi1);
    hi = std::max(hi, s.xi1);
  }
  CHECK(std::abs(p.bbox.lo[2] - lo) <= 1e-10);
  CHECK(std::abs(p.bbox.hi[2] - hi) <= 1e-10);
  CHECK(p.failures == 0);
}

}  // TEST_SUITE
