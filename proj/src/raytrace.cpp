#include "wavetrace/raytrace.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "wavetrace/errors.hpp"
#include "wavetrace/normal_form.hpp"
#include "wavetrace/symbols.hpp"

namespace wavetrace {

void RayConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) throw ConfigError("ray config: rtol and atol must be > 0");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("ray config: t_max must be > 0");
  if (max_steps == 0) throw ConfigError("ray config: max_steps must be > 0");
  if (!(gap_tol >= 0.0)) throw ConfigError("ray config: gap_tol must be >= 0");
}

// ---------------------------------------------------------------------------
// Vector fields

State hamiltonian_rhs(const Profile& profile, const PhasePoint& p, ModeId mode, double gap_tol) {
  const CoriolisJet c = profile.coriolis(p.x2);
  const double r2 = p.xi1 * p.xi1 + p.xi2 * p.xi2 + c.b * c.b;
  const double r = std::sqrt(r2);
  if (!(r >= gap_tol) || r2 == 0.0) throw DegenerateError("hamiltonian_rhs: <xi>_b below gap tolerance");
  if (mode != ModeId::Rossby) {
    const double s = mode == ModeId::PoincarePlus ? 1.0 : -1.0;
    return {s * p.xi1 / r, s * p.xi2 / r, 0.0, -s * c.b * c.db / r};
  }
  const FlowJet f = profile.flow(p.x1, p.x2);
  const double r4 = r2 * r2;
  return {c.db * (r2 - 2.0 * p.xi1 * p.xi1) / r4 + f.u[0],
          -2.0 * c.db * p.xi1 * p.xi2 / r4 + f.u[1],
          -(f.jac[0][0] * p.xi1 + f.jac[1][0] * p.xi2),
          p.xi1 * (2.0 * c.b * c.db * c.db - c.ddb * r2) / r4 -
              (f.jac[0][1] * p.xi1 + f.jac[1][1] * p.xi2)};
}

State hamiltonian_rhs_symbolic(const std::shared_ptr<const Profile>& profile, const PhasePoint& p,
                               ModeId mode, double gap_tol) {
  if (!(xi_b(p, *profile) >= gap_tol)) {
    throw DegenerateError("hamiltonian_rhs: <xi>_b below gap tolerance");
  }
  const SymbolGradient g = gradient(tau_symbol(profile, mode), p);
  return {g.grad_xi[0].real(), g.grad_xi[1].real(), -g.grad_x[0].real(), -g.grad_x[1].real()};
}

State rossby_rhs_printed(const Profile& profile, const PhasePoint& p) {
  const CoriolisJet c = profile.coriolis(p.x2);
  const double r2 = p.xi1 * p.xi1 + p.xi2 * p.xi2 + c.b * c.b;
  if (r2 == 0.0) throw DegenerateError("rossby_rhs_printed: <xi>_b = 0");
  const double r = std::sqrt(r2);
  const double r4 = r2 * r2;
  const FlowJet f = profile.flow(p.x1, p.x2);
  return {c.db * (r2 - 2.0 * p.xi1 * p.xi1) / r4 + f.u[0],
          -2.0 * c.db * p.xi1 * p.xi2 / r4 + f.u[1],
          -f.jac[0][0] * p.xi1 - f.jac[1][0] * p.xi2,
          p.xi1 * (2.0 * c.b * c.db * c.db - c.ddb * r) / r4 - f.jac[0][1] * p.xi1 -
              f.jac[1][1] * p.xi2};
}

double mode_hamiltonian(const Profile& profile, const PhasePoint& p, ModeId mode) {
  switch (mode) {
    case ModeId::Rossby: return tau_R(profile, p);
    case ModeId::PoincarePlus: return tau_pm(profile, p, 1);
    case ModeId::PoincareMinus: return tau_pm(profile, p, -1);
  }
  return 0.0;
}

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::TMax: return "t_max";
    case StopReason::MaxSteps: return "max_steps";
    case StopReason::DegenerateEvent: return "degenerate_event";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

// Step-size controller constants.
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kFacMin = 0.2;   // h_new >= 0.2 h
constexpr double kFacMax = 10.0;  // h_new <= 10 h

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
  State out = y;
  for (const auto& [coef, k] : terms) {
    for (int i = 0; i < 4; ++i) out[i] += h * coef * (*k)[i];
  }
  return out;
}

struct VectorField {
  const Profile& profile;
  ModeId mode;
  double sign;
  State operator()(const State& y) const {
    const PhasePoint p = PhasePoint::from_array(y);
    const CoriolisJet c = profile.coriolis(p.x2);
    const double r2 = p.xi1 * p.xi1 + p.xi2 * p.xi2 + c.b * c.b;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (r2 == 0.0) return {nan, nan, nan, nan};
    State f = hamiltonian_rhs(profile, p, mode, 0.0);
    if (sign < 0.0) {
      for (double& v : f) v = -v;
    }
    return f;
  }
};

double error_norm(const State& y0, const State& y1, const State& err, double rtol, double atol) {
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double sk = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    acc += (err[i] / sk) * (err[i] / sk);
  }
  return std::sqrt(acc / 4.0);
}

// Starting step from the local scale of the solution and a trial Euler step.
double initial_step(const VectorField& f, const State& y0, const State& f0, double rtol,
                    double atol, double hmax) {
  double dnf = 0.0;
  double dny = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double sk = atol + rtol * std::abs(y0[i]);
    dnf += (f0[i] / sk) * (f0[i] / sk);
    dny += (y0[i] / sk) * (y0[i] / sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
  h = std::min(h, hmax);
  State y1 = y0;
  for (int i = 0; i < 4; ++i) y1[i] += h * f0[i];
  const State f1 = f(y1);
  double der2 = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double sk = atol + rtol * std::abs(y0[i]);
    der2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
  }
  der2 = std::sqrt(der2) / h;
  if (!std::isfinite(der2)) return h;
  const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
  const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3)
                                   : std::pow(0.01 / der12, 1.0 / 5.0);
  return std::min({100.0 * h, h1, hmax});
}

}  // namespace

State DenseSegment::operator()(double t) const {
  const double th = h == 0.0 ? 0.0 : (t - t0) / h;
  const double th1 = 1.0 - th;
  State y;
  for (int i = 0; i < 4; ++i) {
    y[i] = c[0][i] + th * (c[1][i] + th1 * (c[2][i] + th * (c[3][i] + th1 * c[4][i])));
  }
  return y;
}

StopReason integrate_observed(const Profile& profile, const PhasePoint& p0, const RayConfig& cfg,
                              const StepObserver& observer, std::size_t* accepted_out,
                              std::size_t* rejected_out) {
  cfg.validate();
  if (!p0.finite()) throw ConfigError("integrate: non-finite initial point");
  const VectorField f{profile, cfg.hamiltonian, cfg.reverse ? -1.0 : 1.0};
  if (xi_b(p0, profile) < cfg.gap_tol) {
    throw DegenerateError("integrate: initial <xi>_b below gap tolerance");
  }

  State y = p0.to_array();
  State k1 = f(y);
  double t = 0.0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  auto finish = [&](StopReason r) {
    if (accepted_out) *accepted_out = accepted;
    if (rejected_out) *rejected_out = rejected;
    return r;
  };
  if (!observer(t, y, k1, nullptr)) return finish(StopReason::TMax);

  const double hmax = cfg.t_max;
  double h = initial_step(f, y, k1, cfg.rtol, cfg.atol, hmax);
  double facold = 1e-4;
  const double expo1 = 0.2 - kBeta * 0.75;
  bool last_rejected = false;

  while (t < cfg.t_max) {
    if (accepted + rejected >= cfg.max_steps) return finish(StopReason::MaxSteps);
    bool last = false;
    if (t + 1.01 * h >= cfg.t_max) {
      h = cfg.t_max - t;
      last = true;
    }
    if (h <= 1e-14 * std::max(1.0, std::abs(t))) {
      throw StepFailure("integrate: step size underflow");
    }

    const State k2 = f(axpy(y, h, {{a21, &k1}}));
    const State k3 = f(axpy(y, h, {{a31, &k1}, {a32, &k2}}));
    const State k4 = f(axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 = f(axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 = f(axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State y1 = axpy(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    const State k7 = f(y1);
    State err;
    for (int i = 0; i < 4; ++i) {
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }
    const double en = error_norm(y, y1, err, cfg.rtol, cfg.atol);

    if (!std::isfinite(en)) {
      ++rejected;
      h *= kFacMin;
      last_rejected = true;
      continue;
    }

    const double fac11 = std::pow(en, expo1);
    double fac = fac11 / std::pow(facold, kBeta);
    fac = std::clamp(fac / kSafety, 1.0 / kFacMax, 1.0 / kFacMin);
    double hnew = h / fac;

    if (en > 1.0) {
      ++rejected;
      h /= std::min(1.0 / kFacMin, fac11 / kSafety);
      last_rejected = true;
      continue;
    }

    facold = std::max(en, 1e-4);
    ++accepted;
    DenseSegment seg;
    const DenseSegment* seg_ptr = nullptr;
    if (cfg.keep_dense) {
      seg.t0 = t;
      seg.h = h;
      for (int i = 0; i < 4; ++i) {
        const double ydiff = y1[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        seg.c[0][i] = y[i];
        seg.c[1][i] = ydiff;
        seg.c[2][i] = bspl;
        seg.c[3][i] = ydiff - h * k7[i] - bspl;
        seg.c[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                           d7 * k7[i]);
      }
      seg_ptr = &seg;
    }
    t = last ? cfg.t_max : t + h;
    y = y1;
    k1 = k7;
    if (last_rejected) hnew = std::min(hnew, h);
    last_rejected = false;
    h = std::min(hnew, hmax);

    if (!observer(t, y, cfg.reverse ? State{-k1[0], -k1[1], -k1[2], -k1[3]} : k1, seg_ptr)) {
      return finish(StopReason::TMax);
    }
    const PhasePoint p = PhasePoint::from_array(y);
    if (xi_b(p, profile) < cfg.gap_tol) return finish(StopReason::DegenerateEvent);
  }
  return finish(StopReason::TMax);
}

Trajectory integrate(const Profile& profile, const PhasePoint& p0, const RayConfig& cfg) {
  Trajectory tr;
  tr.mode = cfg.hamiltonian;
  auto observer = [&](double t, const State& y, const State& f, const DenseSegment* seg) {
    const PhasePoint p = PhasePoint::from_array(y);
    const double b = profile.b(p.x2);
    tr.times.push_back(t);
    tr.points.push_back(p);
    tr.tau.push_back(mode_hamiltonian(profile, p, cfg.hamiltonian));
    tr.xi1.push_back(p.xi1);
    tr.xi_b.push_back(xi_b(p, profile));
    tr.poincare_inv.push_back(p.xi2 * p.xi2 + b * b);
    tr.dx1.push_back(f[0]);
    if (seg != nullptr) tr.dense.push_back(*seg);
    return true;
  };
  tr.stop = integrate_observed(profile, p0, cfg, observer, &tr.accepted, &tr.rejected);
  return tr;
}

PhasePoint Trajectory::state_at(double t) const {
  if (times.empty()) throw ConfigError("state_at: empty trajectory");
  if (dense.size() + 1 != times.size()) throw ConfigError("state_at: trajectory has no dense output");
  if (t <= times.front()) return points.front();
  if (t >= times.back()) return points.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
  return PhasePoint::from_array(dense[i](t));
}

PhasePoint integrate_rk4(const Profile& profile, const PhasePoint& p0, ModeId mode, double t_end,
                         double h) {
  if (!(h > 0.0) || !(t_end >= 0.0)) throw ConfigError("integrate_rk4: bad step or horizon");
  const VectorField f{profile, mode, 1.0};
  State y = p0.to_array();
  const auto n = static_cast<std::size_t>(std::ceil(t_end / h - 1e-9));
  const double dt = n == 0 ? 0.0 : t_end / static_cast<double>(n);
  for (std::size_t s = 0; s < n; ++s) {
    const State k1 = f(y);
    const State k2 = f(axpy(y, dt, {{0.5, &k1}}));
    const State k3 = f(axpy(y, dt, {{0.5, &k2}}));
    const State k4 = f(axpy(y, dt, {{1.0, &k3}}));
    for (int i = 0; i < 4; ++i) y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return PhasePoint::from_array(y);
}

// ---------------------------------------------------------------------------
// Diagnostics

InvariantReport invariant_report(const Trajectory& traj) {
  InvariantReport rep;
  if (traj.size() == 0) return rep;
  double dmin = traj.dx1.front();
  double dmax = dmin;
  rep.min_xi_b = traj.xi_b.front();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    rep.tau_drift = std::max(rep.tau_drift, std::abs(traj.tau[i] - traj.tau.front()));
    rep.xi1_drift = std::max(rep.xi1_drift, std::abs(traj.xi1[i] - traj.xi1.front()));
    rep.poincare_inv_drift =
        std::max(rep.poincare_inv_drift, std::abs(traj.poincare_inv[i] - traj.poincare_inv.front()));
    rep.min_xi_b = std::min(rep.min_xi_b, traj.xi_b[i]);
    dmin = std::min(dmin, traj.dx1[i]);
    dmax = std::max(dmax, traj.dx1[i]);
  }
  rep.dx1_spread = dmax - dmin;
  return rep;
}

EtaBeta validate_eta(const Profile& profile, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("validate_eta: eta must be > 0");
  EtaBeta out{eta, std::numeric_limits<double>::infinity()};
  if (const auto* lin = std::get_if<LinearCoriolis>(&profile.coriolis_spec())) {
    if (lin->beta == 0.0) throw ProfileAssumptionError("b vanishes identically: no (eta, beta) pair");
    out.beta = std::abs(lin->beta);
    return out;
  }
  // One period for periodic b; otherwise a wide window, beyond which the catalogue
  // profiles are monotone or saturated.
  double lo = -50.0;
  double hi = 50.0;
  if (const auto period = profile.coriolis_period()) {
    lo = 0.0;
    hi = *period;
  }
  constexpr int kScan = 200000;
  for (int i = 0; i <= kScan; ++i) {
    const double x = lo + (hi - lo) * i / kScan;
    const CoriolisJet c = profile.coriolis(x);
    if (std::abs(c.b) < eta) out.beta = std::min(out.beta, std::abs(c.db));
  }
  if (!profile.coriolis_period() && std::abs(profile.b(lo)) < eta) out.beta = 0.0;
  if (!profile.coriolis_period() && std::abs(profile.b(hi)) < eta) out.beta = 0.0;
  if (!(out.beta > 1e-12)) {
    throw ProfileAssumptionError("no beta > 0 with |b| < eta => |b'| >= beta; reduce eta");
  }
  return out;
}

double xi_b_lower_bound(const Profile& profile, double tau_max, double eta) {
  validate_eta(profile, eta);
  const double denom = std::abs(tau_max) + profile.u_inf_norm() * eta;
  const double ratio = denom == 0.0 ? 1.0 : std::min(1.0, eta / denom);
  return eta * ratio;
}

std::optional<double> exit_time(const Trajectory& traj, double u_minus, double u_plus) {
  if (traj.size() == 0) return std::nullopt;
  const auto outside = [&](double x1) { return x1 < u_minus || x1 > u_plus; };
  const double x0 = traj.points.front().x1;
  if (!(x0 > u_minus && x0 < u_plus)) return 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    if (!outside(traj.points[i].x1)) continue;
    double a = traj.times[i - 1];
    double b = traj.times[i];
    if (traj.dense.size() + 1 != traj.size()) return b;
    const DenseSegment& seg = traj.dense[i - 1];
    while (b - a > 1e-12 * std::max(1.0, b)) {
      const double m = 0.5 * (a + b);
      if (outside(seg(m)[0])) {
        b = m;
      } else {
        a = m;
      }
    }
    return 0.5 * (a + b);
  }
  return std::nullopt;
}

const char* trapping_kind_name(TrappingKind k) {
  switch (k) {
    case TrappingKind::Trapped: return "trapped";
    case TrappingKind::DriftRight: return "drift_right";
    case TrappingKind::DriftLeft: return "drift_left";
    case TrappingKind::FixedPoint: return "fixed_point";
    case TrappingKind::NoPeriodFound: return "no_period_found";
  }
  return "?";
}

TrappingVerdict trapping_classify(const Profile& profile, const PhasePoint& p0,
                                  const RayConfig& cfg_in, double tol_trap, double return_tol) {
  if (!profile.flow_is_zero()) throw ConfigError("trapping_classify: requires zero flow");
  RayConfig cfg = cfg_in;
  cfg.hamiltonian = ModeId::Rossby;
  cfg.keep_dense = true;
  cfg.reverse = false;
  TrappingVerdict v;
  const State f0 = hamiltonian_rhs(profile, p0, ModeId::Rossby, cfg.gap_tol);
  const double fnorm = std::sqrt(f0[0] * f0[0] + f0[1] * f0[1] + f0[2] * f0[2] + f0[3] * f0[3]);
  if (fnorm < 1e-12) {
    v.kind = TrappingKind::FixedPoint;
    return v;
  }
  const double vx2 = f0[1];
  const double vxi2 = f0[3];
  const double vnorm = std::hypot(vx2, vxi2);
  // Equilibrium of the (x2, xi2) motion: uniform motion along x1 only.
  if (p0.xi1 == 0.0 || vnorm < 1e-12) {
    if (std::abs(f0[0]) < 1e-12) {
      v.kind = TrappingKind::FixedPoint;
    } else {
      v.kind = f0[0] > 0.0 ? TrappingKind::DriftRight : TrappingKind::DriftLeft;
    }
    return v;
  }

  // Signed distance to the section through p0 orthogonal to its (x2, xi2) velocity.
  const auto section = [&](const State& y) {
    return ((y[1] - p0.x2) * vx2 + (y[3] - p0.xi2) * vxi2) / vnorm;
  };
  // Leave the start neighbourhood before looking for returns.
  const double leave = std::max(100.0 * return_tol, 1e-4);
  bool left = false;
  std::optional<double> period;
  double prev_s = 0.0;
  auto observer = [&](double t, const State& y, const State&, const DenseSegment* seg) {
    const double s = section(y);
    const double dist = std::hypot(y[1] - p0.x2, y[3] - p0.xi2);
    if (seg == nullptr) {
      prev_s = s;
      return true;
    }
    if (!left) {
      left = dist > leave;
      prev_s = s;
      return true;
    }
    if (prev_s < 0.0 && s >= 0.0) {
      double a = seg->t0;
      double b = t;
      for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, b); ++it) {
        const double m = 0.5 * (a + b);
        if (section((*seg)(m)) < 0.0) {
          a = m;
        } else {
          b = m;
        }
      }
      const State yr = (*seg)(b);
      if (std::hypot(yr[1] - p0.x2, yr[3] - p0.xi2) < return_tol) {
        period = b;
        return false;
      }
    }
    prev_s = s;
    return true;
  };
  // Record x1 at the return through a second pass on the same dense data.
  Trajectory tr;
  tr.mode = ModeId::Rossby;
  auto recording = [&](double t, const State& y, const State& f, const DenseSegment* seg) {
    tr.times.push_back(t);
    tr.points.push_back(PhasePoint::from_array(y));
    tr.dx1.push_back(f[0]);
    if (seg != nullptr) tr.dense.push_back(*seg);
    return observer(t, y, f, seg);
  };
  integrate_observed(profile, p0, cfg, recording);
  if (!period) {
    v.kind = TrappingKind::NoPeriodFound;
    return v;
  }
  // Fill the remaining logs so state_at works.
  tr.tau.assign(tr.times.size(), 0.0);
  tr.xi1 = tr.tau;
  tr.xi_b = tr.tau;
  tr.poincare_inv = tr.tau;
  const double x1_end = tr.state_at(*period).x1;
  v.period = *period;
  v.mean_dx1 = (x1_end - p0.x1) / *period;
  if (std::abs(*v.mean_dx1) < tol_trap) {
    v.kind = TrappingKind::Trapped;
  } else {
    v.kind = *v.mean_dx1 > 0.0 ? TrappingKind::DriftRight : TrappingKind::DriftLeft;
  }
  return v;
}

MourreReport mourre_bound(const std::shared_ptr<const Profile>& profile, BoxSampler& sampler,
                          std::size_t n) {
  if (n == 0) throw ConfigError("mourre_bound: no samples");
  const ScalarSymbol tau_plus = tau_pm_symbol(profile, 1);
  const ScalarSymbol x1 = sym::x1();
  MourreReport rep;
  rep.inf_bracket = std::numeric_limits<double>::infinity();
  rep.d0 = std::numeric_limits<double>::infinity();
  rep.D0 = std::numeric_limits<double>::infinity();
  rep.D1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const PhasePoint p = sampler.next();
    if (!(p.xi1 > 0.0)) throw Cond2Violation("mourre_bound: sample with xi1 <= 0");
    const double br = poisson_bracket(tau_plus, x1, p).real();
    const double r = xi_b(p, *profile);
    if (br < rep.inf_bracket) {
      rep.inf_bracket = br;
      rep.argmin = p;
    }
    rep.d0 = std::min(rep.d0, p.xi1);
    rep.D0 = std::min(rep.D0, r);
    rep.D1 = std::max(rep.D1, r);
  }
  rep.theoretical = rep.d0 / rep.D1;
  rep.stated_constant = rep.d0 / rep.D0;
  rep.holds = rep.inf_bracket >= rep.theoretical - 1e-12;
  return rep;
}

// ---------------------------------------------------------------------------
// Ensembles

Bounds4 Bounds4::empty() {
  const double inf = std::numeric_limits<double>::infinity();
  return {{inf, inf, inf, inf}, {-inf, -inf, -inf, -inf}};
}

void Bounds4::include(const State& y) {
  for (int i = 0; i < 4; ++i) {
    lo[i] = std::min(lo[i], y[i]);
    hi[i] = std::max(hi[i], y[i]);
  }
}

void Bounds4::merge(const Bounds4& o) {
  include(o.lo);
  include(o.hi);
}

namespace {

struct RayWork {
  RayOutcome outcome;
  Bounds4 bbox = Bounds4::empty();
  std::vector<Bounds4> bbox_at;
};

RayWork run_ray(const Profile& profile, const PhasePoint& p0, std::size_t index,
                const RayConfig& cfg, const std::vector<double>& horizons) {
  RayWork w;
  w.bbox_at.assign(horizons.size(), Bounds4::empty());
  RayOutcome& o = w.outcome;
  o.index = index;
  o.start = p0;
  o.final = p0;
  RayConfig c = cfg;
  c.keep_dense = false;
  try {
    o.tau0 = mode_hamiltonian(profile, p0, cfg.hamiltonian);
    o.min_xi_b = xi_b(p0, profile);
    auto observer = [&](double t, const State& y, const State&, const DenseSegment*) {
      const PhasePoint p = PhasePoint::from_array(y);
      w.bbox.include(y);
      for (std::size_t k = 0; k < horizons.size(); ++k) {
        if (t <= horizons[k]) w.bbox_at[k].include(y);
      }
      o.final = p;
      o.t_end = t;
      o.min_xi_b = std::min(o.min_xi_b, xi_b(p, profile));
      o.tau_drift = std::max(o.tau_drift,
                             std::abs(mode_hamiltonian(profile, p, cfg.hamiltonian) - o.tau0));
      return true;
    };
    o.stop = integrate_observed(profile, p0, c, observer, &o.steps);
  } catch (const std::exception& e) {
    o.failed = true;
    o.error = e.what();
  }
  return w;
}

EnsembleResult assemble(std::vector<RayWork>& work, const std::vector<double>& horizons) {
  EnsembleResult res;
  res.horizons = horizons;
  res.bbox = Bounds4::empty();
  res.bbox_at.assign(horizons.size(), Bounds4::empty());
  res.min_xi_b = std::numeric_limits<double>::infinity();
  res.rays.reserve(work.size());
  for (RayWork& w : work) {
    if (w.outcome.failed) {
      ++res.failures;
    } else {
      res.bbox.merge(w.bbox);
      for (std::size_t k = 0; k < horizons.size(); ++k) res.bbox_at[k].merge(w.bbox_at[k]);
      res.min_xi_b = std::min(res.min_xi_b, w.outcome.min_xi_b);
    }
    res.rays.push_back(std::move(w.outcome));
  }
  std::sort(res.rays.begin(), res.rays.end(),
            [](const RayOutcome& a, const RayOutcome& b) { return a.index < b.index; });
  return res;
}

}  // namespace

EnsembleResult ensemble_evolve_serial(const Profile& profile, const std::vector<PhasePoint>& starts,
                                      const RayConfig& cfg, const std::vector<double>& horizons) {
  cfg.validate();
  std::vector<RayWork> work(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    work[i] = run_ray(profile, starts[i], i, cfg, horizons);
  }
  return assemble(work, horizons);
}

EnsembleResult ensemble_evolve(const Profile& profile, const std::vector<PhasePoint>& starts,
                               const RayConfig& cfg, const std::vector<double>& horizons) {
  cfg.validate();
  std::vector<RayWork> work(starts.size());
  const auto n = static_cast<std::ptrdiff_t>(starts.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    work[k] = run_ray(profile, starts[k], k, cfg, horizons);
  }
  return assemble(work, horizons);
}

}  // namespace wavetrace
