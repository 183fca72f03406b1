#pragma once

// Bicharacteristics of the mode Hamiltonians tau_R and tau_+-, with
// invariant logging, escape and trapping diagnostics, the Mourre bracket
// bound and ensemble propagation.

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wavetrace/parallel.hpp"
#include "wavetrace/phase_point.hpp"
#include "wavetrace/profile.hpp"
#include "wavetrace/sampling.hpp"

namespace wavetrace {

using State = std::array<double, 4>;

struct RayConfig {
  double rtol = 1e-10;
  double atol = 1e-12;
  double t_max = 10.0;
  std::size_t max_steps = 5'000'000;
  ModeId hamiltonian = ModeId::Rossby;
  double gap_tol = kDefaultGapTol;
  /// Integrate the negated vector field (time reversal).
  bool reverse = false;
  /// Keep per-step interpolation coefficients (needed by exit_time / state_at).
  bool keep_dense = true;

  void validate() const;
};

/// (dx1/dt, dx2/dt, dxi1/dt, dxi2/dt) = (grad_xi tau, -grad_x tau) for the closed-form
/// Hamiltonian of `mode`, differentiated by hand. Throws DegenerateError at <xi>_b < gap_tol.
State hamiltonian_rhs(const Profile& profile, const PhasePoint& p, ModeId mode,
                      double gap_tol = kDefaultGapTol);

/// Same vector field from the exact gradient of the Hamiltonian's symbol tree.
State hamiltonian_rhs_symbolic(const std::shared_ptr<const Profile>& profile, const PhasePoint& p,
                               ModeId mode, double gap_tol = kDefaultGapTol);

/// The Rossby system with the last line in its commonly printed form,
///   dxi2/dt = xi1 (2 b b'^2 - b'' <xi>_b) / <xi>_b^4 - d2u . xi,
/// which differs from -d tau_R / d x2 whenever b'' != 0. Kept for comparison only.
State rossby_rhs_printed(const Profile& profile, const PhasePoint& p);

enum class StopReason { TMax, MaxSteps, DegenerateEvent };
const char* stop_reason_name(StopReason r);

/// Fourth-order continuous extension of one 5(4) step, valid on [t0, t0 + h].
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  std::array<State, 5> c{};
  State operator()(double t) const;
};

class Trajectory {
 public:
  std::vector<double> times;
  std::vector<PhasePoint> points;
  std::vector<double> tau;
  std::vector<double> xi1;
  std::vector<double> xi_b;
  std::vector<double> poincare_inv;  // xi2^2 + b(x2)^2
  std::vector<double> dx1;           // dx1/dt from the vector field
  std::vector<DenseSegment> dense;   // dense[i] covers [times[i], times[i+1]]
  ModeId mode = ModeId::Rossby;
  StopReason stop = StopReason::TMax;
  std::size_t accepted = 0;
  std::size_t rejected = 0;

  std::size_t size() const { return times.size(); }
  double t_end() const { return times.empty() ? 0.0 : times.back(); }
  /// Dense-output state; requires keep_dense. Clamped to [0, t_end].
  PhasePoint state_at(double t) const;
};

/// Called once for the initial point and after every accepted step with the
/// new time, state, vector field at the state, and the step's interpolant
/// (nullptr for the initial call). Returning false stops the integration.
using StepObserver =
    std::function<bool(double t, const State& y, const State& f, const DenseSegment* seg)>;

/// Dormand-Prince 5(4) with PI step control and FSAL; stops at t_max, max_steps, or
/// when <xi>_b < gap_tol (flagged as StopReason::DegenerateEvent). Throws
/// StepFailure on step-size underflow.
StopReason integrate_observed(const Profile& profile, const PhasePoint& p0, const RayConfig& cfg,
                              const StepObserver& observer, std::size_t* accepted = nullptr,
                              std::size_t* rejected = nullptr);

Trajectory integrate(const Profile& profile, const PhasePoint& p0, const RayConfig& cfg);

/// Classic RK4 at a fixed step, for reference solutions in tests and tools.
PhasePoint integrate_rk4(const Profile& profile, const PhasePoint& p0, ModeId mode, double t_end,
                         double h);

/// Hamiltonian value of `mode` at p.
double mode_hamiltonian(const Profile& profile, const PhasePoint& p, ModeId mode);

struct InvariantReport {
  double tau_drift = 0.0;
  double xi1_drift = 0.0;
  double poincare_inv_drift = 0.0;
  double dx1_spread = 0.0;  // max - min of logged dx1/dt
  double min_xi_b = 0.0;
};

InvariantReport invariant_report(const Trajectory& traj);

struct EtaBeta {
  double eta = 0.0;
  double beta = 0.0;  // +inf when |b| >= eta everywhere
};

/// Checks by dense scan that |b(x2)| < eta implies |b'(x2)| >= beta > 0 and returns the
/// largest such beta. Throws ProfileAssumptionError if no positive beta exists.
EtaBeta validate_eta(const Profile& profile, double eta);

/// eta * min(1, eta / (tau_max + |u|_inf eta)) after validate_eta.
double xi_b_lower_bound(const Profile& profile, double tau_max, double eta);

/// First time x1 leaves [u_minus, u_plus]; 0 if x1(0) is not strictly inside.
/// Located by bisection on the dense output to 1e-12 in t.
std::optional<double> exit_time(const Trajectory& traj, double u_minus, double u_plus);

enum class TrappingKind { Trapped, DriftRight, DriftLeft, FixedPoint, NoPeriodFound };
const char* trapping_kind_name(TrappingKind k);

struct TrappingVerdict {
  TrappingKind kind = TrappingKind::NoPeriodFound;
  std::optional<double> period;
  std::optional<double> mean_dx1;
};

/// Zero-flow Rossby rays only (ConfigError otherwise). The (x2, xi2) period is found by
/// the first return to the section through p0 transverse to its (x2, xi2) velocity,
/// crossed in the same direction and within return_tol of the start.
TrappingVerdict trapping_classify(const Profile& profile, const PhasePoint& p0,
                                  const RayConfig& cfg, double tol_trap = 1e-6,
                                  double return_tol = 1e-6);

struct MourreReport {
  double inf_bracket = 0.0;
  PhasePoint argmin;
  double d0 = 0.0;  // min sampled xi1
  double D0 = 0.0;  // min sampled <xi>_b
  double D1 = 0.0;  // max sampled <xi>_b
  double theoretical = 0.0;     // d0 / D1
  double stated_constant = 0.0; // d0 / D0, as sometimes quoted; not implied by the bracket
  bool holds = false;           // inf_bracket >= theoretical - 1e-12
};

/// {tau_+, x1} = xi1 / <xi>_b over n sampled points. Throws Cond2Violation if a
/// sample has xi1 <= 0.
MourreReport mourre_bound(const std::shared_ptr<const Profile>& profile, BoxSampler& sampler,
                          std::size_t n);

struct RayOutcome {
  std::size_t index = 0;
  PhasePoint start;
  PhasePoint final;
  double t_end = 0.0;
  StopReason stop = StopReason::TMax;
  bool failed = false;
  std::string error;
  double tau0 = 0.0;
  double tau_drift = 0.0;
  double min_xi_b = 0.0;
  std::size_t steps = 0;
};

struct Bounds4 {
  State lo;
  State hi;
  static Bounds4 empty();
  void include(const State& y);
  void merge(const Bounds4& o);
};

struct EnsembleResult {
  std::vector<RayOutcome> rays;  // sorted by index
  Bounds4 bbox;                  // over all rays and all accepted steps
  /// bbox restricted to t <= horizons[k], for each requested horizon.
  std::vector<double> horizons;
  std::vector<Bounds4> bbox_at;
  double min_xi_b = 0.0;
  std::size_t failures = 0;
};

/// Integrates every start point; per-ray failures are recorded, not thrown.
/// Parallel over rays (OpenMP); WAVETRACE_THREADS caps the worker count.
EnsembleResult ensemble_evolve(const Profile& profile, const std::vector<PhasePoint>& starts,
                               const RayConfig& cfg, const std::vector<double>& horizons = {});

/// Serial reference for ensemble_evolve; results are identical.
EnsembleResult ensemble_evolve_serial(const Profile& profile, const std::vector<PhasePoint>& starts,
                                      const RayConfig& cfg,
                                      const std::vector<double>& horizons = {});

}  // namespace wavetrace
