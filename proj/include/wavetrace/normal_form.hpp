#pragma once

// First-order diagonalization: mode Hamiltonians, the diagonal subprincipal
// symbol of U* A U computed from eigenvector brackets, the homological
// (normal-form) solve and the first unitarity correction.

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <vector>

#include "wavetrace/phase_point.hpp"
#include "wavetrace/profile.hpp"
#include "wavetrace/sampling.hpp"
#include "wavetrace/spectral.hpp"
#include "wavetrace/symbols.hpp"

namespace wavetrace {

/// +-<xi>_b. sign must be +1 or -1.
double tau_pm(const Profile& profile, const PhasePoint& p, int sign);

/// xi1 b' / <xi>_b^2 + u . xi. Throws DegenerateError at <xi>_b = 0.
double tau_R(const Profile& profile, const PhasePoint& p);

ScalarSymbol tau_pm_symbol(const std::shared_ptr<const Profile>& profile, int sign);
ScalarSymbol tau_R_symbol(const std::shared_ptr<const Profile>& profile);
ScalarSymbol tau_symbol(const std::shared_ptr<const Profile>& profile, ModeId mode);

struct SubprincipalReport {
  PhasePoint point;
  ModeId mode = ModeId::Rossby;
  complex bracket_part;  // sum_jk Im(conj(u_j){a_jk,u_k}) + a_jk{conj(u_j),u_k}/(2i)
  complex flow_part;     // (U* A1 U)_nn
  complex total;         // bracket_part + flow_part
  /// -delta_n (1/2i) sum_j {conj(u_j), u_j}: the diagonal of -(D0 I1 + I1 D0)/2.
  /// Zero for the Rossby mode; reported separately for the Poincare modes.
  complex normalization_part;
  /// No closed-form reference exists for this mode.
  bool no_reference = false;
  GaugeBranch branch = GaugeBranch::ThirdReal;
};

/// Evaluates the diagonal subprincipal formula from symbol trees of the
/// eigenframe. Trees are built once per instance; evaluation is const and
/// thread safe.
class SubprincipalEvaluator {
 public:
  explicit SubprincipalEvaluator(std::shared_ptr<const Profile> profile,
                                 double gap_tol = kDefaultGapTol);

  /// `phase` multiplies the eigenvector by the constant exp(i phase).
  SubprincipalReport evaluate(const PhasePoint& p, ModeId mode, double phase = 0.0) const;

  const std::shared_ptr<const Profile>& profile() const { return profile_; }

 private:
  std::shared_ptr<const Profile> profile_;
  double gap_tol_;
  SymbolMatrix a0_;
  std::array<SymbolMatrix, 2> frames_;  // indexed by GaugeBranch
};

SubprincipalReport subprincipal_diagonal(const std::shared_ptr<const Profile>& profile,
                                         const PhasePoint& p, ModeId mode,
                                         double gap_tol = kDefaultGapTol);

struct HomologicalSolution {
  Eigen::MatrixXcd W0;
  Eigen::VectorXd D1;
};

/// Solves [diag(deltas), W0] + Delta1 = diag(D1) with W0 zero on the diagonal:
/// W0_ij = Delta1_ij / (delta_j - delta_i). Throws DegenerateError if two
/// deltas are closer than gap_tol, NotHermitian if Delta1 is not Hermitian to 1e-10.
HomologicalSolution homological_solve(const Eigen::VectorXd& deltas, const Eigen::MatrixXcd& Delta1,
                                      double gap_tol = kDefaultGapTol);

/// V0 = -U I1 / 2, so that (U + eps V0)^*(U + eps V0) = I + O(eps^2) when U^*U = I + eps I1.
Eigen::MatrixXcd unitarity_correction(const Eigen::MatrixXcd& I1, const Eigen::MatrixXcd& U);

struct HamiltonianRow {
  PhasePoint point;
  complex bracket_part;
  complex flow_part;
  complex total;
  double closed_form = 0.0;
  double abs_error = 0.0;
  double tau_plus = 0.0;
  double tau_minus = 0.0;
};

std::vector<HamiltonianRow> hamiltonian_sweep(const std::shared_ptr<const Profile>& profile,
                                              const std::vector<PhasePoint>& points,
                                              double gap_tol = kDefaultGapTol);

/// max |subprincipal total (Rossby) - tau_R| over n sampled points.
double verify_tau_R(const std::shared_ptr<const Profile>& profile, BoxSampler& sampler,
                    std::size_t n, double gap_tol = kDefaultGapTol);

}  // namespace wavetrace
