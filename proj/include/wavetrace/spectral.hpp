#pragma once

// Principal symbol A0 of the rotating shallow-water propagator, its
// closed-form eigendecomposition, and a generic eigensolver used as oracle.
//
//   A0(x, xi) = [ 0    xi1   xi2 ]        A1(x, xi) = (u(x) . xi) I
//               [ xi1  0    -i b ]
//               [ xi2  i b   0   ]
//
// Spectrum {0, +<xi>_b, -<xi>_b}, always in that (R, +, -) order.
//
// Gauge. The Rossby vector is u_R = (b, i xi2, -i xi1) / <xi>_b. The
// Poincare vectors use one of two analytic branches:
//   ThirdReal: (lam xi2 - i b xi1, xi1 xi2 - i lam b, xi2^2 + b^2) / (sqrt2 r sqrt(xi2^2 + b^2))
//   FirstReal: (lam^2 - b^2, lam xi1 - i b xi2, i b xi1 + lam xi2) / (sqrt2 r |xi|)
// with lam = +-r, r = <xi>_b. ThirdReal is used wherever xi2^2 + b^2 >= kGaugeCut r^2;
// the hypersurface xi2^2 + b^2 = kGaugeCut r^2 is the gauge cut, across which the
// Poincare vectors jump by a phase. Both branches are smooth (real analytic)
// on their own side of it.

#include <Eigen/Dense>
#include <array>
#include <memory>

#include "wavetrace/phase_point.hpp"
#include "wavetrace/profile.hpp"
#include "wavetrace/sampling.hpp"
#include "wavetrace/symbols.hpp"

namespace wavetrace {

using Matrix3c = Eigen::Matrix3cd;

inline constexpr double kGaugeCut = 0.01;

struct MatrixSymbolValue {
  Matrix3c entries;
  PhasePoint point;
};

MatrixSymbolValue eval_A0(const Profile& profile, const PhasePoint& p);
MatrixSymbolValue eval_A1(const Profile& profile, const PhasePoint& p);

enum class GaugeBranch { ThirdReal, FirstReal };

GaugeBranch gauge_branch(const Profile& profile, const PhasePoint& p);

struct EigenFrame {
  std::array<double, 3> deltas{};  // (delta_R, delta_+, delta_-)
  Matrix3c vectors;                // columns u_R, u_+, u_-
  double gap = 0.0;
  GaugeBranch branch = GaugeBranch::ThirdReal;

  Eigen::Vector3cd vector(ModeId m) const { return vectors.col(mode_index(m)); }
  double delta(ModeId m) const { return deltas[mode_index(m)]; }
};

/// Throws DegenerateError when <xi>_b < gap_tol.
EigenFrame eigendecompose(const Profile& profile, const PhasePoint& p,
                          double gap_tol = kDefaultGapTol);

struct HermitianEigen {
  Eigen::Vector3d values;  // ascending
  Matrix3c vectors;
};

/// Generic iterative eigensolver, independent of the closed forms above.
/// Throws NotHermitian if max |M - M^*| > 1e-10.
HermitianEigen hermitian_eig_oracle(const Matrix3c& m);

struct GapReport {
  double inf_gap = 0.0;
  PhasePoint argmin;
};

GapReport gap_on_set(const Profile& profile, BoxSampler& sampler, std::size_t n);

using SymbolMatrix = std::array<std::array<ScalarSymbol, 3>, 3>;

/// A0 as symbol trees.
SymbolMatrix a0_symbols(const std::shared_ptr<const Profile>& profile);
/// A1 = (u . xi) I as symbol trees.
SymbolMatrix a1_symbols(const std::shared_ptr<const Profile>& profile);

/// Eigenvector components as symbol trees on one gauge branch: result[j][n] is
/// component j of the eigenvector of mode n (the matrix U, columns = modes).
SymbolMatrix eigenframe_symbols(const std::shared_ptr<const Profile>& profile, GaugeBranch branch);

/// The diagonal symbol matrix D0 = diag(0, <xi>_b, -<xi>_b).
SymbolMatrix d0_symbols(const std::shared_ptr<const Profile>& profile);

}  // namespace wavetrace
