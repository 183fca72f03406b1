#pragma once

// Weyl quantization on the periodic torus [0, L)^2 sampled by an n x n grid.
//
// Kernel of Op(a):
//   K_ij = n^-2 sum_kappa exp(2 pi i kappa.(i - j)/n) a(mid_ij, eps 2 pi kappa / L),
// kappa in {-n/2, ..., n/2 - 1}^2, with the midpoint taken on the doubled grid at
// half-index 2j + delta, delta = i - j wrapped into [-n/2, n/2). When a component of
// delta equals -n/2 the two midpoints x_j +- L/4 are equally close and their values
// are averaged, which keeps Op(a) Hermitian for real a.
//
// Grid functions are row-major over (x1, x2): index i1 * n + i2. Vector-valued
// functions stack their components: [v0 | v1 | v2].

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "wavetrace/normal_form.hpp"
#include "wavetrace/profile.hpp"
#include "wavetrace/spectral.hpp"
#include "wavetrace/symbols.hpp"

namespace wavetrace {

struct Grid {
  int n = 16;
  double L = 6.283185307179586;
  double eps = 0.2;

  /// Throws ConfigError unless n is a power of two >= 8, L > 0, eps in (0, 1).
  void validate() const;
  double h() const { return L / n; }
  int size() const { return n * n; }
  double x(int i) const { return i * h(); }
  /// Momentum of frequency index kappa in [-n/2, n/2).
  double xi(int kappa) const;
  /// Fewer than two grid points per packet width sqrt(eps) or frequency cells per
  /// momentum width: results are computed but flagged.
  bool under_resolved() const;
};

enum class OperatorKind { Multiplication, FourierMultiplier, WeylGeneric, Assembled };
const char* operator_kind_name(OperatorKind k);

struct GridFunction {
  Grid grid;
  int components = 1;
  Eigen::VectorXcd values;

  /// Discrete L2 norm: sqrt(sum |v|^2 h^2).
  double norm() const;
  void normalize();
};

struct GridOperator {
  Grid grid;
  OperatorKind kind = OperatorKind::WeylGeneric;
  int components = 1;
  Eigen::MatrixXcd matrix;

  GridFunction apply(const GridFunction& u) const;
};

/// Tabulates the symbol on the doubled grid and transforms over frequency.
/// Parallel over midpoints and rows.
GridOperator weyl_quantize_scalar(const ScalarSymbol& a, const Grid& grid);
/// Direct O(n^6) sum of the kernel formula; serial, for reference and tests.
GridOperator weyl_quantize_scalar_reference(const ScalarSymbol& a, const Grid& grid);

GridOperator weyl_quantize_matrix(const SymbolMatrix& entries, const Grid& grid);

/// Multiplication by f(x) and the multiplier xi_j, built without the Weyl kernel.
GridOperator multiplication_operator(const Grid& grid, const std::vector<double>& f);
GridOperator fourier_multiplier(const Grid& grid, int direction);

/// Rejects profiles that cannot live on the torus (ProfileBoxMismatch).
void require_box_periodic(const Profile& profile, const Grid& grid);

/// The full propagator with the i-prefactor absorbed, assembled from multiplication
/// operators and Fourier multipliers:
///   [ eps S     F1                     F2                    ]
///   [ F1        eps S                  -i M_b - i eps^2 w/2  ]
///   [ F2        i M_b + i eps^2 w/2    eps S                 ]
/// F_j = Op(xi_j), S = sum_j (M_uj F_j + F_j M_uj)/2 = Op(u . xi), w = d1u2 - d2u1.
/// The eps^2 zero-order entries are the Hermitian part of the first-order flow terms.
GridOperator build_A_exact(const Profile& profile, const Grid& grid);

/// Largest singular value. Hermitian input goes through a symmetric eigensolver.
double operator_norm(const Eigen::MatrixXcd& m);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Picks the gauge branch valid on every (midpoint, frequency) pair of the grid;
/// throws DomainError if the gauge cut crosses the sampled set.
GaugeBranch grid_gauge_branch(const Profile& profile, const Grid& grid);

struct DiagonalizationStudy {
  std::vector<double> eps;
  std::vector<double> r_diag;          // ||U0* A U0 - Op(D0)||
  std::vector<double> r_diag_offblock; // same, diagonal mode blocks removed
  std::vector<double> r_unit;          // ||U0* U0 - I||
  std::vector<double> r2;              // ||(U0 + eps V0)*(U0 + eps V0) - I||, V0 = -U0 I1 / 2
  std::vector<double> rossby_packet;   // <u, Delta1_RR u> for a packet at (x0, xi0)
  std::vector<double> rossby_quantized; // <u, Op(tau_R) u>, same packet
  std::vector<double> rossby_expected; // tau_R(x0, xi0)
  // The same three residuals compressed to grid functions whose spectrum keeps
  // band_margin modes away from the Nyquist edge. The discrete frequency set wraps
  // there, so any symbol that is not periodic in xi jumps across it; the jump
  // produces a residual that the continuum calculus does not have.
  std::vector<double> r_diag_band;
  std::vector<double> r_unit_band;
  std::vector<double> r2_band;
  double slope_diag = 0.0;
  double slope_diag_offblock = 0.0;
  double slope_unit = 0.0;
  double slope_r2 = 0.0;
  double slope_diag_band = 0.0;
  double slope_unit_band = 0.0;
  double slope_r2_band = 0.0;
  bool under_resolved = false;
};

struct StudyOptions {
  int n = 16;
  double L = 6.283185307179586;
  std::vector<double> eps_list{0.4, 0.2, 0.1};
  /// Packet center as a fraction of L, and its momentum.
  std::array<double, 2> packet_x_frac{0.5, 0.5};
  std::array<double, 2> packet_xi{0.2, 0.1};
  bool rossby_packet = true;
  /// Band-limited residuals drop frequencies within this many modes of the
  /// Nyquist edge (per direction); 0 disables them.
  int band_margin = 3;
};

/// Operator-level first-order diagonalization residuals and their scaling in eps.
DiagonalizationStudy diagonalization_study(const std::shared_ptr<const Profile>& profile,
                                           const StudyOptions& opts);

struct ResidualReport {
  std::vector<double> eps;
  std::vector<double> r_diag;
  std::vector<double> r_unit;
  double slope_diag = 0.0;
  double slope_unit = 0.0;
};

struct CorrectedReport {
  std::vector<double> eps;
  std::vector<double> r2;
  double slope = 0.0;
};

ResidualReport residual_diag(const std::shared_ptr<const Profile>& profile, const StudyOptions& opts);
CorrectedReport unitarity_corrected_residual(const std::shared_ptr<const Profile>& profile,
                                             const StudyOptions& opts);

/// Periodized coherent state (pi eps)^(-1/2) exp(i xi0.(x - x0)/eps) exp(-|x - x0|^2 / (2 eps)),
/// normalized in the discrete norm. Throws MarginError if x0 is closer than 3 sqrt(eps)
/// to the box edge.
GridFunction gaussian_packet(const Grid& grid, const std::array<double, 2>& x0,
                             const std::array<double, 2>& xi0);

/// Restriction of a (1- or 3-component) operator to the span of the Fourier modes
/// with |kappa_d| <= n/2 - margin in both directions, expressed in that basis.
Eigen::MatrixXcd band_compress(const Eigen::MatrixXcd& m, const Grid& grid, int components, int margin);

/// Embeds a scalar function as one component of a 3-component function.
GridFunction embed_component(const GridFunction& u, int component);

/// ||Op(chi0) u||.
double microloc_test(const GridFunction& u, const ScalarSymbol& chi0, const Grid& grid);

/// Phase-space Gaussian exp(-(|x - xc|^2 + |xi - xic|^2) / (2 w^2)).
ScalarSymbol gaussian_cutoff(const std::array<double, 2>& xc, const std::array<double, 2>& xic,
                             double width);
/// Compactly supported cutoff bump(|x - xc|^2/R^2 + |xi - xic|^2/R^2): equal to 1 at the
/// center, identically 0 outside the phase-space ball of radius R.
ScalarSymbol bump_cutoff(const std::array<double, 2>& xc, const std::array<double, 2>& xic,
                         double radius);

struct PropagatorComparison {
  std::vector<double> times;
  std::vector<double> diff;       // ||phi(t) - phi~(t)||
  std::vector<double> norm_phi;   // ||phi(t)||
  double max_diff = 0.0;
  double sup_forcing = 0.0;       // max_s ||(A - A~) phi~(s)|| over the time grid
  bool bound_check = false;       // diff(t) <= t sup_forcing + 1e-9 for all t
  double max_norm_error = 0.0;    // max_t | ||phi(t)|| - ||phi(0)|| |
};

/// Evolves phi(t) = exp(i s t A) phi0 and the same for A~ by exact Hermitian
/// eigendecomposition; s = time_scale (1/eps^2 gives the physical time of the
/// original system, in which case the energy bound carries the factor s).
/// Throws NotHermitian if either operator is not Hermitian to 1e-8 relative to
/// its largest entry.
PropagatorComparison compare_propagators(const GridOperator& A, const GridOperator& A_tilde,
                                         const GridFunction& phi0, const std::vector<double>& times,
                                         double time_scale = 1.0);

/// Random Hermitian matrix with operator norm exactly 1 (seeded).
Eigen::MatrixXcd random_hermitian_unit(Eigen::Index dim, std::uint64_t seed);

struct MicrolocOptions {
  int n = 16;
  double L = 6.283185307179586;
  std::vector<double> eps_list{0.4, 0.2, 0.1};
  /// Packet at (x0_frac * L, xi0); cutoff of radius `radius` centered `offset`
  /// further along x1, so its support stays offset - radius away from the packet.
  std::array<double, 2> x0_frac{0.4, 0.5};
  std::array<double, 2> xi0{0.0, 0.0};
  double offset = 2.0;
  double radius = 1.0;
};

struct MicrolocStudy {
  std::vector<double> eps;
  std::vector<double> displaced;  // ||Op(chi) u|| with the cutoff away from the packet
  std::vector<double> centered;   // same cutoff centered on the packet
  double slope = 0.0;
  bool under_resolved = false;
};

MicrolocStudy microloc_study(const MicrolocOptions& opts);

struct StabilityOptions {
  int n = 16;
  double L = 6.283185307179586;
  double eps = 0.2;
  double t_max = 10.0;
  int samples = 101;
  std::uint64_t seed = 7;
  std::array<double, 2> x0_frac{0.5, 0.5};
  std::array<double, 2> xi0{0.4, 0.2};
};

struct StabilityStudy {
  double eps = 0.0;
  double perturbation = 0.0;     // eps^4
  double bound = 0.0;            // eps^4 t_max
  double max_diff = 0.0;
  double max_diff_half = 0.0;    // perturbation halved
  double ratio = 0.0;            // max_diff_half / max_diff
  double identical_diff = 0.0;   // A~ = A
  bool energy_bound_holds = false;
  double max_norm_error = 0.0;
};

/// A = build_A_exact, A~ = A + eps^4 P with a seeded random Hermitian P, ||P|| = 1;
/// initial data a packet in the first velocity component.
StabilityStudy stability_study(const std::shared_ptr<const Profile>& profile, const StabilityOptions& opts);

}  // namespace wavetrace
