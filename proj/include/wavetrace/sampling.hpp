#pragma once

// Deterministic low-discrepancy sampling of phase-space boxes, and the
// admissibility checks boxes must pass before any analysis uses them.

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "wavetrace/phase_point.hpp"
#include "wavetrace/profile.hpp"

namespace wavetrace {

/// Closed box in (x1, x2, xi1, xi2). Degenerate sides (lo == hi) pin a coordinate.
struct PhaseBox {
  std::array<double, 4> lo{0.0, 0.0, 0.0, 0.0};
  std::array<double, 4> hi{0.0, 0.0, 0.0, 0.0};

  bool contains(const PhasePoint& p, double slack = 0.0) const;
  /// Throws ConfigError unless every side is finite with lo <= hi.
  void validate() const;
};

/// Scrambled Sobol sequence mapped onto a box. The scramble is a random
/// shift modulo 1 drawn from the seed, so distinct seeds give distinct,
/// equally well distributed point sets and equal seeds give identical ones.
class BoxSampler {
 public:
  BoxSampler(PhaseBox box, std::uint64_t seed);
  ~BoxSampler();
  BoxSampler(BoxSampler&&) noexcept;
  BoxSampler& operator=(BoxSampler&&) noexcept;

  PhasePoint next();
  std::vector<PhasePoint> take(std::size_t n);

  const PhaseBox& box() const { return box_; }
  std::uint64_t seed() const { return seed_; }

 private:
  struct Engine;
  PhaseBox box_;
  std::uint64_t seed_;
  std::array<double, 4> shift_{};
  std::unique_ptr<Engine> engine_;
};

/// Convenience: the first n points of BoxSampler(box, seed).
std::vector<PhasePoint> sample_box(const PhaseBox& box, std::size_t n, std::uint64_t seed);

/// Lower bound for <xi>_b over the box: interval minima of xi1^2 and xi2^2 plus
/// the minimum of b^2 over [lo, hi] in x2 (exact for linear b, otherwise a
/// dense scan refined around the smallest sample).
double box_min_xi_b(const PhaseBox& box, const Profile& profile);

/// Rejects boxes meeting <xi>_b < gap_tol (ConfigError).
void require_cond1(const PhaseBox& box, const Profile& profile, double gap_tol);
/// Rejects boxes whose xi1 interval contains 0 (Cond2Violation).
void require_cond2(const PhaseBox& box);

}  // namespace wavetrace
