#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace wavetrace {

using complex = std::complex<double>;

/// A point (x1, x2, xi1, xi2) of T*R^2.
struct PhasePoint {
  double x1 = 0.0;
  double x2 = 0.0;
  double xi1 = 0.0;
  double xi2 = 0.0;

  static PhasePoint from_array(const std::array<double, 4>& a) { return {a[0], a[1], a[2], a[3]}; }
  std::array<double, 4> to_array() const { return {x1, x2, xi1, xi2}; }

  bool finite() const {
    return std::isfinite(x1) && std::isfinite(x2) && std::isfinite(xi1) && std::isfinite(xi2);
  }

  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

/// Coordinate slots, in the order used by every 4-vector in the library.
enum class Coordinate { X1 = 0, X2 = 1, Xi1 = 2, Xi2 = 3 };

inline double coordinate_of(const PhasePoint& p, Coordinate c) {
  switch (c) {
    case Coordinate::X1: return p.x1;
    case Coordinate::X2: return p.x2;
    case Coordinate::Xi1: return p.xi1;
    case Coordinate::Xi2: return p.xi2;
  }
  return 0.0;
}

/// The three scalar modes of the rotating shallow-water propagator, in
/// eigen-index order (R, +, -).
enum class ModeId { Rossby = 0, PoincarePlus = 1, PoincareMinus = 2 };

inline int mode_index(ModeId m) { return static_cast<int>(m); }

inline const char* mode_name(ModeId m) {
  switch (m) {
    case ModeId::Rossby: return "rossby";
    case ModeId::PoincarePlus: return "poincare+";
    case ModeId::PoincareMinus: return "poincare-";
  }
  return "?";
}

/// Default eigenvalue-gap floor shared by the spectral and normal-form code.
inline constexpr double kDefaultGapTol = 1e-6;

}  // namespace wavetrace
