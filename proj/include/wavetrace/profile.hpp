#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>

#include "wavetrace/phase_point.hpp"

namespace wavetrace {

// Coriolis amplitude catalogue.

/// b(x2) = beta * x2 (beta-plane).
struct LinearCoriolis {
  double beta = 1.0;
};

/// b(x2) = offset + amplitude * sin(wavenumber * x2).
struct ShiftedSineCoriolis {
  double offset = 2.0;
  double amplitude = 1.0;
  double wavenumber = 1.0;
};

/// b(x2) = tanh(x2).
struct TanhCoriolis {};

using CoriolisSpec = std::variant<LinearCoriolis, ShiftedSineCoriolis, TanhCoriolis>;

// Stationary flow catalogue.

struct ZeroFlow {};

/// Compactly supported rotational eddy:
///   u(x) = amplitude * chi(s) * (-(x2 - c2), x1 - c1) / radius,   s = |x - c|^2 / radius^2,
/// with the C-infinity cutoff chi(s) = exp(1 - 1/(1 - s)) on s < 1 and 0 elsewhere.
/// The field is divergence free and vanishes identically outside the disc.
struct BumpFlow {
  double center1 = 0.0;
  double center2 = 0.0;
  double radius = 1.0;
  double amplitude = 0.2;
};

using FlowSpec = std::variant<ZeroFlow, BumpFlow>;

/// b and its first two derivatives at one x2.
struct CoriolisJet {
  double b = 0.0;
  double db = 0.0;
  double ddb = 0.0;
};

/// u and its Jacobian at one x; jac[i][j] = d u_i / d x_j (0-based).
struct FlowJet {
  std::array<double, 2> u{0.0, 0.0};
  std::array<std::array<double, 2>, 2> jac{};
};

struct Box2 {
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{0.0, 0.0};
  bool contains(double x1, double x2) const {
    return x1 >= lo[0] && x1 <= hi[0] && x2 >= lo[1] && x2 <= hi[1];
  }
};

/// Coriolis amplitude b(x2) plus stationary flow u(x), both with exact derivatives.
/// Cheap to copy.
class Profile {
 public:
  Profile() = default;
  Profile(CoriolisSpec coriolis, FlowSpec flow);

  double b(double x2) const { return coriolis(x2).b; }
  double db(double x2) const { return coriolis(x2).db; }
  double ddb(double x2) const { return coriolis(x2).ddb; }
  CoriolisJet coriolis(double x2) const;

  /// Zero outside u_support().
  FlowJet flow(double x1, double x2) const;

  bool flow_is_zero() const { return std::holds_alternative<ZeroFlow>(flow_); }
  /// b'' vanishes identically.
  bool coriolis_is_affine() const { return std::holds_alternative<LinearCoriolis>(coriolis_); }

  /// Axis-aligned box outside which u and its Jacobian vanish; empty for zero flow.
  std::optional<Box2> u_support() const;
  double u_inf_norm() const;

  /// Period of b in x2 if b is periodic.
  std::optional<double> coriolis_period() const;

  const CoriolisSpec& coriolis_spec() const { return coriolis_; }
  const FlowSpec& flow_spec() const { return flow_; }

  /// Stable human-readable identifier, e.g. "shifted-sine(c=2,a=1,k=1)+zero".
  std::string id() const;

 private:
  CoriolisSpec coriolis_ = LinearCoriolis{};
  FlowSpec flow_ = ZeroFlow{};
};

/// sqrt(xi1^2 + xi2^2 + b(x2)^2).
double xi_b(const PhasePoint& p, const Profile& profile);

/// Sup of |b^(alpha)| / (1 + b^2)^(1/2) over sampled x2, per order alpha.
struct SymbolClassReport {
  std::array<double, 3> constants{0.0, 0.0, 0.0};
  std::array<bool, 3> violated{false, false, false};
  std::array<double, 3> argmax{0.0, 0.0, 0.0};
  int alpha_max = 0;
  bool any_violation() const { return violated[0] || violated[1] || violated[2]; }
};

/// Checks the growth condition |b^(alpha)(x2)| <= C_alpha (1 + b^2)^(1/2) on [lo, hi]
/// by uniform sampling. `configured` constants, when given, are compared against.
SymbolClassReport symbol_class_check(const Profile& profile, int alpha_max, double lo, double hi,
                                     int n_samples,
                                     const std::optional<std::array<double, 3>>& configured = {});

}  // namespace wavetrace
