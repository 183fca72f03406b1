#pragma once

// Oracles shared by the unit tests. Nothing here calls the library's own
// evaluation or differentiation code.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <random>

#include "wavetrace/errors.hpp"
#include "wavetrace/profile.hpp"
#include "wavetrace/symbols.hpp"

namespace wt_test {

using wavetrace::complex;
using wavetrace::Coordinate;
using wavetrace::NodeKind;
using wavetrace::PhasePoint;
using wavetrace::ProfileField;
using wavetrace::ScalarSymbol;

inline double cutoff_chi(double s) { return s >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - s)); }
inline double cutoff_dchi(double s) {
  if (s >= 1.0) return 0.0;
  const double t = 1.0 / (1.0 - s);
  return -cutoff_chi(s) * t * t;
}

inline double field_value(const wavetrace::Profile& prof, ProfileField f, const PhasePoint& p) {
  const auto c = prof.coriolis(p.x2);
  const auto u = prof.flow(p.x1, p.x2);
  switch (f) {
    case ProfileField::B: return c.b;
    case ProfileField::DB: return c.db;
    case ProfileField::DDB: return c.ddb;
    case ProfileField::U1: return u.u[0];
    case ProfileField::U2: return u.u[1];
    case ProfileField::DU1_DX1: return u.jac[0][0];
    case ProfileField::DU1_DX2: return u.jac[0][1];
    case ProfileField::DU2_DX1: return u.jac[1][0];
    case ProfileField::DU2_DX2: return u.jac[1][1];
  }
  return 0.0;
}

/// Interpreter-style tree walk over the public node structure.
inline complex reference_eval(const ScalarSymbol& s, const PhasePoint& p) {
  switch (s.kind()) {
    case NodeKind::Coordinate: return wavetrace::coordinate_of(p, s.coordinate_id());
    case NodeKind::Constant: return s.constant_value();
    case NodeKind::ProfileField: return field_value(*s.profile(), s.field_id(), p);
    case NodeKind::Add: return reference_eval(s.child(0), p) + reference_eval(s.child(1), p);
    case NodeKind::Sub: return reference_eval(s.child(0), p) - reference_eval(s.child(1), p);
    case NodeKind::Mul: return reference_eval(s.child(0), p) * reference_eval(s.child(1), p);
    case NodeKind::Div: return reference_eval(s.child(0), p) / reference_eval(s.child(1), p);
    case NodeKind::Neg: return -reference_eval(s.child(0), p);
    case NodeKind::Sqrt: return std::sqrt(reference_eval(s.child(0), p));
    case NodeKind::Pow: return std::pow(reference_eval(s.child(0), p), s.exponent());
    case NodeKind::Exp: return std::exp(reference_eval(s.child(0), p));
    case NodeKind::Conj: return std::conj(reference_eval(s.child(0), p));
    case NodeKind::Bump: {
      const double arg = reference_eval(s.child(0), p).real();
      const int order = static_cast<int>(s.exponent());
      if (order == 0) return cutoff_chi(arg);
      if (order == 1) return cutoff_dchi(arg);
      throw std::logic_error("reference_eval: bump order > 1 not covered");
    }
  }
  return {};
}

inline PhasePoint shifted(PhasePoint p, Coordinate c, double h) {
  switch (c) {
    case Coordinate::X1: p.x1 += h; break;
    case Coordinate::X2: p.x2 += h; break;
    case Coordinate::Xi1: p.xi1 += h; break;
    case Coordinate::Xi2: p.xi2 += h; break;
  }
  return p;
}

/// Fourth-order central difference with h = eps^(1/5) max(1, |coordinate|).
template <class F>
auto fd4(const F& f, const PhasePoint& p, Coordinate c) {
  const double h = std::pow(std::numeric_limits<double>::epsilon(), 0.2) *
                   std::max(1.0, std::abs(wavetrace::coordinate_of(p, c)));
  return (-f(shifted(p, c, 2 * h)) + 8.0 * f(shifted(p, c, h)) - 8.0 * f(shifted(p, c, -h)) +
          f(shifted(p, c, -2 * h))) /
         (12.0 * h);
}

inline complex fd_partial(const ScalarSymbol& s, const PhasePoint& p, Coordinate c) {
  return fd4([&](const PhasePoint& q) { return reference_eval(s, q); }, p, c);
}

/// {f, g} = grad_xi f . grad_x g - grad_x f . grad_xi g from finite differences.
inline complex fd_bracket(const ScalarSymbol& f, const ScalarSymbol& g, const PhasePoint& p) {
  using C = Coordinate;
  return fd_partial(f, p, C::Xi1) * fd_partial(g, p, C::X1) + fd_partial(f, p, C::Xi2) * fd_partial(g, p, C::X2) -
         fd_partial(f, p, C::X1) * fd_partial(g, p, C::Xi1) - fd_partial(f, p, C::X2) * fd_partial(g, p, C::Xi2);
}

/// Random real-valued smooth trees over coordinates, constants and profile fields.
/// Divisions, roots and powers are guarded so every tree is smooth everywhere.
class TreeGen {
 public:
  TreeGen(std::shared_ptr<const wavetrace::Profile> prof, std::uint64_t seed) : prof_(std::move(prof)), rng_(seed) {}

  /// Restrict profile leaves to b, whose second derivative is stored; needed when
  /// nested brackets differentiate twice.
  void second_order_leaves() { leaves_ = 6; }

  ScalarSymbol leaf() {
    using namespace wavetrace;
    std::uniform_int_distribution<int> pick(0, leaves_ - 1);
    std::uniform_real_distribution<double> c(-2.0, 2.0);
    switch (pick(rng_)) {
      case 0: return sym::x1();
      case 1: return sym::x2();
      case 2: return sym::xi1();
      case 3: return sym::xi2();
      case 4: return sym::c(c(rng_));
      case 5: return sym::b(prof_);
      case 6: return sym::u1(prof_);
      default: return sym::db(prof_);
    }
  }

  ScalarSymbol tree(int depth) {
    using namespace wavetrace;
    if (depth == 0) return leaf();
    std::uniform_int_distribution<int> pick(0, 10);
    const ScalarSymbol a = tree(depth - 1);
    switch (pick(rng_)) {
      case 0: return a + tree(depth - 1);
      case 1: return a - tree(depth - 1);
      case 2: return a * tree(depth - 1);
      case 3: return a / (sym::c(1.5) + tree(depth - 1) * tree(depth - 1));
      case 4: return -a;
      case 5: return sqrt(sym::c(1.0) + a * a);
      case 6: return pow(a, 3.0);
      case 7: return pow(sym::c(0.5) + a * a, 1.5);
      case 8: return exp(sym::c(0.0) - sym::c(0.3) * a * a);
      case 9: return conj(a);
      default: return bump(sym::c(0.2) * a * a, depth % 2);
    }
  }

  PhasePoint point() {
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    return {u(rng_), u(rng_), u(rng_), u(rng_)};
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::shared_ptr<const wavetrace::Profile> prof_;
  std::mt19937_64 rng_;
  int leaves_ = 8;
};

inline std::shared_ptr<const wavetrace::Profile> sine_bump_profile() {
  return std::make_shared<const wavetrace::Profile>(wavetrace::ShiftedSineCoriolis{2.0, 1.0, 1.0},
                                                    wavetrace::BumpFlow{0.3, -0.2, 1.5, 0.4});
}

inline double rel_err(complex a, complex b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace wt_test
