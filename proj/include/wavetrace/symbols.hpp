#pragma once

// Phase-space symbols as immutable expression DAGs with exact structural
// differentiation, Poisson brackets and the first-order Moyal term.
//
// Bracket convention, used everywhere in the library:
//   {f, g} = grad_xi f . grad_x g - grad_x f . grad_xi g
// so that {xi_j, f} = d f / d x_j.

#include <array>
#include <complex>
#include <memory>
#include <string>

#include "wavetrace/phase_point.hpp"
#include "wavetrace/profile.hpp"

namespace wavetrace {

enum class NodeKind { Coordinate, Constant, ProfileField, Add, Sub, Mul, Div, Neg, Sqrt, Pow, Exp, Conj, Bump };

/// Stored profile quantities a symbol may reference. DU<i>_DX<j> = d u_i / d x_j.
enum class ProfileField { B, DB, DDB, U1, U2, DU1_DX1, DU1_DX2, DU2_DX1, DU2_DX2 };

struct SymbolNode;

/// An evaluable complex phase-space function. Value type; copies share the
/// immutable tree.
class ScalarSymbol {
 public:
  ScalarSymbol();  // the constant 0
  explicit ScalarSymbol(std::shared_ptr<const SymbolNode> node) : node_(std::move(node)) {}

  static ScalarSymbol coordinate(Coordinate c);
  static ScalarSymbol constant(complex value);
  static ScalarSymbol field(std::shared_ptr<const Profile> profile, ProfileField f);

  // Read-only structure, for printers and independent test evaluators.
  NodeKind kind() const;
  Coordinate coordinate_id() const;
  complex constant_value() const;
  ProfileField field_id() const;
  const Profile* profile() const;
  double exponent() const;
  int arity() const;
  ScalarSymbol child(int i) const;

  bool is_constant() const { return kind() == NodeKind::Constant; }
  bool is_zero() const;
  /// Number of nodes counted as a tree (shared children counted each time).
  std::size_t tree_size() const;

  std::string to_string() const;

  const std::shared_ptr<const SymbolNode>& node() const { return node_; }

 private:
  std::shared_ptr<const SymbolNode> node_;
};

// Construction. Trivial identities (0 + a, 1 * a, ...) and all-constant
// subtrees are folded, so derivatives that vanish structurally become the
// zero constant.
ScalarSymbol operator+(const ScalarSymbol& a, const ScalarSymbol& b);
ScalarSymbol operator-(const ScalarSymbol& a, const ScalarSymbol& b);
ScalarSymbol operator*(const ScalarSymbol& a, const ScalarSymbol& b);
ScalarSymbol operator/(const ScalarSymbol& a, const ScalarSymbol& b);
ScalarSymbol operator-(const ScalarSymbol& a);
ScalarSymbol operator+(const ScalarSymbol& a, complex c);
ScalarSymbol operator+(complex c, const ScalarSymbol& a);
ScalarSymbol operator-(const ScalarSymbol& a, complex c);
ScalarSymbol operator-(complex c, const ScalarSymbol& a);
ScalarSymbol operator*(complex c, const ScalarSymbol& a);
ScalarSymbol operator*(const ScalarSymbol& a, complex c);
ScalarSymbol operator/(const ScalarSymbol& a, complex c);
ScalarSymbol operator/(complex c, const ScalarSymbol& a);
ScalarSymbol sqrt(const ScalarSymbol& a);
/// a^exponent with a real constant exponent; integer exponents use repeated products.
ScalarSymbol pow(const ScalarSymbol& a, double exponent);
ScalarSymbol exp(const ScalarSymbol& a);
ScalarSymbol conj(const ScalarSymbol& a);
/// order-th derivative of the compact cutoff chi(s) = exp(1 - 1/(1 - s)) on s < 1,
/// 0 for s >= 1 (C-infinity, same cutoff as the eddy flow). The argument must be real.
ScalarSymbol bump(const ScalarSymbol& s, int order = 0);

namespace sym {
inline ScalarSymbol x1() { return ScalarSymbol::coordinate(Coordinate::X1); }
inline ScalarSymbol x2() { return ScalarSymbol::coordinate(Coordinate::X2); }
inline ScalarSymbol xi1() { return ScalarSymbol::coordinate(Coordinate::Xi1); }
inline ScalarSymbol xi2() { return ScalarSymbol::coordinate(Coordinate::Xi2); }
inline ScalarSymbol c(complex v) { return ScalarSymbol::constant(v); }
/// Profile-bound quantities. Fields the profile makes identically constant
/// (zero flow, b' of a linear profile) are returned as constants.
ScalarSymbol b(const std::shared_ptr<const Profile>& p);
ScalarSymbol db(const std::shared_ptr<const Profile>& p);
ScalarSymbol ddb(const std::shared_ptr<const Profile>& p);
ScalarSymbol u1(const std::shared_ptr<const Profile>& p);
ScalarSymbol u2(const std::shared_ptr<const Profile>& p);
/// sqrt(xi1^2 + xi2^2 + b^2).
ScalarSymbol xi_b(const std::shared_ptr<const Profile>& p);
}  // namespace sym

/// Value at p. Throws DomainError on sqrt of a negative real or division by zero.
complex eval(const ScalarSymbol& s, const PhasePoint& p);

struct SymbolGradient {
  complex value;
  std::array<complex, 2> grad_x;
  std::array<complex, 2> grad_xi;
  complex operator[](Coordinate c) const {
    switch (c) {
      case Coordinate::X1: return grad_x[0];
      case Coordinate::X2: return grad_x[1];
      case Coordinate::Xi1: return grad_xi[0];
      case Coordinate::Xi2: return grad_xi[1];
    }
    return {};
  }
};

/// Value and exact first derivatives at p, by forward propagation of the
/// differentiation rules through the tree.
SymbolGradient gradient(const ScalarSymbol& s, const PhasePoint& p);

/// Structural partial derivative as a new symbol.
ScalarSymbol derivative(const ScalarSymbol& s, Coordinate c);

/// {f, g}(p).
complex poisson_bracket(const ScalarSymbol& f, const ScalarSymbol& g, const PhasePoint& p);
/// {f, g}(p) from already computed gradients.
complex poisson_bracket(const SymbolGradient& f, const SymbolGradient& g);
/// {f, g} as a symbol, for nested brackets.
ScalarSymbol poisson_bracket_symbol(const ScalarSymbol& f, const ScalarSymbol& g);

/// Subprincipal symbol of Op(a) Op(b) at p: (1/2i) {a, b}(p).
complex moyal_subprincipal(const ScalarSymbol& a, const ScalarSymbol& b, const PhasePoint& p);

}  // namespace wavetrace
