#include "wavetrace/symbols.hpp"

#include <cmath>
#include <cstdio>
#include <unordered_map>
#include <vector>

#include "wavetrace/errors.hpp"

namespace wavetrace {

struct SymbolNode {
  NodeKind kind = NodeKind::Constant;
  Coordinate coord = Coordinate::X1;
  complex value{0.0, 0.0};
  ProfileField field = ProfileField::B;
  double exponent = 1.0;
  std::shared_ptr<const Profile> profile;
  std::shared_ptr<const SymbolNode> a;
  std::shared_ptr<const SymbolNode> b;
};

namespace {

using NodePtr = std::shared_ptr<const SymbolNode>;

NodePtr make_constant(complex v) {
  auto n = std::make_shared<SymbolNode>();
  n->kind = NodeKind::Constant;
  n->value = v;
  return n;
}

NodePtr make_op(NodeKind k, NodePtr a, NodePtr b = nullptr, double exponent = 1.0) {
  auto n = std::make_shared<SymbolNode>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  n->exponent = exponent;
  return n;
}

bool is_const(const NodePtr& n) { return n->kind == NodeKind::Constant; }
bool is_const_value(const NodePtr& n, double v) {
  return is_const(n) && n->value == complex(v, 0.0);
}

bool is_integer(double e) { return std::isfinite(e) && e == std::round(e) && std::abs(e) < 1e9; }

complex checked_sqrt(complex z) {
  if (z.imag() == 0.0) {
    if (z.real() < 0.0) throw DomainError("sqrt of a negative real");
    return {std::sqrt(z.real()), 0.0};
  }
  return std::sqrt(z);
}

complex checked_div(complex a, complex b) {
  if (b == complex(0.0, 0.0)) throw DomainError("division by zero");
  return a / b;
}

complex int_pow(complex base, long n) {
  if (n < 0) {
    if (base == complex(0.0, 0.0)) throw DomainError("division by zero in negative power");
    return complex(1.0, 0.0) / int_pow(base, -n);
  }
  complex result(1.0, 0.0);
  complex factor = base;
  while (n > 0) {
    if (n & 1) result *= factor;
    factor *= factor;
    n >>= 1;
  }
  return result;
}

complex checked_pow(complex base, double e) {
  if (is_integer(e)) return int_pow(base, static_cast<long>(e));
  if (base.imag() == 0.0 && base.real() < 0.0) {
    throw DomainError("non-integer power of a negative real");
  }
  if (base == complex(0.0, 0.0)) {
    if (e > 0.0) return {0.0, 0.0};
    throw DomainError("non-positive power of zero");
  }
  if (base.imag() == 0.0) return {std::pow(base.real(), e), 0.0};
  return std::pow(base, e);
}

// chi^(k)(s) = P_k(t) exp(1 - t), t = 1/(1 - s), with P_0 = 1 and
// P_{k+1}(t) = t^2 (P_k'(t) - P_k(t)).
complex bump_value(complex z, int order) {
  if (z.imag() != 0.0) throw DomainError("bump cutoff of a non-real argument");
  const double s = z.real();
  if (!(s < 1.0)) return {0.0, 0.0};
  const double t = 1.0 / (1.0 - s);
  std::vector<double> c{1.0};  // coefficients of P_k, ascending powers
  for (int k = 0; k < order; ++k) {
    std::vector<double> next(c.size() + 2, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i > 0) next[i + 1] += static_cast<double>(i) * c[i];
      next[i + 2] -= c[i];
    }
    c = std::move(next);
  }
  double poly = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) poly = poly * t + c[i];
  const double e = std::exp(1.0 - t);
  return {e == 0.0 ? 0.0 : poly * e, 0.0};
}

double field_value(const SymbolNode& n, const PhasePoint& p) {
  const Profile& pr = *n.profile;
  switch (n.field) {
    case ProfileField::B: return pr.b(p.x2);
    case ProfileField::DB: return pr.db(p.x2);
    case ProfileField::DDB: return pr.ddb(p.x2);
    default: break;
  }
  const FlowJet f = pr.flow(p.x1, p.x2);
  switch (n.field) {
    case ProfileField::U1: return f.u[0];
    case ProfileField::U2: return f.u[1];
    case ProfileField::DU1_DX1: return f.jac[0][0];
    case ProfileField::DU1_DX2: return f.jac[0][1];
    case ProfileField::DU2_DX1: return f.jac[1][0];
    case ProfileField::DU2_DX2: return f.jac[1][1];
    default: return 0.0;
  }
}

complex eval_node(const SymbolNode& n, const PhasePoint& p) {
  switch (n.kind) {
    case NodeKind::Coordinate: return {coordinate_of(p, n.coord), 0.0};
    case NodeKind::Constant: return n.value;
    case NodeKind::ProfileField: return {field_value(n, p), 0.0};
    case NodeKind::Add: return eval_node(*n.a, p) + eval_node(*n.b, p);
    case NodeKind::Sub: return eval_node(*n.a, p) - eval_node(*n.b, p);
    case NodeKind::Mul: return eval_node(*n.a, p) * eval_node(*n.b, p);
    case NodeKind::Div: return checked_div(eval_node(*n.a, p), eval_node(*n.b, p));
    case NodeKind::Neg: return -eval_node(*n.a, p);
    case NodeKind::Sqrt: return checked_sqrt(eval_node(*n.a, p));
    case NodeKind::Pow: return checked_pow(eval_node(*n.a, p), n.exponent);
    case NodeKind::Exp: return std::exp(eval_node(*n.a, p));
    case NodeKind::Conj: return std::conj(eval_node(*n.a, p));
    case NodeKind::Bump: return bump_value(eval_node(*n.a, p), static_cast<int>(n.exponent));
  }
  return {};
}

// Value plus the four partials, propagated through one node.
struct Jet {
  complex v;
  std::array<complex, 4> d{};
};

Jet field_jet(const SymbolNode& n, const PhasePoint& p) {
  const Profile& pr = *n.profile;
  Jet j;
  constexpr int X1 = 0;
  constexpr int X2 = 1;
  switch (n.field) {
    case ProfileField::B: {
      const CoriolisJet c = pr.coriolis(p.x2);
      j.v = c.b;
      j.d[X2] = c.db;
      return j;
    }
    case ProfileField::DB: {
      const CoriolisJet c = pr.coriolis(p.x2);
      j.v = c.db;
      j.d[X2] = c.ddb;
      return j;
    }
    case ProfileField::DDB:
      throw DomainError("third derivative of b is not stored by the profile");
    case ProfileField::U1:
    case ProfileField::U2: {
      const FlowJet f = pr.flow(p.x1, p.x2);
      const int i = n.field == ProfileField::U1 ? 0 : 1;
      j.v = f.u[i];
      j.d[X1] = f.jac[i][0];
      j.d[X2] = f.jac[i][1];
      return j;
    }
    default:
      throw DomainError("second derivatives of the flow are not stored by the profile");
  }
}

Jet jet_node(const SymbolNode& n, const PhasePoint& p) {
  Jet out;
  switch (n.kind) {
    case NodeKind::Coordinate:
      out.v = coordinate_of(p, n.coord);
      out.d[static_cast<int>(n.coord)] = 1.0;
      return out;
    case NodeKind::Constant:
      out.v = n.value;
      return out;
    case NodeKind::ProfileField:
      return field_jet(n, p);
    case NodeKind::Add: {
      const Jet a = jet_node(*n.a, p);
      const Jet b = jet_node(*n.b, p);
      out.v = a.v + b.v;
      for (int k = 0; k < 4; ++k) out.d[k] = a.d[k] + b.d[k];
      return out;
    }
    case NodeKind::Sub: {
      const Jet a = jet_node(*n.a, p);
      const Jet b = jet_node(*n.b, p);
      out.v = a.v - b.v;
      for (int k = 0; k < 4; ++k) out.d[k] = a.d[k] - b.d[k];
      return out;
    }
    case NodeKind::Mul: {
      const Jet a = jet_node(*n.a, p);
      const Jet b = jet_node(*n.b, p);
      out.v = a.v * b.v;
      for (int k = 0; k < 4; ++k) out.d[k] = a.d[k] * b.v + a.v * b.d[k];
      return out;
    }
    case NodeKind::Div: {
      const Jet a = jet_node(*n.a, p);
      const Jet b = jet_node(*n.b, p);
      out.v = checked_div(a.v, b.v);
      for (int k = 0; k < 4; ++k) out.d[k] = (a.d[k] - out.v * b.d[k]) / b.v;
      return out;
    }
    case NodeKind::Neg: {
      const Jet a = jet_node(*n.a, p);
      out.v = -a.v;
      for (int k = 0; k < 4; ++k) out.d[k] = -a.d[k];
      return out;
    }
    case NodeKind::Sqrt: {
      const Jet a = jet_node(*n.a, p);
      out.v = checked_sqrt(a.v);
      if (out.v == complex(0.0, 0.0)) throw DomainError("sqrt is not differentiable at zero");
      for (int k = 0; k < 4; ++k) out.d[k] = a.d[k] / (2.0 * out.v);
      return out;
    }
    case NodeKind::Pow: {
      const Jet a = jet_node(*n.a, p);
      const double e = n.exponent;
      out.v = checked_pow(a.v, e);
      const complex slope = e * checked_pow(a.v, e - 1.0);
      for (int k = 0; k < 4; ++k) out.d[k] = slope * a.d[k];
      return out;
    }
    case NodeKind::Exp: {
      const Jet a = jet_node(*n.a, p);
      out.v = std::exp(a.v);
      for (int k = 0; k < 4; ++k) out.d[k] = out.v * a.d[k];
      return out;
    }
    case NodeKind::Conj: {
      const Jet a = jet_node(*n.a, p);
      out.v = std::conj(a.v);
      for (int k = 0; k < 4; ++k) out.d[k] = std::conj(a.d[k]);
      return out;
    }
    case NodeKind::Bump: {
      const Jet a = jet_node(*n.a, p);
      const int order = static_cast<int>(n.exponent);
      out.v = bump_value(a.v, order);
      const complex slope = bump_value(a.v, order + 1);
      for (int k = 0; k < 4; ++k) out.d[k] = slope * a.d[k];
      return out;
    }
  }
  return out;
}

std::size_t count_nodes(const SymbolNode& n) {
  std::size_t s = 1;
  if (n.a) s += count_nodes(*n.a);
  if (n.b) s += count_nodes(*n.b);
  return s;
}

const char* field_name(ProfileField f) {
  switch (f) {
    case ProfileField::B: return "b";
    case ProfileField::DB: return "b'";
    case ProfileField::DDB: return "b''";
    case ProfileField::U1: return "u1";
    case ProfileField::U2: return "u2";
    case ProfileField::DU1_DX1: return "d1u1";
    case ProfileField::DU1_DX2: return "d2u1";
    case ProfileField::DU2_DX1: return "d1u2";
    case ProfileField::DU2_DX2: return "d2u2";
  }
  return "?";
}

std::string print_node(const SymbolNode& n) {
  static const char* coord_names[] = {"x1", "x2", "xi1", "xi2"};
  char buf[64];
  switch (n.kind) {
    case NodeKind::Coordinate: return coord_names[static_cast<int>(n.coord)];
    case NodeKind::Constant:
      if (n.value.imag() == 0.0) {
        std::snprintf(buf, sizeof buf, "%.17g", n.value.real());
      } else {
        std::snprintf(buf, sizeof buf, "(%.17g%+.17gi)", n.value.real(), n.value.imag());
      }
      return buf;
    case NodeKind::ProfileField: return field_name(n.field);
    case NodeKind::Add: return "(" + print_node(*n.a) + " + " + print_node(*n.b) + ")";
    case NodeKind::Sub: return "(" + print_node(*n.a) + " - " + print_node(*n.b) + ")";
    case NodeKind::Mul: return "(" + print_node(*n.a) + " * " + print_node(*n.b) + ")";
    case NodeKind::Div: return "(" + print_node(*n.a) + " / " + print_node(*n.b) + ")";
    case NodeKind::Neg: return "-" + print_node(*n.a);
    case NodeKind::Sqrt: return "sqrt(" + print_node(*n.a) + ")";
    case NodeKind::Pow:
      std::snprintf(buf, sizeof buf, "%.17g", n.exponent);
      return "(" + print_node(*n.a) + ")^" + buf;
    case NodeKind::Exp: return "exp(" + print_node(*n.a) + ")";
    case NodeKind::Conj: return "conj(" + print_node(*n.a) + ")";
    case NodeKind::Bump:
      if (n.exponent == 0.0) return "bump(" + print_node(*n.a) + ")";
      std::snprintf(buf, sizeof buf, "%d", static_cast<int>(n.exponent));
      return std::string("bump^(") + buf + ")(" + print_node(*n.a) + ")";
  }
  return "?";
}

ScalarSymbol wrap(NodePtr n) { return ScalarSymbol(std::move(n)); }

}  // namespace

// ---------------------------------------------------------------------------
// ScalarSymbol

ScalarSymbol::ScalarSymbol() : node_(make_constant({0.0, 0.0})) {}

ScalarSymbol ScalarSymbol::coordinate(Coordinate c) {
  auto n = std::make_shared<SymbolNode>();
  n->kind = NodeKind::Coordinate;
  n->coord = c;
  return ScalarSymbol(std::move(n));
}

ScalarSymbol ScalarSymbol::constant(complex value) { return ScalarSymbol(make_constant(value)); }

ScalarSymbol ScalarSymbol::field(std::shared_ptr<const Profile> profile, ProfileField f) {
  if (!profile) throw ConfigError("profile field symbol needs a profile");
  auto n = std::make_shared<SymbolNode>();
  n->kind = NodeKind::ProfileField;
  n->field = f;
  n->profile = std::move(profile);
  return ScalarSymbol(std::move(n));
}

NodeKind ScalarSymbol::kind() const { return node_->kind; }
Coordinate ScalarSymbol::coordinate_id() const { return node_->coord; }
complex ScalarSymbol::constant_value() const { return node_->value; }
ProfileField ScalarSymbol::field_id() const { return node_->field; }
const Profile* ScalarSymbol::profile() const { return node_->profile.get(); }
double ScalarSymbol::exponent() const { return node_->exponent; }
int ScalarSymbol::arity() const { return node_->b ? 2 : (node_->a ? 1 : 0); }
ScalarSymbol ScalarSymbol::child(int i) const { return ScalarSymbol(i == 0 ? node_->a : node_->b); }
bool ScalarSymbol::is_zero() const { return is_const_value(node_, 0.0); }
std::size_t ScalarSymbol::tree_size() const { return count_nodes(*node_); }
std::string ScalarSymbol::to_string() const { return print_node(*node_); }

// ---------------------------------------------------------------------------
// Builders with folding

ScalarSymbol operator+(const ScalarSymbol& a, const ScalarSymbol& b) {
  const auto& na = a.node();
  const auto& nb = b.node();
  if (is_const(na) && is_const(nb)) return wrap(make_constant(na->value + nb->value));
  if (is_const_value(na, 0.0)) return b;
  if (is_const_value(nb, 0.0)) return a;
  return wrap(make_op(NodeKind::Add, na, nb));
}

ScalarSymbol operator-(const ScalarSymbol& a, const ScalarSymbol& b) {
  const auto& na = a.node();
  const auto& nb = b.node();
  if (is_const(na) && is_const(nb)) return wrap(make_constant(na->value - nb->value));
  if (is_const_value(nb, 0.0)) return a;
  if (is_const_value(na, 0.0)) return -b;
  return wrap(make_op(NodeKind::Sub, na, nb));
}

ScalarSymbol operator*(const ScalarSymbol& a, const ScalarSymbol& b) {
  const auto& na = a.node();
  const auto& nb = b.node();
  if (is_const(na) && is_const(nb)) return wrap(make_constant(na->value * nb->value));
  if (is_const_value(na, 0.0) || is_const_value(nb, 0.0)) return ScalarSymbol();
  if (is_const_value(na, 1.0)) return b;
  if (is_const_value(nb, 1.0)) return a;
  if (is_const_value(na, -1.0)) return -b;
  if (is_const_value(nb, -1.0)) return -a;
  return wrap(make_op(NodeKind::Mul, na, nb));
}

ScalarSymbol operator/(const ScalarSymbol& a, const ScalarSymbol& b) {
  const auto& na = a.node();
  const auto& nb = b.node();
  if (is_const_value(nb, 0.0)) throw DomainError("division by the zero symbol");
  if (is_const(na) && is_const(nb)) return wrap(make_constant(na->value / nb->value));
  if (is_const_value(na, 0.0)) return ScalarSymbol();
  if (is_const_value(nb, 1.0)) return a;
  return wrap(make_op(NodeKind::Div, na, nb));
}

ScalarSymbol operator-(const ScalarSymbol& a) {
  const auto& na = a.node();
  if (is_const(na)) return wrap(make_constant(-na->value));
  if (na->kind == NodeKind::Neg) return ScalarSymbol(na->a);
  return wrap(make_op(NodeKind::Neg, na));
}

ScalarSymbol operator+(const ScalarSymbol& a, complex c) { return a + ScalarSymbol::constant(c); }
ScalarSymbol operator+(complex c, const ScalarSymbol& a) { return ScalarSymbol::constant(c) + a; }
ScalarSymbol operator-(const ScalarSymbol& a, complex c) { return a - ScalarSymbol::constant(c); }
ScalarSymbol operator-(complex c, const ScalarSymbol& a) { return ScalarSymbol::constant(c) - a; }
ScalarSymbol operator*(complex c, const ScalarSymbol& a) { return ScalarSymbol::constant(c) * a; }
ScalarSymbol operator*(const ScalarSymbol& a, complex c) { return a * ScalarSymbol::constant(c); }
ScalarSymbol operator/(const ScalarSymbol& a, complex c) { return a / ScalarSymbol::constant(c); }
ScalarSymbol operator/(complex c, const ScalarSymbol& a) { return ScalarSymbol::constant(c) / a; }

ScalarSymbol sqrt(const ScalarSymbol& a) {
  if (a.is_constant()) return ScalarSymbol::constant(checked_sqrt(a.constant_value()));
  return wrap(make_op(NodeKind::Sqrt, a.node()));
}

ScalarSymbol pow(const ScalarSymbol& a, double exponent) {
  if (exponent == 0.0) return ScalarSymbol::constant(1.0);
  if (exponent == 1.0) return a;
  if (a.is_constant()) return ScalarSymbol::constant(checked_pow(a.constant_value(), exponent));
  return wrap(make_op(NodeKind::Pow, a.node(), nullptr, exponent));
}

ScalarSymbol exp(const ScalarSymbol& a) {
  if (a.is_constant()) return ScalarSymbol::constant(std::exp(a.constant_value()));
  return wrap(make_op(NodeKind::Exp, a.node()));
}

ScalarSymbol bump(const ScalarSymbol& s, int order) {
  if (order < 0) throw ConfigError("bump derivative order must be non-negative");
  if (s.is_constant()) return ScalarSymbol::constant(bump_value(s.constant_value(), order));
  return wrap(make_op(NodeKind::Bump, s.node(), nullptr, static_cast<double>(order)));
}

ScalarSymbol conj(const ScalarSymbol& a) {
  switch (a.kind()) {
    case NodeKind::Constant: return ScalarSymbol::constant(std::conj(a.constant_value()));
    case NodeKind::Coordinate:
    case NodeKind::ProfileField: return a;
    case NodeKind::Conj: return a.child(0);
    default: return wrap(make_op(NodeKind::Conj, a.node()));
  }
}

namespace sym {

ScalarSymbol b(const std::shared_ptr<const Profile>& p) {
  return ScalarSymbol::field(p, ProfileField::B);
}
ScalarSymbol db(const std::shared_ptr<const Profile>& p) {
  if (const auto* lin = std::get_if<LinearCoriolis>(&p->coriolis_spec())) return c(lin->beta);
  return ScalarSymbol::field(p, ProfileField::DB);
}
ScalarSymbol ddb(const std::shared_ptr<const Profile>& p) {
  if (p->coriolis_is_affine()) return c(0.0);
  return ScalarSymbol::field(p, ProfileField::DDB);
}
ScalarSymbol u1(const std::shared_ptr<const Profile>& p) {
  if (p->flow_is_zero()) return c(0.0);
  return ScalarSymbol::field(p, ProfileField::U1);
}
ScalarSymbol u2(const std::shared_ptr<const Profile>& p) {
  if (p->flow_is_zero()) return c(0.0);
  return ScalarSymbol::field(p, ProfileField::U2);
}
ScalarSymbol xi_b(const std::shared_ptr<const Profile>& p) {
  return sqrt(pow(xi1(), 2) + pow(xi2(), 2) + pow(b(p), 2));
}

}  // namespace sym

// ---------------------------------------------------------------------------
// Evaluation and differentiation

complex eval(const ScalarSymbol& s, const PhasePoint& p) { return eval_node(*s.node(), p); }

SymbolGradient gradient(const ScalarSymbol& s, const PhasePoint& p) {
  const Jet j = jet_node(*s.node(), p);
  return {j.v, {j.d[0], j.d[1]}, {j.d[2], j.d[3]}};
}

namespace {

ScalarSymbol field_derivative(const ScalarSymbol& s, Coordinate c) {
  const auto& node = *s.node();
  const bool dx1 = c == Coordinate::X1;
  const bool dx2 = c == Coordinate::X2;
  auto profile = node.profile;
  auto f = [&](ProfileField pf) { return ScalarSymbol::field(profile, pf); };
  switch (node.field) {
    case ProfileField::B: return dx2 ? sym::db(profile) : ScalarSymbol();
    case ProfileField::DB: return dx2 ? sym::ddb(profile) : ScalarSymbol();
    case ProfileField::DDB:
      if (dx2) throw DomainError("third derivative of b is not stored by the profile");
      return ScalarSymbol();
    case ProfileField::U1:
      if (dx1) return f(ProfileField::DU1_DX1);
      if (dx2) return f(ProfileField::DU1_DX2);
      return ScalarSymbol();
    case ProfileField::U2:
      if (dx1) return f(ProfileField::DU2_DX1);
      if (dx2) return f(ProfileField::DU2_DX2);
      return ScalarSymbol();
    default:
      if (dx1 || dx2) throw DomainError("second derivatives of the flow are not stored by the profile");
      return ScalarSymbol();
  }
}

ScalarSymbol differentiate(const ScalarSymbol& s, Coordinate c,
                           std::unordered_map<const SymbolNode*, ScalarSymbol>& memo) {
  const SymbolNode* key = s.node().get();
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  ScalarSymbol out;
  switch (s.kind()) {
    case NodeKind::Coordinate:
      out = ScalarSymbol::constant(s.coordinate_id() == c ? 1.0 : 0.0);
      break;
    case NodeKind::Constant:
      break;
    case NodeKind::ProfileField:
      out = field_derivative(s, c);
      break;
    case NodeKind::Add:
      out = differentiate(s.child(0), c, memo) + differentiate(s.child(1), c, memo);
      break;
    case NodeKind::Sub:
      out = differentiate(s.child(0), c, memo) - differentiate(s.child(1), c, memo);
      break;
    case NodeKind::Mul:
      out = differentiate(s.child(0), c, memo) * s.child(1) +
            s.child(0) * differentiate(s.child(1), c, memo);
      break;
    case NodeKind::Div: {
      const ScalarSymbol a = s.child(0);
      const ScalarSymbol b = s.child(1);
      out = differentiate(a, c, memo) / b - s * differentiate(b, c, memo) / b;
      break;
    }
    case NodeKind::Neg:
      out = -differentiate(s.child(0), c, memo);
      break;
    case NodeKind::Sqrt:
      out = differentiate(s.child(0), c, memo) / (2.0 * s);
      break;
    case NodeKind::Pow: {
      const double e = s.exponent();
      out = e * pow(s.child(0), e - 1.0) * differentiate(s.child(0), c, memo);
      break;
    }
    case NodeKind::Exp:
      out = s * differentiate(s.child(0), c, memo);
      break;
    case NodeKind::Conj:
      out = conj(differentiate(s.child(0), c, memo));
      break;
    case NodeKind::Bump:
      out = bump(s.child(0), static_cast<int>(s.exponent()) + 1) * differentiate(s.child(0), c, memo);
      break;
  }
  memo.emplace(key, out);
  return out;
}

}  // namespace

ScalarSymbol derivative(const ScalarSymbol& s, Coordinate c) {
  std::unordered_map<const SymbolNode*, ScalarSymbol> memo;
  return differentiate(s, c, memo);
}

complex poisson_bracket(const SymbolGradient& f, const SymbolGradient& g) {
  complex acc(0.0, 0.0);
  for (int j = 0; j < 2; ++j) acc += f.grad_xi[j] * g.grad_x[j] - f.grad_x[j] * g.grad_xi[j];
  return acc;
}

complex poisson_bracket(const ScalarSymbol& f, const ScalarSymbol& g, const PhasePoint& p) {
  return poisson_bracket(gradient(f, p), gradient(g, p));
}

ScalarSymbol poisson_bracket_symbol(const ScalarSymbol& f, const ScalarSymbol& g) {
  ScalarSymbol acc;
  const Coordinate xs[2] = {Coordinate::X1, Coordinate::X2};
  const Coordinate xis[2] = {Coordinate::Xi1, Coordinate::Xi2};
  for (int j = 0; j < 2; ++j) {
    acc = acc + (derivative(f, xis[j]) * derivative(g, xs[j]) -
                 derivative(f, xs[j]) * derivative(g, xis[j]));
  }
  return acc;
}

complex moyal_subprincipal(const ScalarSymbol& a, const ScalarSymbol& b, const PhasePoint& p) {
  return poisson_bracket(a, b, p) / complex(0.0, 2.0);
}

}  // namespace wavetrace
