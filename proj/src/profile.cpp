#include "wavetrace/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "wavetrace/errors.hpp"

namespace wavetrace {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Cutoff chi(s) = exp(1 - 1/(1-s)) on s < 1, and its derivative.
void bump_cutoff(double s, double& chi, double& dchi) {
  if (s >= 1.0) {
    chi = 0.0;
    dchi = 0.0;
    return;
  }
  const double inv = 1.0 / (1.0 - s);
  chi = std::exp(1.0 - inv);
  dchi = -chi * inv * inv;
}

}  // namespace

Profile::Profile(CoriolisSpec coriolis, FlowSpec flow)
    : coriolis_(std::move(coriolis)), flow_(std::move(flow)) {
  if (const auto* bump = std::get_if<BumpFlow>(&flow_)) {
    if (!(bump->radius > 0.0)) throw ConfigError("bump flow radius must be positive");
  }
  if (const auto* sine = std::get_if<ShiftedSineCoriolis>(&coriolis_)) {
    if (!(sine->wavenumber != 0.0)) throw ConfigError("shifted-sine wavenumber must be nonzero");
  }
}

CoriolisJet Profile::coriolis(double x2) const {
  return std::visit(
      overloaded{
          [&](const LinearCoriolis& c) { return CoriolisJet{c.beta * x2, c.beta, 0.0}; },
          [&](const ShiftedSineCoriolis& c) {
            const double s = std::sin(c.wavenumber * x2);
            const double co = std::cos(c.wavenumber * x2);
            return CoriolisJet{c.offset + c.amplitude * s, c.amplitude * c.wavenumber * co,
                               -c.amplitude * c.wavenumber * c.wavenumber * s};
          },
          [&](const TanhCoriolis&) {
            const double t = std::tanh(x2);
            const double sech2 = 1.0 - t * t;
            return CoriolisJet{t, sech2, -2.0 * t * sech2};
          }},
      coriolis_);
}

FlowJet Profile::flow(double x1, double x2) const {
  FlowJet out;
  const auto* bump = std::get_if<BumpFlow>(&flow_);
  if (bump == nullptr) return out;
  const double r = bump->radius;
  const double d1 = x1 - bump->center1;
  const double d2 = x2 - bump->center2;
  const double s = (d1 * d1 + d2 * d2) / (r * r);
  if (s >= 1.0) return out;
  double chi = 0.0;
  double dchi = 0.0;
  bump_cutoff(s, chi, dchi);
  const double a = bump->amplitude;
  const double p1 = -d2 / r;
  const double p2 = d1 / r;
  const double ds1 = 2.0 * d1 / (r * r);
  const double ds2 = 2.0 * d2 / (r * r);
  out.u = {a * chi * p1, a * chi * p2};
  out.jac[0][0] = a * dchi * ds1 * p1;
  out.jac[0][1] = a * (dchi * ds2 * p1 - chi / r);
  out.jac[1][0] = a * (dchi * ds1 * p2 + chi / r);
  out.jac[1][1] = a * dchi * ds2 * p2;
  return out;
}

std::optional<Box2> Profile::u_support() const {
  const auto* bump = std::get_if<BumpFlow>(&flow_);
  if (bump == nullptr) return std::nullopt;
  Box2 box;
  box.lo = {bump->center1 - bump->radius, bump->center2 - bump->radius};
  box.hi = {bump->center1 + bump->radius, bump->center2 + bump->radius};
  return box;
}

double Profile::u_inf_norm() const {
  const auto* bump = std::get_if<BumpFlow>(&flow_);
  if (bump == nullptr) return 0.0;
  // |u| = |a| sqrt(s) chi(s), maximal where (1 - s)^2 = 2 s.
  const double s = 2.0 - std::sqrt(3.0);
  double chi = 0.0;
  double dchi = 0.0;
  bump_cutoff(s, chi, dchi);
  return std::abs(bump->amplitude) * std::sqrt(s) * chi;
}

std::optional<double> Profile::coriolis_period() const {
  if (const auto* sine = std::get_if<ShiftedSineCoriolis>(&coriolis_)) {
    if (sine->amplitude == 0.0) return std::nullopt;
    return 2.0 * std::numbers::pi / std::abs(sine->wavenumber);
  }
  return std::nullopt;
}

std::string Profile::id() const {
  std::string s = std::visit(
      overloaded{[](const LinearCoriolis& c) { return "linear(beta=" + fmt_g(c.beta) + ")"; },
                 [](const ShiftedSineCoriolis& c) {
                   return "shifted-sine(c=" + fmt_g(c.offset) + ",a=" + fmt_g(c.amplitude) +
                          ",k=" + fmt_g(c.wavenumber) + ")";
                 },
                 [](const TanhCoriolis&) { return std::string("tanh"); }},
      coriolis_);
  s += "+";
  s += std::visit(overloaded{[](const ZeroFlow&) { return std::string("zero"); },
                             [](const BumpFlow& f) {
                               return "bump(c=" + fmt_g(f.center1) + "," + fmt_g(f.center2) +
                                      ",r=" + fmt_g(f.radius) + ",a=" + fmt_g(f.amplitude) + ")";
                             }},
                  flow_);
  return s;
}

double xi_b(const PhasePoint& p, const Profile& profile) {
  const double b = profile.b(p.x2);
  return std::sqrt(p.xi1 * p.xi1 + p.xi2 * p.xi2 + b * b);
}

SymbolClassReport symbol_class_check(const Profile& profile, int alpha_max, double lo, double hi,
                                     int n_samples,
                                     const std::optional<std::array<double, 3>>& configured) {
  if (alpha_max < 0 || alpha_max > 2) {
    throw ConfigError("symbol_class_check: alpha_max must be in [0, 2]");
  }
  if (n_samples < 2 || !(hi > lo)) throw ConfigError("symbol_class_check: empty sample set");
  SymbolClassReport rep;
  rep.alpha_max = alpha_max;
  for (int i = 0; i < n_samples; ++i) {
    const double x2 = lo + (hi - lo) * static_cast<double>(i) / (n_samples - 1);
    const CoriolisJet j = profile.coriolis(x2);
    const double weight = std::sqrt(1.0 + j.b * j.b);
    const std::array<double, 3> ratios{std::abs(j.b) / weight, std::abs(j.db) / weight,
                                       std::abs(j.ddb) / weight};
    for (int a = 0; a <= alpha_max; ++a) {
      if (ratios[a] > rep.constants[a]) {
        rep.constants[a] = ratios[a];
        rep.argmax[a] = x2;
      }
    }
  }
  if (configured) {
    for (int a = 0; a <= alpha_max; ++a) rep.violated[a] = rep.constants[a] > (*configured)[a];
  }
  return rep;
}

}  // namespace wavetrace
