#include "wavetrace/normal_form.hpp"

#include <cmath>
#include <exception>

#include "wavetrace/errors.hpp"
#include "wavetrace/parallel.hpp"

namespace wavetrace {

namespace {
constexpr complex kI{0.0, 1.0};

int check_sign(int sign) {
  if (sign != 1 && sign != -1) throw ConfigError("tau_pm: sign must be +1 or -1");
  return sign;
}
}  // namespace

double tau_pm(const Profile& profile, const PhasePoint& p, int sign) {
  return check_sign(sign) * xi_b(p, profile);
}

double tau_R(const Profile& profile, const PhasePoint& p) {
  const CoriolisJet c = profile.coriolis(p.x2);
  const double r2 = p.xi1 * p.xi1 + p.xi2 * p.xi2 + c.b * c.b;
  if (r2 == 0.0) throw DegenerateError("tau_R: <xi>_b = 0");
  const FlowJet f = profile.flow(p.x1, p.x2);
  return p.xi1 * c.db / r2 + f.u[0] * p.xi1 + f.u[1] * p.xi2;
}

ScalarSymbol tau_pm_symbol(const std::shared_ptr<const Profile>& profile, int sign) {
  const ScalarSymbol r = sym::xi_b(profile);
  return check_sign(sign) > 0 ? r : -r;
}

ScalarSymbol tau_R_symbol(const std::shared_ptr<const Profile>& profile) {
  using namespace sym;
  const ScalarSymbol r2 = pow(xi1(), 2) + pow(xi2(), 2) + pow(b(profile), 2);
  return xi1() * db(profile) / r2 + u1(profile) * xi1() + u2(profile) * xi2();
}

ScalarSymbol tau_symbol(const std::shared_ptr<const Profile>& profile, ModeId mode) {
  switch (mode) {
    case ModeId::Rossby: return tau_R_symbol(profile);
    case ModeId::PoincarePlus: return tau_pm_symbol(profile, 1);
    case ModeId::PoincareMinus: return tau_pm_symbol(profile, -1);
  }
  return {};
}

SubprincipalEvaluator::SubprincipalEvaluator(std::shared_ptr<const Profile> profile, double gap_tol)
    : profile_(std::move(profile)), gap_tol_(gap_tol) {
  if (!profile_) throw ConfigError("SubprincipalEvaluator: null profile");
  a0_ = a0_symbols(profile_);
  frames_[0] = eigenframe_symbols(profile_, GaugeBranch::ThirdReal);
  frames_[1] = eigenframe_symbols(profile_, GaugeBranch::FirstReal);
}

SubprincipalReport SubprincipalEvaluator::evaluate(const PhasePoint& p, ModeId mode,
                                                   double phase) const {
  const Profile& pr = *profile_;
  const double r = xi_b(p, pr);
  if (!(r >= gap_tol_)) throw DegenerateError("subprincipal_diagonal: <xi>_b below gap tolerance");

  SubprincipalReport rep;
  rep.point = p;
  rep.mode = mode;
  rep.branch = gauge_branch(pr, p);
  const SymbolMatrix& frame = frames_[rep.branch == GaugeBranch::ThirdReal ? 0 : 1];
  const int n = mode_index(mode);
  const complex rot = std::polar(1.0, phase);

  std::array<SymbolGradient, 3> u;
  std::array<SymbolGradient, 3> ubar;
  for (int j = 0; j < 3; ++j) {
    u[j] = gradient(frame[j][n], p);
    u[j].value *= rot;
    for (auto& g : u[j].grad_x) g *= rot;
    for (auto& g : u[j].grad_xi) g *= rot;
    ubar[j].value = std::conj(u[j].value);
    for (int k = 0; k < 2; ++k) {
      ubar[j].grad_x[k] = std::conj(u[j].grad_x[k]);
      ubar[j].grad_xi[k] = std::conj(u[j].grad_xi[k]);
    }
  }

  complex first(0.0, 0.0);
  complex second(0.0, 0.0);
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      if (a0_[j][k].is_zero()) continue;
      const SymbolGradient a = gradient(a0_[j][k], p);
      first += std::imag(ubar[j].value * poisson_bracket(a, u[k]));
      second += a.value * poisson_bracket(ubar[j], u[k]) / (2.0 * kI);
    }
  }
  rep.bracket_part = first + second;

  const FlowJet f = pr.flow(p.x1, p.x2);
  const double udotxi = f.u[0] * p.xi1 + f.u[1] * p.xi2;
  complex norm2(0.0, 0.0);
  complex self_bracket(0.0, 0.0);
  for (int j = 0; j < 3; ++j) {
    norm2 += ubar[j].value * u[j].value;
    self_bracket += poisson_bracket(ubar[j], u[j]);
  }
  rep.flow_part = udotxi * norm2;
  rep.total = rep.bracket_part + rep.flow_part;

  const double delta = mode == ModeId::Rossby ? 0.0 : (mode == ModeId::PoincarePlus ? r : -r);
  rep.normalization_part = -delta * self_bracket / (2.0 * kI);
  rep.no_reference = mode != ModeId::Rossby;
  return rep;
}

SubprincipalReport subprincipal_diagonal(const std::shared_ptr<const Profile>& profile,
                                         const PhasePoint& p, ModeId mode, double gap_tol) {
  return SubprincipalEvaluator(profile, gap_tol).evaluate(p, mode);
}

HomologicalSolution homological_solve(const Eigen::VectorXd& deltas, const Eigen::MatrixXcd& Delta1,
                                      double gap_tol) {
  const Eigen::Index n = deltas.size();
  if (Delta1.rows() != n || Delta1.cols() != n) {
    throw ConfigError("homological_solve: dimension mismatch");
  }
  if ((Delta1 - Delta1.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw NotHermitian("homological_solve: Delta1 is not Hermitian");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(deltas[i] - deltas[j]) < gap_tol) {
        throw DegenerateError("homological_solve: eigenvalue gap below tolerance");
      }
    }
  }
  HomologicalSolution s;
  s.W0 = Eigen::MatrixXcd::Zero(n, n);
  s.D1.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s.D1[i] = Delta1(i, i).real();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) s.W0(i, j) = Delta1(i, j) / (deltas[j] - deltas[i]);
    }
  }
  return s;
}

Eigen::MatrixXcd unitarity_correction(const Eigen::MatrixXcd& I1, const Eigen::MatrixXcd& U) {
  if (U.cols() != I1.rows()) throw ConfigError("unitarity_correction: dimension mismatch");
  return -0.5 * (U * I1);
}

std::vector<HamiltonianRow> hamiltonian_sweep(const std::shared_ptr<const Profile>& profile,
                                              const std::vector<PhasePoint>& points,
                                              double gap_tol) {
  const SubprincipalEvaluator ev(profile, gap_tol);
  std::vector<HamiltonianRow> rows(points.size());
  std::vector<std::exception_ptr> errors(points.size());
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (std::size_t i = 0; i < points.size(); ++i) {
    SubprincipalReport rep;
    try {
      rep = ev.evaluate(points[i], ModeId::Rossby);
    } catch (...) {
      errors[i] = std::current_exception();
      continue;
    }
    HamiltonianRow& row = rows[i];
    row.point = points[i];
    row.bracket_part = rep.bracket_part;
    row.flow_part = rep.flow_part;
    row.total = rep.total;
    row.closed_form = tau_R(*profile, points[i]);
    row.abs_error = std::abs(rep.total - row.closed_form);
    row.tau_plus = tau_pm(*profile, points[i], 1);
    row.tau_minus = tau_pm(*profile, points[i], -1);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

double verify_tau_R(const std::shared_ptr<const Profile>& profile, BoxSampler& sampler,
                    std::size_t n, double gap_tol) {
  double worst = 0.0;
  for (const HamiltonianRow& row : hamiltonian_sweep(profile, sampler.take(n), gap_tol)) {
    worst = std::max(worst, row.abs_error);
  }
  return worst;
}

}  // namespace wavetrace
