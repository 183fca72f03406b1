#include "wavetrace/spectral.hpp"

#include <cmath>
#include <limits>

#include "wavetrace/errors.hpp"

namespace wavetrace {

namespace {
constexpr complex kI{0.0, 1.0};
}

MatrixSymbolValue eval_A0(const Profile& profile, const PhasePoint& p) {
  const double b = profile.b(p.x2);
  Matrix3c m;
  m << 0.0, p.xi1, p.xi2,
       p.xi1, 0.0, -kI * b,
       p.xi2, kI * b, 0.0;
  return {m, p};
}

MatrixSymbolValue eval_A1(const Profile& profile, const PhasePoint& p) {
  const FlowJet f = profile.flow(p.x1, p.x2);
  const double s = f.u[0] * p.xi1 + f.u[1] * p.xi2;
  return {Matrix3c::Identity() * s, p};
}

GaugeBranch gauge_branch(const Profile& profile, const PhasePoint& p) {
  const double b = profile.b(p.x2);
  const double t = p.xi2 * p.xi2 + b * b;
  const double r2 = p.xi1 * p.xi1 + t;
  return t >= kGaugeCut * r2 ? GaugeBranch::ThirdReal : GaugeBranch::FirstReal;
}

EigenFrame eigendecompose(const Profile& profile, const PhasePoint& p, double gap_tol) {
  const double b = profile.b(p.x2);
  const double x1 = p.xi1;
  const double x2 = p.xi2;
  const double t = x2 * x2 + b * b;
  const double r = std::sqrt(x1 * x1 + t);
  if (!(r >= gap_tol)) {
    throw DegenerateError("eigendecompose: <xi>_b below gap tolerance");
  }
  EigenFrame f;
  f.deltas = {0.0, r, -r};
  f.gap = r;
  f.vectors.col(0) << b / r, kI * x2 / r, -kI * x1 / r;
  f.branch = t >= kGaugeCut * r * r ? GaugeBranch::ThirdReal : GaugeBranch::FirstReal;
  for (int s = 0; s < 2; ++s) {
    const double lam = s == 0 ? r : -r;
    Eigen::Vector3cd v;
    if (f.branch == GaugeBranch::ThirdReal) {
      v << complex(lam * x2, -b * x1), complex(x1 * x2, -lam * b), t;
      v /= std::sqrt(2.0 * t) * r;
    } else {
      const double rho = std::sqrt(x1 * x1 + x2 * x2);
      v << lam * lam - b * b, complex(lam * x1, -b * x2), complex(lam * x2, b * x1);
      v /= std::sqrt(2.0) * rho * r;
    }
    f.vectors.col(1 + s) = v;
  }
  return f;
}

HermitianEigen hermitian_eig_oracle(const Matrix3c& m) {
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw NotHermitian("hermitian_eig_oracle: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix3c> es(m);
  if (es.info() != Eigen::Success) throw NotHermitian("hermitian_eig_oracle: solver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

GapReport gap_on_set(const Profile& profile, BoxSampler& sampler, std::size_t n) {
  GapReport rep;
  rep.inf_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const PhasePoint p = sampler.next();
    const double g = xi_b(p, profile);
    if (g < rep.inf_gap) {
      rep.inf_gap = g;
      rep.argmin = p;
    }
  }
  return rep;
}

SymbolMatrix a0_symbols(const std::shared_ptr<const Profile>& profile) {
  using namespace sym;
  const ScalarSymbol b = sym::b(profile);
  const ScalarSymbol z;
  return {{{z, xi1(), xi2()}, {xi1(), z, -kI * b}, {xi2(), kI * b, z}}};
}

SymbolMatrix a1_symbols(const std::shared_ptr<const Profile>& profile) {
  const ScalarSymbol s = sym::u1(profile) * sym::xi1() + sym::u2(profile) * sym::xi2();
  const ScalarSymbol z;
  return {{{s, z, z}, {z, s, z}, {z, z, s}}};
}

SymbolMatrix eigenframe_symbols(const std::shared_ptr<const Profile>& profile, GaugeBranch branch) {
  using namespace sym;
  const ScalarSymbol b = sym::b(profile);
  const ScalarSymbol r = sym::xi_b(profile);
  SymbolMatrix u;
  u[0][0] = b / r;
  u[1][0] = kI * xi2() / r;
  u[2][0] = -kI * xi1() / r;
  const ScalarSymbol t = pow(xi2(), 2) + pow(b, 2);
  const double root2 = std::sqrt(2.0);
  for (int s = 0; s < 2; ++s) {
    const ScalarSymbol lam = s == 0 ? r : -r;
    const int n = 1 + s;
    if (branch == GaugeBranch::ThirdReal) {
      const ScalarSymbol norm = root2 * r * sqrt(t);
      u[0][n] = (lam * xi2() - kI * b * xi1()) / norm;
      u[1][n] = (xi1() * xi2() - kI * lam * b) / norm;
      u[2][n] = t / norm;
    } else {
      const ScalarSymbol norm = root2 * r * sqrt(pow(xi1(), 2) + pow(xi2(), 2));
      u[0][n] = (pow(xi1(), 2) + pow(xi2(), 2)) / norm;
      u[1][n] = (lam * xi1() - kI * b * xi2()) / norm;
      u[2][n] = (kI * b * xi1() + lam * xi2()) / norm;
    }
  }
  return u;
}

SymbolMatrix d0_symbols(const std::shared_ptr<const Profile>& profile) {
  const ScalarSymbol r = sym::xi_b(profile);
  const ScalarSymbol z;
  return {{{z, z, z}, {z, r, z}, {z, z, -r}}};
}

}  // namespace wavetrace
