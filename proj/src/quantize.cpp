#include "wavetrace/quantize.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <optional>
#include <random>

#include "wavetrace/errors.hpp"
#include "wavetrace/parallel.hpp"

namespace wavetrace {

namespace {

constexpr double kPi = std::numbers::pi;

int wrap_delta(int d, int n) {
  // Into [-n/2, n/2).
  int w = ((d + n / 2) % n + n) % n;
  return w - n / 2;
}

int mod(int a, int m) { return ((a % m) + m) % m; }

// exp(2 pi i kappa delta / n) with kappa = c - n/2, delta = d - n/2.
Eigen::MatrixXcd phase_matrix(int n) {
  Eigen::MatrixXcd e(n, n);
  for (int d = 0; d < n; ++d) {
    for (int c = 0; c < n; ++c) {
      const double ang = 2.0 * kPi * static_cast<double>((c - n / 2) * (d - n / 2)) / n;
      e(d, c) = std::polar(1.0, ang);
    }
  }
  return e;
}

bool hermitian_within(const Eigen::MatrixXcd& m, double rel_tol) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

Eigen::MatrixXcd identity_like(const Grid& g, int comps) {
  return Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(comps) * g.size(),
                                    static_cast<Eigen::Index>(comps) * g.size());
}

}  // namespace

void Grid::validate() const {
  if (n < 8 || (n & (n - 1)) != 0) throw ConfigError("grid: n must be a power of two >= 8");
  if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("grid: L must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("grid: eps must lie in (0, 1)");
}

double Grid::xi(int kappa) const { return eps * 2.0 * kPi * kappa / L; }

bool Grid::under_resolved() const { return n < 16; }

const char* operator_kind_name(OperatorKind k) {
  switch (k) {
    case OperatorKind::Multiplication: return "multiplication";
    case OperatorKind::FourierMultiplier: return "fourier-multiplier";
    case OperatorKind::WeylGeneric: return "weyl-generic";
    case OperatorKind::Assembled: return "assembled";
  }
  return "?";
}

double GridFunction::norm() const { return values.norm() * grid.h(); }

void GridFunction::normalize() {
  const double nv = norm();
  if (!(nv > 0.0)) throw DomainError("cannot normalize a zero grid function");
  values /= nv;
}

GridFunction GridOperator::apply(const GridFunction& u) const {
  if (u.values.size() != matrix.cols()) throw ConfigError("operator/function size mismatch");
  GridFunction out{grid, components, matrix * u.values};
  return out;
}

GridOperator weyl_quantize_scalar(const ScalarSymbol& a, const Grid& grid) {
  grid.validate();
  const int n = grid.n;
  const int n2 = 2 * n;
  const int nn = n * n;
  GridOperator op{grid, OperatorKind::WeylGeneric, 1, Eigen::MatrixXcd(nn, nn)};

  // Constants need no tabulation.
  if (a.is_constant()) {
    op.matrix = a.constant_value() * Eigen::MatrixXcd::Identity(nn, nn);
    return op;
  }

  const Eigen::MatrixXcd E = phase_matrix(n);
  const double hh = grid.h() / 2.0;
  std::vector<double> xis(n);
  for (int c = 0; c < n; ++c) xis[c] = grid.xi(c - n / 2);

  // table[m1 * 2n + m2] = n x n matrix over (delta1, delta2).
  std::vector<Eigen::MatrixXcd> table(static_cast<std::size_t>(n2) * n2);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (int m = 0; m < n2 * n2; ++m) {
    try {
      const int m1 = m / n2;
      const int m2 = m % n2;
      Eigen::MatrixXcd S(n, n);
      PhasePoint p{m1 * hh, m2 * hh, 0.0, 0.0};
      for (int c1 = 0; c1 < n; ++c1) {
        p.xi1 = xis[c1];
        for (int c2 = 0; c2 < n; ++c2) {
          p.xi2 = xis[c2];
          S(c1, c2) = eval(a, p);
        }
      }
      table[m] = E * S * E.transpose() / static_cast<double>(nn);
    } catch (...) {
#pragma omp critical(weyl_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (int i = 0; i < nn; ++i) {
    const int i1 = i / n;
    const int i2 = i % n;
    for (int j = 0; j < nn; ++j) {
      const int j1 = j / n;
      const int j2 = j % n;
      const int d1 = wrap_delta(i1 - j1, n);
      const int d2 = wrap_delta(i2 - j2, n);
      const int ma = mod(2 * j1 + d1, n2);
      const int mb = mod(2 * j2 + d2, n2);
      const int r = d1 + n / 2;
      const int c = d2 + n / 2;
      // At the Nyquist offset the midpoint shifted by L/2 is equally valid.
      const bool alt1 = d1 == -n / 2;
      const bool alt2 = d2 == -n / 2;
      complex v = table[ma * n2 + mb](r, c);
      int count = 1;
      if (alt1) {
        v += table[mod(ma + n, n2) * n2 + mb](r, c);
        ++count;
      }
      if (alt2) {
        v += table[ma * n2 + mod(mb + n, n2)](r, c);
        ++count;
      }
      if (alt1 && alt2) {
        v += table[mod(ma + n, n2) * n2 + mod(mb + n, n2)](r, c);
        ++count;
      }
      op.matrix(i, j) = v / static_cast<double>(count);
    }
  }
  return op;
}

GridOperator weyl_quantize_scalar_reference(const ScalarSymbol& a, const Grid& grid) {
  grid.validate();
  const int n = grid.n;
  const int nn = n * n;
  const double h = grid.h();
  GridOperator op{grid, OperatorKind::WeylGeneric, 1, Eigen::MatrixXcd::Zero(nn, nn)};
  for (int i = 0; i < nn; ++i) {
    const int i1 = i / n;
    const int i2 = i % n;
    for (int j = 0; j < nn; ++j) {
      const int j1 = j / n;
      const int j2 = j % n;
      const int d1 = wrap_delta(i1 - j1, n);
      const int d2 = wrap_delta(i2 - j2, n);
      std::vector<double> mids1{std::fmod(j1 * h + 0.5 * d1 * h + grid.L, grid.L)};
      std::vector<double> mids2{std::fmod(j2 * h + 0.5 * d2 * h + grid.L, grid.L)};
      if (d1 == -n / 2) mids1.push_back(std::fmod(mids1[0] + 0.5 * grid.L, grid.L));
      if (d2 == -n / 2) mids2.push_back(std::fmod(mids2[0] + 0.5 * grid.L, grid.L));
      complex sum = 0.0;
      for (int k1 = -n / 2; k1 < n / 2; ++k1) {
        for (int k2 = -n / 2; k2 < n / 2; ++k2) {
          complex s = 0.0;
          for (double y1 : mids1) {
            for (double y2 : mids2) s += eval(a, PhasePoint{y1, y2, grid.xi(k1), grid.xi(k2)});
          }
          s /= static_cast<double>(mids1.size() * mids2.size());
          const double ang = 2.0 * kPi * (k1 * (i1 - j1) + k2 * (i2 - j2)) / n;
          sum += std::polar(1.0, ang) * s;
        }
      }
      op.matrix(i, j) = sum / static_cast<double>(nn);
    }
  }
  return op;
}

GridOperator weyl_quantize_matrix(const SymbolMatrix& entries, const Grid& grid) {
  grid.validate();
  const Eigen::Index nn = grid.size();
  GridOperator op{grid, OperatorKind::WeylGeneric, 3, Eigen::MatrixXcd::Zero(3 * nn, 3 * nn)};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const ScalarSymbol& s = entries[r][c];
      if (s.is_zero()) continue;
      op.matrix.block(r * nn, c * nn, nn, nn) = weyl_quantize_scalar(s, grid).matrix;
    }
  }
  return op;
}

GridOperator multiplication_operator(const Grid& grid, const std::vector<double>& f) {
  grid.validate();
  if (static_cast<int>(f.size()) != grid.size()) throw ConfigError("multiplication: size mismatch");
  GridOperator op{grid, OperatorKind::Multiplication, 1, Eigen::MatrixXcd::Zero(grid.size(), grid.size())};
  for (int i = 0; i < grid.size(); ++i) op.matrix(i, i) = f[i];
  return op;
}

GridOperator fourier_multiplier(const Grid& grid, int direction) {
  grid.validate();
  if (direction != 0 && direction != 1) throw ConfigError("fourier multiplier: direction is 0 or 1");
  const int n = grid.n;
  // One-dimensional: Phi^* diag(xi) Phi / n with Phi(kappa, x) = exp(-2 pi i kappa x / n).
  Eigen::MatrixXcd phi(n, n);
  Eigen::VectorXcd xi(n);
  for (int c = 0; c < n; ++c) {
    const int kappa = c - n / 2;
    xi(c) = grid.xi(kappa);
    for (int x = 0; x < n; ++x) phi(c, x) = std::polar(1.0, -2.0 * kPi * kappa * x / n);
  }
  const Eigen::MatrixXcd d1 = phi.adjoint() * xi.asDiagonal() * phi / static_cast<double>(n);
  GridOperator op{grid, OperatorKind::FourierMultiplier, 1,
                  Eigen::MatrixXcd::Zero(grid.size(), grid.size())};
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int k = 0; k < n; ++k) {
        if (direction == 0) {
          op.matrix(a * n + k, b * n + k) = d1(a, b);
        } else {
          op.matrix(k * n + a, k * n + b) = d1(a, b);
        }
      }
    }
  }
  return op;
}

void require_box_periodic(const Profile& profile, const Grid& grid) {
  const auto& cs = profile.coriolis_spec();
  if (const auto* lin = std::get_if<LinearCoriolis>(&cs)) {
    if (lin->beta != 0.0) {
      throw ProfileBoxMismatch("linear Coriolis profile is unbounded and cannot be periodized on the torus");
    }
  } else if (const auto* sine = std::get_if<ShiftedSineCoriolis>(&cs)) {
    if (sine->amplitude != 0.0) {
      const double cycles = sine->wavenumber * grid.L / (2.0 * kPi);
      if (std::abs(cycles - std::round(cycles)) > 1e-9) {
        throw ProfileBoxMismatch("shifted-sine Coriolis period does not divide the box length L");
      }
    }
  } else {
    throw ProfileBoxMismatch("tanh Coriolis profile is not periodic");
  }
  if (auto box = profile.u_support()) {
    if (box->lo[0] < 0.0 || box->lo[1] < 0.0 || box->hi[0] > grid.L || box->hi[1] > grid.L) {
      throw ProfileBoxMismatch("flow support exceeds the periodic box [0, L)^2");
    }
  }
}

GridOperator build_A_exact(const Profile& profile, const Grid& grid) {
  grid.validate();
  require_box_periodic(profile, grid);
  const int n = grid.n;
  const Eigen::Index nn = grid.size();
  const double eps = grid.eps;

  std::vector<double> b(nn), u1(nn), u2(nn), omega(nn);
  for (int i1 = 0; i1 < n; ++i1) {
    for (int i2 = 0; i2 < n; ++i2) {
      const int i = i1 * n + i2;
      b[i] = profile.b(grid.x(i2));
      const FlowJet f = profile.flow(grid.x(i1), grid.x(i2));
      u1[i] = f.u[0];
      u2[i] = f.u[1];
      omega[i] = f.jac[1][0] - f.jac[0][1];
    }
  }
  const Eigen::MatrixXcd F1 = fourier_multiplier(grid, 0).matrix;
  const Eigen::MatrixXcd F2 = fourier_multiplier(grid, 1).matrix;
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(nn, nn);
  if (!profile.flow_is_zero()) {
    const Eigen::MatrixXcd M1 = multiplication_operator(grid, u1).matrix;
    const Eigen::MatrixXcd M2 = multiplication_operator(grid, u2).matrix;
    S = 0.5 * (M1 * F1 + F1 * M1 + M2 * F2 + F2 * M2);
  }
  const complex i_unit(0.0, 1.0);
  Eigen::MatrixXcd coupling = Eigen::MatrixXcd::Zero(nn, nn);  // i M_b + i eps^2 w / 2
  for (Eigen::Index i = 0; i < nn; ++i) coupling(i, i) = i_unit * (b[i] + 0.5 * eps * eps * omega[i]);

  GridOperator op{grid, OperatorKind::Assembled, 3, Eigen::MatrixXcd::Zero(3 * nn, 3 * nn)};
  auto blk = [&](int r, int c) { return op.matrix.block(r * nn, c * nn, nn, nn); };
  blk(0, 0) = eps * S;
  blk(1, 1) = eps * S;
  blk(2, 2) = eps * S;
  blk(0, 1) = F1;
  blk(1, 0) = F1;
  blk(0, 2) = F2;
  blk(2, 0) = F2;
  blk(1, 2) = -coupling;
  blk(2, 1) = coupling;
  return op;
}

double operator_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  if (hermitian_within(m, 1e-12)) {
    const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("slope fit needs >= 2 paired samples");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double k = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("slope fit needs positive samples");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = k * sxx - sx * sx;
  if (den == 0.0) throw DomainError("slope fit: abscissae coincide");
  return (k * sxy - sx * sy) / den;
}

GaugeBranch grid_gauge_branch(const Profile& profile, const Grid& grid) {
  const int n = grid.n;
  std::optional<GaugeBranch> seen;
  for (int m1 = 0; m1 < 2 * n; ++m1) {
    for (int m2 = 0; m2 < 2 * n; ++m2) {
      for (int k1 = -n / 2; k1 < n / 2; ++k1) {
        for (int k2 = -n / 2; k2 < n / 2; ++k2) {
          const PhasePoint p{0.5 * m1 * grid.h(), 0.5 * m2 * grid.h(), grid.xi(k1), grid.xi(k2)};
          const GaugeBranch g = gauge_branch(profile, p);
          if (!seen) {
            seen = g;
          } else if (*seen != g) {
            throw DomainError("the eigenframe gauge cut crosses the grid's phase-space samples");
          }
        }
      }
    }
  }
  return *seen;
}

GridFunction gaussian_packet(const Grid& grid, const std::array<double, 2>& x0,
                             const std::array<double, 2>& xi0) {
  grid.validate();
  const double eps = grid.eps;
  const double margin = 3.0 * std::sqrt(eps);
  for (int d = 0; d < 2; ++d) {
    if (x0[d] - margin < 0.0 || x0[d] + margin > grid.L) {
      throw MarginError("packet center closer than 3 sqrt(eps) to the box edge");
    }
  }
  const int n = grid.n;
  GridFunction u{grid, 1, Eigen::VectorXcd::Zero(grid.size())};
  const double pref = 1.0 / std::sqrt(kPi * eps);
  for (int i1 = 0; i1 < n; ++i1) {
    for (int i2 = 0; i2 < n; ++i2) {
      complex v = 0.0;
      // Periodization: images beyond +-2 periods are below double precision.
      for (int a = -2; a <= 2; ++a) {
        for (int c = -2; c <= 2; ++c) {
          const double y1 = grid.x(i1) - x0[0] + a * grid.L;
          const double y2 = grid.x(i2) - x0[1] + c * grid.L;
          v += pref * std::polar(std::exp(-(y1 * y1 + y2 * y2) / (2.0 * eps)),
                                 (xi0[0] * y1 + xi0[1] * y2) / eps);
        }
      }
      u.values(i1 * n + i2) = v;
    }
  }
  u.normalize();
  return u;
}

Eigen::MatrixXcd band_compress(const Eigen::MatrixXcd& m, const Grid& grid, int components, int margin) {
  const int n = grid.n;
  const Eigen::Index nn = grid.size();
  if (m.rows() != components * nn || m.cols() != components * nn) {
    throw ConfigError("band_compress: dimension mismatch");
  }
  if (margin < 0 || margin >= n / 2) throw ConfigError("band_compress: margin must lie in [0, n/2)");
  // Columns: orthonormal Fourier modes kept by the band, one block per component.
  std::vector<int> kept;
  for (int c = 0; c < n; ++c) {
    if (std::abs(c - n / 2) <= n / 2 - margin) kept.push_back(c - n / 2);
  }
  const Eigen::Index k = static_cast<Eigen::Index>(kept.size() * kept.size());
  Eigen::MatrixXcd basis = Eigen::MatrixXcd::Zero(components * nn, components * k);
  for (int comp = 0; comp < components; ++comp) {
    Eigen::Index col = 0;
    for (int k1 : kept) {
      for (int k2 : kept) {
        for (int i1 = 0; i1 < n; ++i1) {
          for (int i2 = 0; i2 < n; ++i2) {
            basis(comp * nn + i1 * n + i2, comp * k + col) =
                std::polar(1.0 / n, 2.0 * kPi * (k1 * i1 + k2 * i2) / n);
          }
        }
        ++col;
      }
    }
  }
  return basis.adjoint() * m * basis;
}

GridFunction embed_component(const GridFunction& u, int component) {
  if (u.components != 1) throw ConfigError("embed_component expects a scalar grid function");
  if (component < 0 || component > 2) throw ConfigError("component index must be 0, 1 or 2");
  const Eigen::Index nn = u.grid.size();
  GridFunction out{u.grid, 3, Eigen::VectorXcd::Zero(3 * nn)};
  out.values.segment(component * nn, nn) = u.values;
  return out;
}

double microloc_test(const GridFunction& u, const ScalarSymbol& chi0, const Grid& grid) {
  const GridOperator op = weyl_quantize_scalar(chi0, grid);
  return op.apply(u).norm();
}

ScalarSymbol gaussian_cutoff(const std::array<double, 2>& xc, const std::array<double, 2>& xic,
                             double width) {
  if (!(width > 0.0)) throw ConfigError("cutoff width must be positive");
  const ScalarSymbol d1 = sym::x1() - xc[0];
  const ScalarSymbol d2 = sym::x2() - xc[1];
  const ScalarSymbol e1 = sym::xi1() - xic[0];
  const ScalarSymbol e2 = sym::xi2() - xic[1];
  return exp((d1 * d1 + d2 * d2 + e1 * e1 + e2 * e2) * complex(-0.5 / (width * width)));
}

ScalarSymbol bump_cutoff(const std::array<double, 2>& xc, const std::array<double, 2>& xic,
                         double radius) {
  if (!(radius > 0.0)) throw ConfigError("cutoff radius must be positive");
  const ScalarSymbol d1 = sym::x1() - xc[0];
  const ScalarSymbol d2 = sym::x2() - xc[1];
  const ScalarSymbol e1 = sym::xi1() - xic[0];
  const ScalarSymbol e2 = sym::xi2() - xic[1];
  return bump((d1 * d1 + d2 * d2 + e1 * e1 + e2 * e2) * complex(1.0 / (radius * radius)));
}

DiagonalizationStudy diagonalization_study(const std::shared_ptr<const Profile>& profile,
                                           const StudyOptions& opts) {
  if (opts.eps_list.size() < 3) throw ConfigError("residual study needs at least three eps values");
  DiagonalizationStudy st;
  const SymbolMatrix d0 = d0_symbols(profile);
  for (double eps : opts.eps_list) {
    const Grid grid{opts.n, opts.L, eps};
    grid.validate();
    st.under_resolved = st.under_resolved || grid.under_resolved();
    const Eigen::Index nn = grid.size();
    const GaugeBranch branch = grid_gauge_branch(*profile, grid);
    const Eigen::MatrixXcd A = build_A_exact(*profile, grid).matrix;
    const Eigen::MatrixXcd U = weyl_quantize_matrix(eigenframe_symbols(profile, branch), grid).matrix;
    const Eigen::MatrixXcd D0 = weyl_quantize_matrix(d0, grid).matrix;
    const Eigen::MatrixXcd I = identity_like(grid, 3);

    const Eigen::MatrixXcd R = U.adjoint() * A * U - D0;
    Eigen::MatrixXcd off = R;
    for (int k = 0; k < 3; ++k) off.block(k * nn, k * nn, nn, nn).setZero();
    const Eigen::MatrixXcd E = U.adjoint() * U - I;
    const Eigen::MatrixXcd I1 = E / eps;
    const Eigen::MatrixXcd W = U + eps * unitarity_correction(I1, U);

    st.eps.push_back(eps);
    st.r_diag.push_back(operator_norm(R));
    st.r_diag_offblock.push_back(operator_norm(off));
    st.r_unit.push_back(operator_norm(E));
    const Eigen::MatrixXcd E2 = W.adjoint() * W - I;
    st.r2.push_back(operator_norm(E2));
    if (opts.band_margin > 0) {
      st.r_diag_band.push_back(operator_norm(band_compress(R, grid, 3, opts.band_margin)));
      st.r_unit_band.push_back(operator_norm(band_compress(E, grid, 3, opts.band_margin)));
      st.r2_band.push_back(operator_norm(band_compress(E2, grid, 3, opts.band_margin)));
    }

    if (opts.rossby_packet) {
      const std::array<double, 2> x0{opts.packet_x_frac[0] * grid.L, opts.packet_x_frac[1] * grid.L};
      const GridFunction u = gaussian_packet(grid, x0, opts.packet_xi);
      const Eigen::MatrixXcd rr = R.block(0, 0, nn, nn) / eps;
      const complex e = u.values.dot(rr * u.values) * (grid.h() * grid.h());
      st.rossby_packet.push_back(e.real());
      const Eigen::MatrixXcd tq = weyl_quantize_scalar(tau_R_symbol(profile), grid).matrix;
      st.rossby_quantized.push_back((u.values.dot(tq * u.values) * (grid.h() * grid.h())).real());
      st.rossby_expected.push_back(
          tau_R(*profile, PhasePoint{x0[0], x0[1], opts.packet_xi[0], opts.packet_xi[1]}));
    }
  }
  st.slope_diag = loglog_slope(st.eps, st.r_diag);
  st.slope_diag_offblock = loglog_slope(st.eps, st.r_diag_offblock);
  // Degenerate (exactly constant-frame) cases have r_unit = 0; no slope then.
  auto safe_slope = [&](const std::vector<double>& y) {
    for (double v : y) {
      if (!(v > 0.0)) return 0.0;
    }
    return loglog_slope(st.eps, y);
  };
  st.slope_unit = safe_slope(st.r_unit);
  st.slope_r2 = safe_slope(st.r2);
  if (opts.band_margin > 0) {
    st.slope_diag_band = safe_slope(st.r_diag_band);
    st.slope_unit_band = safe_slope(st.r_unit_band);
    st.slope_r2_band = safe_slope(st.r2_band);
  }
  return st;
}

ResidualReport residual_diag(const std::shared_ptr<const Profile>& profile, const StudyOptions& opts) {
  StudyOptions o = opts;
  o.rossby_packet = false;
  const DiagonalizationStudy st = diagonalization_study(profile, o);
  return ResidualReport{st.eps, st.r_diag_offblock, st.r_unit, st.slope_diag_offblock, st.slope_unit};
}

CorrectedReport unitarity_corrected_residual(const std::shared_ptr<const Profile>& profile,
                                             const StudyOptions& opts) {
  StudyOptions o = opts;
  o.rossby_packet = false;
  const DiagonalizationStudy st = diagonalization_study(profile, o);
  return CorrectedReport{st.eps, st.r2, st.slope_r2};
}

PropagatorComparison compare_propagators(const GridOperator& A, const GridOperator& A_tilde,
                                         const GridFunction& phi0, const std::vector<double>& times,
                                         double time_scale) {
  if (A.matrix.rows() != A_tilde.matrix.rows() || A.matrix.rows() != phi0.values.size()) {
    throw ConfigError("compare_propagators: dimension mismatch");
  }
  if (!hermitian_within(A.matrix, 1e-8)) throw NotHermitian("reference operator is not Hermitian");
  if (!hermitian_within(A_tilde.matrix, 1e-8)) throw NotHermitian("perturbed operator is not Hermitian");

  using Solver = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>;
  const Solver ea(0.5 * (A.matrix + A.matrix.adjoint()));
  const Solver eb(0.5 * (A_tilde.matrix + A_tilde.matrix.adjoint()));
  const Eigen::VectorXcd ca = ea.eigenvectors().adjoint() * phi0.values;
  const Eigen::VectorXcd cb = eb.eigenvectors().adjoint() * phi0.values;
  const Eigen::MatrixXcd diffop = A.matrix - A_tilde.matrix;
  const double w = phi0.grid.h();
  const double n0 = phi0.norm();

  PropagatorComparison out;
  out.times = times;
  std::vector<double> forcing;
  for (double t : times) {
    const double s = t * time_scale;
    Eigen::VectorXcd pa = ca;
    Eigen::VectorXcd pb = cb;
    for (Eigen::Index k = 0; k < pa.size(); ++k) {
      pa(k) *= std::polar(1.0, s * ea.eigenvalues()(k));
      pb(k) *= std::polar(1.0, s * eb.eigenvalues()(k));
    }
    const Eigen::VectorXcd phi = ea.eigenvectors() * pa;
    const Eigen::VectorXcd phit = eb.eigenvectors() * pb;
    out.diff.push_back((phi - phit).norm() * w);
    out.norm_phi.push_back(phi.norm() * w);
    out.max_norm_error = std::max(out.max_norm_error, std::abs(phi.norm() * w - n0));
    forcing.push_back((diffop * phit).norm() * w);
  }
  out.max_diff = out.diff.empty() ? 0.0 : *std::max_element(out.diff.begin(), out.diff.end());
  out.sup_forcing = forcing.empty() ? 0.0 : *std::max_element(forcing.begin(), forcing.end());
  out.bound_check = true;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (out.diff[i] > std::abs(times[i] * time_scale) * out.sup_forcing + 1e-9) out.bound_check = false;
  }
  return out;
}

Eigen::MatrixXcd random_hermitian_unit(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = complex(g(rng), g(rng));
  }
  Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  return h / operator_norm(h);
}

MicrolocStudy microloc_study(const MicrolocOptions& opts) {
  if (opts.eps_list.size() < 2) throw ConfigError("microlocalization study needs at least two eps values");
  if (!(opts.offset > opts.radius)) throw ConfigError("cutoff must not contain the packet center");
  MicrolocStudy st;
  for (double eps : opts.eps_list) {
    const Grid grid{opts.n, opts.L, eps};
    grid.validate();
    st.under_resolved = st.under_resolved || grid.under_resolved();
    const std::array<double, 2> x0{opts.x0_frac[0] * grid.L, opts.x0_frac[1] * grid.L};
    const GridFunction u = gaussian_packet(grid, x0, opts.xi0);
    st.eps.push_back(eps);
    st.displaced.push_back(microloc_test(u, bump_cutoff({x0[0] + opts.offset, x0[1]}, opts.xi0, opts.radius), grid));
    st.centered.push_back(microloc_test(u, bump_cutoff(x0, opts.xi0, opts.radius), grid));
  }
  st.slope = loglog_slope(st.eps, st.displaced);
  return st;
}

StabilityStudy stability_study(const std::shared_ptr<const Profile>& profile, const StabilityOptions& opts) {
  const Grid grid{opts.n, opts.L, opts.eps};
  grid.validate();
  if (opts.samples < 2 || !(opts.t_max > 0.0)) throw ConfigError("stability study needs t_max > 0 and >= 2 samples");
  const GridOperator A = build_A_exact(*profile, grid);
  const Eigen::MatrixXcd P = random_hermitian_unit(A.matrix.rows(), opts.seed);
  StabilityStudy st;
  st.eps = opts.eps;
  st.perturbation = std::pow(opts.eps, 4);
  st.bound = st.perturbation * opts.t_max;
  GridOperator full = A;
  full.matrix += st.perturbation * P;
  GridOperator half = A;
  half.matrix += 0.5 * st.perturbation * P;
  const std::array<double, 2> x0{opts.x0_frac[0] * grid.L, opts.x0_frac[1] * grid.L};
  const GridFunction phi0 = embed_component(gaussian_packet(grid, x0, opts.xi0), 1);
  std::vector<double> times(opts.samples);
  for (int i = 0; i < opts.samples; ++i) times[i] = opts.t_max * i / (opts.samples - 1);
  const PropagatorComparison c = compare_propagators(A, full, phi0, times);
  const PropagatorComparison h = compare_propagators(A, half, phi0, times);
  const PropagatorComparison same = compare_propagators(A, A, phi0, times);
  st.max_diff = c.max_diff;
  st.max_diff_half = h.max_diff;
  st.ratio = c.max_diff > 0.0 ? h.max_diff / c.max_diff : 0.0;
  st.identical_diff = same.max_diff;
  st.energy_bound_holds = c.bound_check && h.bound_check;
  st.max_norm_error = std::max({c.max_norm_error, h.max_norm_error, same.max_norm_error});
  return st;
}

}  // namespace wavetrace
