#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <limits>
#include <ostream>

#include "report.hpp"
#include "wavetrace/errors.hpp"
#include "wavetrace/normal_form.hpp"
#include "wavetrace/parallel.hpp"
#include "wavetrace/quantize.hpp"
#include "wavetrace/raytrace.hpp"
#include "wavetrace/spectral.hpp"

namespace wavetrace::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string output_dir(const Scenario& sc, const RunOptions& opt) {
  const std::string dir = opt.out_dir.empty() ? sc.out_dir : opt.out_dir;
  std::filesystem::create_directories(dir);
  return dir;
}

std::string join(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

std::vector<PhasePoint> require_points(const Scenario& sc, const char* command) {
  auto pts = sc.initial_points();
  if (pts.empty()) {
    throw ConfigError(sc.source + ": " + command + " needs [initial] points or an [initial.sampler]");
  }
  return pts;
}

void check_sampler_cond1(const Scenario& sc, const Profile& profile) {
  if (sc.sampler) require_cond1(sc.sampler->box, profile, sc.ray.gap_tol);
}

void check_points_cond1(const Scenario& sc, const Profile& profile) {
  check_sampler_cond1(sc, profile);
  for (std::size_t i = 0; i < sc.points.size(); ++i) {
    if (xi_b(sc.points[i], profile) < sc.ray.gap_tol) {
      throw ConfigError(sc.source + ": initial.points[" + std::to_string(i) +
                        "] has <xi>_b below ray.gap_tol; move it off the degenerate set xi = 0, b(x2) = 0");
    }
  }
}

bool poincare(ModeId m) { return m != ModeId::Rossby; }

void check_points_cond2(const Scenario& sc) {
  if (sc.sampler) require_cond2(sc.sampler->box);
  for (std::size_t i = 0; i < sc.points.size(); ++i) {
    if (sc.points[i].xi1 == 0.0) {
      throw Cond2Violation(sc.source + ": initial.points[" + std::to_string(i) +
                           "] has xi1 = 0; Poincare escape analysis needs xi1 != 0");
    }
  }
}

Json bounds_json(const Bounds4& b) {
  Json j;
  Json lo = Json::array();
  Json hi = Json::array();
  for (int i = 0; i < 4; ++i) {
    lo.push_back(number(b.lo[i]));
    hi.push_back(number(b.hi[i]));
  }
  j["lo"] = lo;
  j["hi"] = hi;
  return j;
}

// Exit time predicted by the constant x1-velocity of a Poincare ray.
double predicted_exit(const Profile& profile, const PhasePoint& p0, ModeId mode, const EscapeSpec& esc) {
  const double r = xi_b(p0, profile);
  const double sign = mode == ModeId::PoincarePlus ? 1.0 : -1.0;
  const double v = sign * p0.xi1 / r;
  if (!(p0.x1 > esc.u_minus && p0.x1 < esc.u_plus)) return 0.0;
  return v > 0.0 ? (esc.u_plus - p0.x1) / v : (esc.u_minus - p0.x1) / v;
}

Json window(double lo, double hi) { return Json::array({number(lo), number(hi)}); }

Json criterion(const std::string& name, double value, Json win, bool pass) {
  Json j;
  j["name"] = name;
  j["value"] = number(value);
  j["window"] = std::move(win);
  j["pass"] = pass;
  return j;
}

Json vec_json(const std::vector<double>& v) {
  Json j = Json::array();
  for (double x : v) j.push_back(number(x));
  return j;
}

}  // namespace

int cmd_eig(const Scenario& sc, const RunOptions& opt, std::ostream& log) {
  const auto profile = sc.profile();
  check_sampler_cond1(sc, *profile);
  const auto pts = require_points(sc, "eig");
  const std::string dir = output_dir(sc, opt);
  const OutputHeader h = make_header(sc, "eig");

  std::vector<std::string> cols{"index", "x1", "x2", "xi1", "xi2", "status", "gap", "delta_R", "delta_plus",
                                "delta_minus", "branch"};
  const char* mode_tag[3] = {"R", "p", "m"};
  for (int m = 0; m < 3; ++m) {
    for (int j = 0; j < 3; ++j) {
      cols.push_back(std::string("u") + mode_tag[m] + std::to_string(j) + "_re");
      cols.push_back(std::string("u") + mode_tag[m] + std::to_string(j) + "_im");
    }
  }
  CsvWriter csv(join(dir, "eig.csv"), h, cols);
  std::size_t degenerate = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const PhasePoint& p = pts[i];
    std::vector<Cell> row{static_cast<std::int64_t>(i), p.x1, p.x2, p.xi1, p.xi2};
    try {
      const EigenFrame f = eigendecompose(*profile, p, sc.ray.gap_tol);
      min_gap = std::min(min_gap, f.gap);
      row.insert(row.end(), {std::string("ok"), f.gap, f.deltas[0], f.deltas[1], f.deltas[2],
                             std::string(f.branch == GaugeBranch::ThirdReal ? "third-real" : "first-real")});
      for (int m = 0; m < 3; ++m) {
        for (int j = 0; j < 3; ++j) {
          row.push_back(f.vectors(j, m).real());
          row.push_back(f.vectors(j, m).imag());
        }
      }
    } catch (const DegenerateError&) {
      ++degenerate;
      row.insert(row.end(), {std::string("degenerate"), xi_b(p, *profile), kNaN, kNaN, kNaN, std::string("none")});
      for (int k = 0; k < 18; ++k) row.push_back(kNaN);
    }
    csv.row(row);
  }
  Json j;
  j["header"] = header_json(h);
  j["rows"] = pts.size();
  j["degenerate_rows"] = degenerate;
  j["min_gap"] = number(min_gap);
  j["gap_tol"] = sc.ray.gap_tol;
  write_json(join(dir, "eig.json"), j);
  log << "eig: " << pts.size() << " rows, " << degenerate << " degenerate -> " << join(dir, "eig.csv") << "\n";
  return degenerate > 0 ? kExitNumerical : kExitOk;
}

int cmd_hamiltonians(const Scenario& sc, const RunOptions& opt, std::ostream& log) {
  const auto profile = sc.profile();
  check_points_cond1(sc, *profile);
  const auto pts = require_points(sc, "hamiltonians");
  const std::string dir = output_dir(sc, opt);
  const OutputHeader h = make_header(sc, "hamiltonians");
  const auto rows = hamiltonian_sweep(profile, pts, sc.ray.gap_tol);

  CsvWriter csv(join(dir, "hamiltonians.csv"), h,
                {"index", "x1", "x2", "xi1", "xi2", "tau_R", "bracket_part", "flow_part", "total", "total_imag",
                 "abs_error", "tau_plus", "tau_minus"});
  double max_err = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    csv.row({static_cast<std::int64_t>(i), r.point.x1, r.point.x2, r.point.xi1, r.point.xi2, r.closed_form,
             r.bracket_part.real(), r.flow_part.real(), r.total.real(), r.total.imag(), r.abs_error, r.tau_plus,
             r.tau_minus});
    max_err = std::max(max_err, r.abs_error);
  }
  constexpr double kTol = 1e-8;
  const bool pass = max_err <= kTol;
  Json j;
  j["header"] = header_json(h);
  j["rows"] = rows.size();
  j["max_abs_error"] = number(max_err);
  j["tolerance"] = kTol;
  j["pass"] = pass;
  write_json(join(dir, "hamiltonians.json"), j);
  log << "hamiltonians: " << rows.size() << " rows, max |generic - closed form| = " << format_double(max_err)
      << (pass ? " (pass)" : " (FAIL)") << "\n";
  return (opt.check && !pass) ? kExitCriterion : kExitOk;
}

int cmd_trace(const Scenario& sc, const RunOptions& opt, std::ostream& log) {
  const auto profile = sc.profile();
  check_points_cond1(sc, *profile);
  if (poincare(sc.mode) && sc.escape) check_points_cond2(sc);
  const auto pts = require_points(sc, "trace");
  sc.ray.validate();
  const std::string dir = output_dir(sc, opt);
  const OutputHeader h = make_header(sc, "trace");

  Json rays = Json::array();
  bool degenerate = false;
  bool criteria_ok = true;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const Trajectory tr = integrate(*profile, pts[k], sc.ray);
    const std::string name = "trace_" + std::to_string(k) + ".csv";
    CsvWriter csv(join(dir, name), h, {"t", "x1", "x2", "xi1", "xi2", "tau", "xi_b", "poincare_inv", "dx1"});
    for (std::size_t i = 0; i < tr.size(); ++i) {
      const PhasePoint& p = tr.points[i];
      csv.row({tr.times[i], p.x1, p.x2, p.xi1, p.xi2, tr.tau[i], tr.xi_b[i], tr.poincare_inv[i], tr.dx1[i]});
    }
    const InvariantReport inv = invariant_report(tr);
    Json r;
    r["index"] = k;
    r["file"] = name;
    r["start"] = point_json(pts[k]);
    r["final"] = point_json(tr.points.back());
    r["t_end"] = number(tr.t_end());
    r["stop"] = stop_reason_name(tr.stop);
    r["accepted_steps"] = tr.accepted;
    r["rejected_steps"] = tr.rejected;
    r["invariants"] = {{"tau_drift", number(inv.tau_drift)},
                       {"xi1_drift", number(inv.xi1_drift)},
                       {"poincare_inv_drift", number(inv.poincare_inv_drift)},
                       {"dx1_spread", number(inv.dx1_spread)},
                       {"min_xi_b", number(inv.min_xi_b)}};
    if (tr.stop == StopReason::DegenerateEvent) degenerate = true;
    if (poincare(sc.mode) && sc.escape) {
      const auto t_exit = exit_time(tr, sc.escape->u_minus, sc.escape->u_plus);
      const double pred = predicted_exit(*profile, pts[k], sc.mode, *sc.escape);
      r["exit_time"] = t_exit ? number(*t_exit) : Json(nullptr);
      r["predicted_exit_time"] = number(pred);
      if (t_exit) r["exit_time_error"] = number(std::abs(*t_exit - pred));
    }
    if (sc.mode == ModeId::Rossby && sc.eta) {
      const double bound = xi_b_lower_bound(*profile, std::abs(tr.tau.front()), *sc.eta);
      const bool holds = inv.min_xi_b >= bound - 1e-9;
      criteria_ok = criteria_ok && holds;
      r["xi_b_floor"] = {{"eta", *sc.eta}, {"bound", number(bound)}, {"min_xi_b", number(inv.min_xi_b)},
                         {"holds", holds}};
    }
    if (sc.mode == ModeId::Rossby && sc.trapping) {
      const TrappingVerdict v = trapping_classify(*profile, pts[k], sc.ray);
      r["trapping"] = {{"kind", trapping_kind_name(v.kind)},
                       {"period", v.period ? number(*v.period) : Json(nullptr)},
                       {"mean_dx1", v.mean_dx1 ? number(*v.mean_dx1) : Json(nullptr)}};
    }
    rays.push_back(r);
  }
  Json j;
  j["header"] = header_json(h);
  j["mode"] = mode_name(sc.mode);
  j["ray_config"] = {{"rtol", sc.ray.rtol}, {"atol", sc.ray.atol}, {"t_max", sc.ray.t_max},
                     {"gap_tol", sc.ray.gap_tol}, {"reverse", sc.ray.reverse}};
  j["rays"] = rays;
  write_json(join(dir, "trace.json"), j);
  log << "trace: " << pts.size() << " ray(s) -> " << join(dir, "trace.json") << "\n";
  if (degenerate) return kExitNumerical;
  return (opt.check && !criteria_ok) ? kExitCriterion : kExitOk;
}

int cmd_ensemble(const Scenario& sc, const RunOptions& opt, std::ostream& log) {
  const auto profile = sc.profile();
  if (!sc.sampler) throw ConfigError(sc.source + ": ensemble needs an [initial.sampler] table");
  check_points_cond1(sc, *profile);
  if (poincare(sc.mode) && sc.escape) check_points_cond2(sc);
  sc.ray.validate();
  const auto pts = sc.initial_points();
  const std::string dir = output_dir(sc, opt);
  const OutputHeader h = make_header(sc, "ensemble");

  const EnsembleResult res = ensemble_evolve(*profile, pts, sc.ray, sc.horizons);

  std::vector<double> t_exit(pts.size(), kNaN);
  std::vector<double> t_pred(pts.size(), kNaN);
  if (poincare(sc.mode) && sc.escape) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
    for (std::size_t i = 0; i < pts.size(); ++i) {
      try {
        const Trajectory tr = integrate(*profile, pts[i], sc.ray);
        if (auto t = exit_time(tr, sc.escape->u_minus, sc.escape->u_plus)) t_exit[i] = *t;
        t_pred[i] = predicted_exit(*profile, pts[i], sc.mode, *sc.escape);
      } catch (...) {
#pragma omp critical(ensemble_exit_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  CsvWriter csv(join(dir, "ensemble.csv"), h,
                {"index", "x1_0", "x2_0", "xi1_0", "xi2_0", "x1", "x2", "xi1", "xi2", "t_end", "stop", "failed",
                 "tau0", "tau_drift", "min_xi_b", "steps", "exit_time", "predicted_exit_time"});
  double tau_max = 0.0;
  double xi1_lo = std::numeric_limits<double>::infinity();
  double xi1_hi = -std::numeric_limits<double>::infinity();
  double max_exit_err = 0.0;
  for (const RayOutcome& r : res.rays) {
    csv.row({static_cast<std::int64_t>(r.index), r.start.x1, r.start.x2, r.start.xi1, r.start.xi2, r.final.x1,
             r.final.x2, r.final.xi1, r.final.xi2, r.t_end, std::string(stop_reason_name(r.stop)),
             static_cast<std::int64_t>(r.failed), r.tau0, r.tau_drift, r.min_xi_b,
             static_cast<std::int64_t>(r.steps), t_exit[r.index], t_pred[r.index]});
    tau_max = std::max(tau_max, std::abs(r.tau0));
    xi1_lo = std::min(xi1_lo, r.start.xi1);
    xi1_hi = std::max(xi1_hi, r.start.xi1);
    if (std::isfinite(t_exit[r.index])) max_exit_err = std::max(max_exit_err, std::abs(t_exit[r.index] - t_pred[r.index]));
  }

  Json j;
  j["header"] = header_json(h);
  j["mode"] = mode_name(sc.mode);
  j["rays"] = res.rays.size();
  j["failures"] = res.failures;
  j["bbox"] = bounds_json(res.bbox);
  Json at = Json::array();
  for (std::size_t k = 0; k < res.horizons.size(); ++k) {
    Json b = bounds_json(res.bbox_at[k]);
    b["t"] = res.horizons[k];
    at.push_back(b);
  }
  j["bbox_at"] = at;
  j["min_xi_b"] = number(res.min_xi_b);
  bool ok = res.failures == 0;
  if (poincare(sc.mode)) {
    const double change = std::max(std::abs(res.bbox.lo[2] - xi1_lo), std::abs(res.bbox.hi[2] - xi1_hi));
    const bool unchanged = change <= 1e-10;
    ok = ok && unchanged;
    j["xi1_bbox"] = {{"initial", window(xi1_lo, xi1_hi)},
                     {"all_time", window(res.bbox.lo[2], res.bbox.hi[2])},
                     {"change", number(change)},
                     {"unchanged", unchanged}};
    if (sc.escape) j["max_exit_time_error"] = number(max_exit_err);
  } else if (sc.eta) {
    const double bound = xi_b_lower_bound(*profile, tau_max, *sc.eta);
    const bool holds = res.min_xi_b >= bound - 1e-9;
    ok = ok && holds;
    j["xi_b_floor"] = {{"eta", *sc.eta}, {"tau_max", number(tau_max)}, {"bound", number(bound)},
                       {"min_xi_b", number(res.min_xi_b)}, {"holds", holds}};
  }
  write_json(join(dir, "ensemble.json"), j);
  log << "ensemble: " << res.rays.size() << " rays, " << res.failures << " failed -> " << join(dir, "ensemble.json")
      << "\n";
  if (res.failures > 0) return kExitNumerical;
  return (opt.check && !ok) ? kExitCriterion : kExitOk;
}

int cmd_mourre(const Scenario& sc, const RunOptions& opt, std::ostream& log) {
  const auto profile = sc.profile();
  if (!sc.sampler) throw ConfigError(sc.source + ": mourre needs an [initial.sampler] table over the set K");
  require_cond1(sc.sampler->box, *profile, sc.ray.gap_tol);
  require_cond2(sc.sampler->box);
  if (!(sc.sampler->box.lo[2] > 0.0)) {
    throw Cond2Violation(sc.source + ": initial.sampler: the Mourre set needs xi1 > 0 (lo[2] > 0)");
  }
  const std::string dir = output_dir(sc, opt);
  const OutputHeader h = make_header(sc, "mourre");
  BoxSampler sampler(sc.sampler->box, sc.sampler->seed);
  const MourreReport rep = mourre_bound(profile, sampler, sc.sampler->count);
  Json j;
  j["header"] = header_json(h);
  j["samples"] = sc.sampler->count;
  j["inf_bracket"] = number(rep.inf_bracket);
  j["argmin"] = point_json(rep.argmin);
  j["d0"] = number(rep.d0);
  j["D0"] = number(rep.D0);
  j["D1"] = number(rep.D1);
  j["bound_d0_over_D1"] = number(rep.theoretical);
  j["d0_over_D0"] = number(rep.stated_constant);
  j["holds"] = rep.holds;
  write_json(join(dir, "mourre.json"), j);
  log << "mourre: inf {tau_+, x1} = " << format_double(rep.inf_bracket) << ", d0/D1 = " << format_double(rep.theoretical)
      << (rep.holds ? " (holds)" : " (FAILS)") << "\n";
  return (opt.check && !rep.holds) ? kExitCriterion : kExitOk;
}

int cmd_quantize_check(const Scenario& sc, const RunOptions& opt, std::ostream& log) {
  if (!sc.grid) throw ConfigError(sc.source + ": quantize-check needs a [grid] table (n, L, eps_list)");
  const GridSpec& g = *sc.grid;
  const auto profile = sc.profile();
  require_box_periodic(*profile, Grid{g.n, g.L, g.eps_list.front()});
  const std::string dir = output_dir(sc, opt);
  const OutputHeader h = make_header(sc, "quantize-check");
  const bool coarse = Grid{g.n, g.L, g.eps_list.front()}.under_resolved();
  if (coarse) log << "quantize-check: n = " << g.n << " is under-resolved; slopes are reported but not meaningful\n";

  StudyOptions so;
  so.n = g.n;
  so.L = g.L;
  so.eps_list = g.eps_list;
  so.band_margin = g.band_margin;
  so.rossby_packet = g.rossby_packet;
  const DiagonalizationStudy st = diagonalization_study(profile, so);
  const MicrolocStudy ml = microloc_study(g.microloc);
  const StabilityStudy stab = stability_study(profile, g.stability);

  bool improvement = true;
  for (std::size_t i = 0; i < st.eps.size(); ++i) improvement = improvement && st.r2[i] <= st.r_unit[i];

  Json crit = Json::array();
  crit.push_back(criterion("diagonalization_slope", st.slope_diag, window(0.8, 1.2),
                           st.slope_diag >= 0.8 && st.slope_diag <= 1.2));
  crit.push_back(criterion("unitarity_slope", st.slope_unit, window(0.8, 1.2),
                           st.slope_unit >= 0.8 && st.slope_unit <= 1.2));
  crit.push_back(criterion("corrected_unitarity_slope", st.slope_r2, window(1.7, 2.3),
                           st.slope_r2 >= 1.7 && st.slope_r2 <= 2.3));
  crit.push_back(criterion("corrected_improves", improvement ? 1.0 : 0.0, window(1.0, 1.0), improvement));
  crit.push_back(criterion("microlocalization_slope", ml.slope, window(2.0, kNaN), ml.slope >= 2.0));
  crit.push_back(criterion("stability_max_diff", stab.max_diff, window(0.0, stab.bound * (1.0 + 1e-6)),
                           stab.max_diff <= stab.bound * (1.0 + 1e-6)));
  crit.push_back(criterion("stability_halving_ratio", stab.ratio, window(0.45, 0.55),
                           stab.ratio >= 0.45 && stab.ratio <= 0.55));
  crit.push_back(criterion("stability_energy_inequality", stab.energy_bound_holds ? 1.0 : 0.0, window(1.0, 1.0),
                           stab.energy_bound_holds));
  bool all = true;
  for (const auto& c : crit) all = all && c["pass"].get<bool>();

  Json diag;
  diag["eps"] = vec_json(st.eps);
  diag["r_diag"] = vec_json(st.r_diag);
  diag["r_diag_offblock"] = vec_json(st.r_diag_offblock);
  diag["r_unit"] = vec_json(st.r_unit);
  diag["r2"] = vec_json(st.r2);
  diag["slopes"] = {{"r_diag", number(st.slope_diag)},
                    {"r_diag_offblock", number(st.slope_diag_offblock)},
                    {"r_unit", number(st.slope_unit)},
                    {"r2", number(st.slope_r2)}};
  if (g.band_margin > 0) {
    diag["band_limited"] = {{"margin", g.band_margin},
                            {"r_diag", vec_json(st.r_diag_band)},
                            {"r_unit", vec_json(st.r_unit_band)},
                            {"r2", vec_json(st.r2_band)},
                            {"slopes",
                             {{"r_diag", number(st.slope_diag_band)},
                              {"r_unit", number(st.slope_unit_band)},
                              {"r2", number(st.slope_r2_band)}}}};
  }
  if (g.rossby_packet) {
    diag["rossby_packet"] = {{"expectation", vec_json(st.rossby_packet)},
                             {"quantized_tau_R", vec_json(st.rossby_quantized)},
                             {"tau_R_at_center", vec_json(st.rossby_expected)}};
  }

  Json j;
  j["header"] = header_json(h);
  j["grid"] = {{"n", g.n}, {"L", g.L}, {"eps_list", vec_json(g.eps_list)}};
  j["resolution"] = coarse ? "under-resolved" : "resolved";
  j["diagonalization"] = diag;
  j["microlocalization"] = {{"eps", vec_json(ml.eps)},
                            {"displaced", vec_json(ml.displaced)},
                            {"centered", vec_json(ml.centered)},
                            {"slope", number(ml.slope)}};
  j["stability"] = {{"eps", stab.eps},
                    {"perturbation", number(stab.perturbation)},
                    {"bound", number(stab.bound)},
                    {"max_diff", number(stab.max_diff)},
                    {"max_diff_half", number(stab.max_diff_half)},
                    {"ratio", number(stab.ratio)},
                    {"identical_diff", number(stab.identical_diff)},
                    {"max_norm_error", number(stab.max_norm_error)},
                    {"energy_inequality", stab.energy_bound_holds}};
  j["criteria"] = crit;
  j["pass"] = all;
  write_json(join(dir, "quantize.json"), j);

  CsvWriter csv(join(dir, "quantize_residuals.csv"), h,
                {"eps", "r_diag", "r_diag_offblock", "r_unit", "r2", "r_diag_band", "r_unit_band", "r2_band"});
  for (std::size_t i = 0; i < st.eps.size(); ++i) {
    const bool band = g.band_margin > 0;
    csv.row({st.eps[i], st.r_diag[i], st.r_diag_offblock[i], st.r_unit[i], st.r2[i],
             band ? st.r_diag_band[i] : kNaN, band ? st.r_unit_band[i] : kNaN, band ? st.r2_band[i] : kNaN});
  }
  // Packet modulus on the finest grid, for plotting.
  const Grid fine{g.n, g.L, g.eps_list.back()};
  const GridFunction u = gaussian_packet(fine, {g.microloc.x0_frac[0] * g.L, g.microloc.x0_frac[1] * g.L}, g.microloc.xi0);
  CsvWriter pk(join(dir, "quantize_packet.csv"), h, {"x1", "x2", "re", "im", "abs"});
  for (int i1 = 0; i1 < fine.n; ++i1) {
    for (int i2 = 0; i2 < fine.n; ++i2) {
      const complex v = u.values(i1 * fine.n + i2);
      pk.row({fine.x(i1), fine.x(i2), v.real(), v.imag(), std::abs(v)});
    }
  }

  for (const auto& c : crit) {
    log << "quantize-check: " << c["name"].get<std::string>() << " = "
        << (c["value"].is_null() ? std::string("null") : format_double(c["value"].get<double>()))
        << (c["pass"].get<bool>() ? " pass" : " FAIL") << "\n";
  }
  return (opt.check && !all) ? kExitCriterion : kExitOk;
}

}  // namespace wavetrace::cli
