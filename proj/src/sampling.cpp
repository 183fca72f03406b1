#include "wavetrace/sampling.hpp"

#include <algorithm>
#include <boost/random/sobol.hpp>
#include <boost/random/uniform_01.hpp>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "wavetrace/errors.hpp"

namespace wavetrace {

bool PhaseBox::contains(const PhasePoint& p, double slack) const {
  const auto a = p.to_array();
  for (int k = 0; k < 4; ++k) {
    if (a[k] < lo[k] - slack || a[k] > hi[k] + slack) return false;
  }
  return true;
}

void PhaseBox::validate() const {
  static const char* names[] = {"x1", "x2", "xi1", "xi2"};
  for (int k = 0; k < 4; ++k) {
    if (!std::isfinite(lo[k]) || !std::isfinite(hi[k]) || lo[k] > hi[k]) {
      throw ConfigError(std::string("box side ") + names[k] + " must be finite with lo <= hi");
    }
  }
}

struct BoxSampler::Engine {
  boost::random::sobol sobol{4};
  boost::random::uniform_01<double> unit;
};

BoxSampler::BoxSampler(PhaseBox box, std::uint64_t seed)
    : box_(box), seed_(seed), engine_(std::make_unique<Engine>()) {
  box_.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& s : shift_) s = u(rng);
  // Skip the origin of the unscrambled sequence; it carries no information.
  engine_->sobol.discard(4);
}

BoxSampler::~BoxSampler() = default;
BoxSampler::BoxSampler(BoxSampler&&) noexcept = default;
BoxSampler& BoxSampler::operator=(BoxSampler&&) noexcept = default;

PhasePoint BoxSampler::next() {
  std::array<double, 4> a{};
  for (int k = 0; k < 4; ++k) {
    double v = engine_->unit(engine_->sobol) + shift_[k];
    v -= std::floor(v);
    a[k] = box_.lo[k] + (box_.hi[k] - box_.lo[k]) * v;
  }
  return PhasePoint::from_array(a);
}

std::vector<PhasePoint> BoxSampler::take(std::size_t n) {
  std::vector<PhasePoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(next());
  return out;
}

std::vector<PhasePoint> sample_box(const PhaseBox& box, std::size_t n, std::uint64_t seed) {
  BoxSampler s(box, seed);
  return s.take(n);
}

namespace {

double interval_min_sq(double lo, double hi) {
  if (lo <= 0.0 && hi >= 0.0) return 0.0;
  return std::min(lo * lo, hi * hi);
}

double min_b_sq(const Profile& profile, double lo, double hi) {
  if (const auto* lin = std::get_if<LinearCoriolis>(&profile.coriolis_spec())) {
    return interval_min_sq(lin->beta * lo, lin->beta * hi);
  }
  if (hi == lo) return profile.b(lo) * profile.b(lo);
  constexpr int kScan = 4096;
  double best = profile.b(lo) * profile.b(lo);
  double arg = lo;
  for (int i = 1; i <= kScan; ++i) {
    const double x = lo + (hi - lo) * i / kScan;
    const double v = profile.b(x) * profile.b(x);
    if (v < best) {
      best = v;
      arg = x;
    }
  }
  // Golden-section polish inside the bracketing cell.
  const double cell = (hi - lo) / kScan;
  double a = std::max(lo, arg - cell);
  double c = std::min(hi, arg + cell);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double x1 = c - g * (c - a);
    const double x2 = a + g * (c - a);
    const double f1 = profile.b(x1) * profile.b(x1);
    const double f2 = profile.b(x2) * profile.b(x2);
    if (f1 < f2) {
      c = x2;
      best = std::min(best, f1);
    } else {
      a = x1;
      best = std::min(best, f2);
    }
  }
  return best;
}

}  // namespace

double box_min_xi_b(const PhaseBox& box, const Profile& profile) {
  box.validate();
  const double m = interval_min_sq(box.lo[2], box.hi[2]) + interval_min_sq(box.lo[3], box.hi[3]) +
                   min_b_sq(profile, box.lo[1], box.hi[1]);
  return std::sqrt(m);
}

void require_cond1(const PhaseBox& box, const Profile& profile, double gap_tol) {
  const double m = box_min_xi_b(box, profile);
  if (m < gap_tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "sampling box meets the degenerate set: min <xi>_b = %.6g < gap_tol = %.3g "
                  "(move the box away from xi = 0, b(x2) = 0)",
                  m, gap_tol);
    throw ConfigError(buf);
  }
}

void require_cond2(const PhaseBox& box) {
  if (box.lo[2] <= 0.0 && box.hi[2] >= 0.0) {
    throw Cond2Violation("sampling box xi1 interval contains 0; escape analysis needs xi1 of one sign");
  }
}

}  // namespace wavetrace
