#include <doctest/doctest.h>

#include "support.hpp"
#include "wavetrace/sampling.hpp"

using namespace wavetrace;

TEST_SUITE("sampling") {

TEST_CASE("samples are deterministic per seed, distinct across seeds, inside the box") {
  const PhaseBox box{{-1, 0, 0.5, -2}, {1, 3, 0.5, 2}};
  const auto a = sample_box(box, 500, 9);
  const auto b = sample_box(box, 500, 9);
  const auto c = sample_box(box, 500, 10);
  CHECK(a == b);
  CHECK(a != c);
  for (const auto& p : a) {
    CHECK(box.contains(p));
    CHECK(p.xi1 == 0.5);
  }
  BoxSampler s(box, 9);
  CHECK(s.take(200) == std::vector<PhasePoint>(a.begin(), a.begin() + 200));
  CHECK(s.next() == a[200]);
}

TEST_CASE("low-discrepancy: every coordinate's marginal is close to uniform") {
  const PhaseBox box{{0, 0, 0, 0}, {1, 1, 1, 1}};
  const auto pts = sample_box(box, 4096, 1);
  for (int c = 0; c < 4; ++c) {
    std::array<int, 16> bins{};
    for (const auto& p : pts) bins[std::min(15, static_cast<int>(p.to_array()[c] * 16))]++;
    for (int n : bins) CHECK(std::abs(n - 256) <= 8);
  }
}

TEST_CASE("box validation") {
  CHECK_THROWS_AS((PhaseBox{{0, 0, 1, 0}, {1, 1, 0, 1}}.validate()), ConfigError);
  CHECK_THROWS_AS((PhaseBox{{0, 0, 0, 0}, {1, NAN, 1, 1}}.validate()), ConfigError);
  CHECK_NOTHROW((PhaseBox{{0, 0, 0, 0}, {0, 0, 0, 0}}.validate()));
}

TEST_CASE("box minimum of <xi>_b against a dense scan") {
  const Profile sine(ShiftedSineCoriolis{0.5, 1.0, 1.0}, ZeroFlow{});
  const Profile lin(LinearCoriolis{1.0}, ZeroFlow{});
  for (const Profile* prof : {&sine, &lin}) {
    for (const PhaseBox& box : {PhaseBox{{0, 2, -0.3, 0.2}, {1, 5, 0.4, 0.9}}, PhaseBox{{0, -1, 0.2, -0.5}, {1, 0.5, 1, 0.5}}}) {
      double scan = 1e300;
      const int n = 60;
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
          for (int k = 0; k <= n; ++k) {
            const PhasePoint p{0, box.lo[1] + (box.hi[1] - box.lo[1]) * i / n, box.lo[2] + (box.hi[2] - box.lo[2]) * j / n,
                               box.lo[3] + (box.hi[3] - box.lo[3]) * k / n};
            scan = std::min(scan, xi_b(p, *prof));
          }
      const double m = box_min_xi_b(box, *prof);
      CHECK(m <= scan + 1e-12);
      CHECK(m >= scan - 0.02);
    }
  }
}

TEST_CASE("admissibility conditions") {
  const Profile lin(LinearCoriolis{1.0}, ZeroFlow{});
  CHECK_THROWS_AS(require_cond1(PhaseBox{{0, -1, -1, -1}, {1, 1, 1, 1}}, lin, 1e-6), ConfigError);
  CHECK_NOTHROW(require_cond1(PhaseBox{{0, -1, 0.5, -1}, {1, 1, 1, 1}}, lin, 1e-6));
  CHECK_THROWS_AS(require_cond1(PhaseBox{{0, -1, 0.5, -1}, {1, 1, 1, 1}}, lin, 0.6), ConfigError);
  CHECK_THROWS_AS(require_cond2(PhaseBox{{0, 0, -0.1, 0}, {1, 1, 0.1, 1}}), Cond2Violation);
  CHECK_THROWS_AS(require_cond2(PhaseBox{{0, 0, 0.0, 0}, {1, 1, 0.1, 1}}), Cond2Violation);
  CHECK_NOTHROW(require_cond2(PhaseBox{{0, 0, -1, 0}, {1, 1, -0.1, 1}}));
}

}  // TEST_SUITE
