#include <doctest/doctest.h>

#include "support.hpp"
#include "wavetrace/symbols.hpp"

using namespace wavetrace;
using namespace wt_test;

TEST_SUITE("symbols") {

TEST_CASE("coordinate projection and xi_b examples") {
  const PhasePoint p{0, 0, 3, 4};
  CHECK(eval(sym::xi1(), p) == complex(3.0));
  const auto lin = std::make_shared<const Profile>(LinearCoriolis{1.0}, ZeroFlow{});
  CHECK(std::abs(eval(sym::xi_b(lin), p) - 5.0) < 1e-15);
}

TEST_CASE("gradient examples") {
  const auto g = gradient(pow(sym::xi1(), 2.0), PhasePoint{0.7, -0.2, 3, 1});
  CHECK(std::abs(g.grad_xi[0] - 6.0) < 1e-14);
  CHECK(std::abs(g.grad_xi[1]) == 0.0);
  CHECK(std::abs(g.grad_x[0]) == 0.0);
  CHECK(std::abs(g.grad_x[1]) == 0.0);

  const auto sine = std::make_shared<const Profile>(ShiftedSineCoriolis{0.0, 1.0, 1.0}, ZeroFlow{});
  const auto gb = gradient(sym::b(sine), PhasePoint{0.4, 0.0, 1, 2});
  CHECK(std::abs(gb.grad_x[0]) == 0.0);
  CHECK(std::abs(gb.grad_x[1] - 1.0) < 1e-15);
}

TEST_CASE("random trees: evaluation matches an independent tree walk") {
  TreeGen gen(sine_bump_profile(), 11);
  for (int k = 0; k < 300; ++k) {
    const ScalarSymbol s = gen.tree(1 + k % 4);
    const PhasePoint p = gen.point();
    CAPTURE(s.to_string());
    CHECK(rel_err(eval(s, p), reference_eval(s, p)) < 1e-12);
  }
}

TEST_CASE("random trees: gradient matches fourth-order finite differences") {
  TreeGen gen(sine_bump_profile(), 12);
  for (int k = 0; k < 300; ++k) {
    const ScalarSymbol s = gen.tree(1 + k % 4);
    const PhasePoint p = gen.point();
    const SymbolGradient g = gradient(s, p);
    const double scale = std::max({1.0, std::abs(g.value)});
    CAPTURE(s.to_string());
    CHECK(std::abs(g.value - reference_eval(s, p)) <= 1e-12 * scale);
    for (Coordinate c : {Coordinate::X1, Coordinate::X2, Coordinate::Xi1, Coordinate::Xi2}) {
      const complex fd = fd_partial(s, p, c);
      CHECK(std::abs(g[c] - fd) <= 1e-6 * std::max(scale, std::abs(g[c])));
    }
  }
}

TEST_CASE("structural derivative agrees with forward-mode gradient") {
  TreeGen gen(sine_bump_profile(), 13);
  for (int k = 0; k < 200; ++k) {
    const ScalarSymbol s = gen.tree(1 + k % 4);
    const PhasePoint p = gen.point();
    const SymbolGradient g = gradient(s, p);
    for (Coordinate c : {Coordinate::X1, Coordinate::X2, Coordinate::Xi1, Coordinate::Xi2}) {
      CHECK(rel_err(eval(derivative(s, c), p), g[c]) < 1e-11);
    }
  }
}

TEST_CASE("Poisson bracket examples") {
  const auto prof = sine_bump_profile();
  TreeGen gen(prof, 14);
  for (int k = 0; k < 50; ++k) {
    const ScalarSymbol f = gen.tree(3);
    const PhasePoint p = gen.point();
    const SymbolGradient g = gradient(f, p);
    CHECK(rel_err(poisson_bracket(sym::xi1(), f, p), g.grad_x[0]) < 1e-13);
    CHECK(rel_err(poisson_bracket(sym::b(prof), f, p), -prof->db(p.x2) * g.grad_xi[1]) < 1e-13);
    CHECK(std::abs(poisson_bracket(f, f, p)) < 1e-12 * std::max(1.0, std::abs(g.value)));
  }
}

TEST_CASE("Poisson bracket: antisymmetry, Leibniz rule, Jacobi identity, FD oracle") {
  TreeGen gen(sine_bump_profile(), 15);
  gen.second_order_leaves();
  for (int k = 0; k < 60; ++k) {
    const ScalarSymbol f = gen.tree(2);
    const ScalarSymbol g = gen.tree(2);
    const ScalarSymbol h = gen.tree(2);
    const PhasePoint p = gen.point();
    const complex fg = poisson_bracket(f, g, p);
    const double scale = std::max(1.0, std::abs(fg));
    CHECK(std::abs(fg + poisson_bracket(g, f, p)) <= 1e-12 * scale);
    CHECK(std::abs(fg - fd_bracket(f, g, p)) <= 1e-6 * scale);

    const complex lhs = poisson_bracket(f, g * h, p);
    const complex rhs = poisson_bracket(f, g, p) * eval(h, p) + eval(g, p) * poisson_bracket(f, h, p);
    CHECK(std::abs(lhs - rhs) <= 1e-11 * std::max(1.0, std::abs(lhs)));

    const complex j1 = eval(poisson_bracket_symbol(f, poisson_bracket_symbol(g, h)), p);
    const complex j2 = eval(poisson_bracket_symbol(g, poisson_bracket_symbol(h, f)), p);
    const complex j3 = eval(poisson_bracket_symbol(h, poisson_bracket_symbol(f, g)), p);
    const double js = std::max({1.0, std::abs(j1), std::abs(j2), std::abs(j3)});
    CHECK(std::abs(j1 + j2 + j3) <= 1e-10 * js);
  }
}

TEST_CASE("first-order Moyal term") {
  const PhasePoint p{0.3, -0.4, 1.1, 0.2};
  CHECK(std::abs(moyal_subprincipal(sym::xi1(), sym::x1(), p) - complex(0.0, -0.5)) < 1e-15);
  TreeGen gen(sine_bump_profile(), 16);
  for (int k = 0; k < 40; ++k) {
    const ScalarSymbol a = gen.tree(3);
    const ScalarSymbol b = gen.tree(3);
    const PhasePoint q = gen.point();
    CHECK(std::abs(moyal_subprincipal(a, a, q)) < 1e-12 * std::max(1.0, std::abs(eval(a, q))));
    const complex expected = fd_bracket(a, b, q) / complex(0.0, 2.0);
    CHECK(std::abs(moyal_subprincipal(a, b, q) - expected) <= 1e-6 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("compact cutoff symbol") {
  const ScalarSymbol s = sym::x1();
  CHECK(std::abs(eval(bump(s), PhasePoint{0, 0, 0, 0}) - 1.0) < 1e-15);
  CHECK(eval(bump(s), PhasePoint{1.0, 0, 0, 0}) == complex(0.0));
  CHECK(eval(bump(s), PhasePoint{3.0, 0, 0, 0}) == complex(0.0));
  // Derivatives of every order vanish outside the support and match FD inside.
  for (int order = 0; order < 4; ++order) {
    const ScalarSymbol f = bump(s, order);
    for (double x : {-2.0, -0.5, 0.1, 0.6, 0.85}) {
      const PhasePoint p{x, 0, 0, 0};
      const complex d = gradient(f, p).grad_x[0];
      const complex fd = fd4([&](const PhasePoint& q) { return eval(f, q); }, p, Coordinate::X1);
      CHECK(std::abs(d - fd) <= 1e-6 * std::max(1.0, std::abs(d)));
      CHECK(std::abs(eval(bump(s, order + 1), p) - d) < 1e-12 * std::max(1.0, std::abs(d)));
    }
    CHECK(eval(f, PhasePoint{1.5, 0, 0, 0}) == complex(0.0));
  }
  CHECK(bump(s, 2).to_string().find("bump") != std::string::npos);
  CHECK(bump(sym::c(2.0)).is_constant());
  CHECK_THROWS_AS(eval(bump(sym::c(complex(0.0, 1.0)) * s), PhasePoint{0.5, 0, 0, 0}), DomainError);
}

TEST_CASE("constant folding makes vanishing derivatives structurally zero") {
  const auto lin = std::make_shared<const Profile>(LinearCoriolis{2.0}, ZeroFlow{});
  CHECK(derivative(sym::xi1(), Coordinate::X1).is_zero());
  CHECK(derivative(sym::b(lin), Coordinate::Xi2).is_zero());
  CHECK(sym::u1(lin).is_zero());
  CHECK(sym::ddb(lin).is_zero());
  const ScalarSymbol five = sym::c(2.0) + sym::c(3.0);
  REQUIRE(five.is_constant());
  CHECK(five.constant_value() == complex(5.0));
  CHECK((sym::c(1.0) * sym::xi2()).tree_size() == 1);
}

TEST_CASE("evaluation outside the smooth domain throws") {
  CHECK_THROWS_AS(eval(sqrt(sym::x1()), PhasePoint{-1.0, 0, 0, 0}), DomainError);
  CHECK_THROWS_AS(eval(sym::c(1.0) / sym::x1(), PhasePoint{0.0, 0, 0, 0}), DomainError);
  CHECK_NOTHROW(eval(sqrt(sym::x1()), PhasePoint{4.0, 0, 0, 0}));
}

}  // TEST_SUITE
