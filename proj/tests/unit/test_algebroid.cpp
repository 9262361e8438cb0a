#include <random>

#include "algebroid/algebroid.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace algebroid;
using testing_support::spec_from;

namespace {

// Rank 2 over the line: a(e1) = d/dx, a(e2) = exp(x) d/dx, [e1, e2] = e2.
AlgebroidSpec exp_line() {
  AlgebroidSpec s(1, 2);
  s.set_anchor(0, 0, Expr::number(1));
  s.set_anchor(1, 0, parse("exp(x1)"));
  s.set_structure(0, 1, 1, Expr::number(1));
  return s;
}

SectionCoeffs random_section(std::mt19937_64& rng, int k) {
  static const char* pool[] = {"1", "x1", "x1^2 - 2", "sin(x1)", "3*x1 + 0.5", "exp(x1)/2", "0"};
  std::uniform_int_distribution<int> pick(0, 6);
  SectionCoeffs out;
  for (int a = 0; a < k; ++a) out.push_back(parse(pool[pick(rng)]));
  return out;
}

}  // namespace

TEST_CASE("anchor evaluation") {
  const Matrix id = tangent_algebroid(2).eval_anchor(std::vector<double>{0.3, -4.0});
  CHECK(id.rows == 2);
  CHECK(id.cols == 2);
  CHECK(id.data == std::vector<double>{1, 0, 0, 1});

  const Matrix empty = spec_from(oracle::so3()).eval_anchor(std::vector<double>{});
  CHECK(empty.data.empty());
  CHECK(empty.cols == 0);

  AlgebroidSpec s(2, 1);
  s.set_anchor(0, 1, parse("x2"));
  CHECK(s.eval_anchor(std::vector<double>{1.0, 5.0})(0, 1) == 5.0);
}

TEST_CASE("anchor errors carry the entry") {
  AlgebroidSpec s(1, 1);
  s.set_anchor(0, 0, parse("ln(x1)"));
  try {
    s.eval_anchor(std::vector<double>{-1.0});
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("anchor") != std::string::npos);
  }
}

TEST_CASE("structure storage is antisymmetric") {
  AlgebroidSpec s(0, 3);
  s.set_structure(1, 0, 2, Expr::number(2));
  CHECK(s.structure(0, 1, 2).is_number(-2));
  CHECK(s.structure(1, 0, 2).is_number(2));
  CHECK(s.structure(1, 1, 2).is_zero());
  CHECK_THROWS_AS(s.set_structure(1, 1, 0, Expr::number(1)), ShapeMismatch);
  CHECK_THROWS_AS(s.set_structure(0, 3, 0, Expr::number(1)), ShapeMismatch);
  CHECK_THROWS_AS(s.set_structure(0, 1, 0, parse("x1")), ShapeMismatch);
}

TEST_CASE("bracket of sections") {
  const AlgebroidSpec so3 = spec_from(oracle::so3());
  const std::vector<double> none;
  CHECK(bracket_sections(so3, {Expr::number(1), Expr(), Expr()}, {Expr(), Expr::number(1), Expr()},
                         none) == std::vector<double>{0, 0, 1});

  const SectionCoeffs X{parse("2"), parse("-1"), parse("0.5")};
  for (double v : bracket_sections(so3, X, X, none)) CHECK(v == 0.0);

  const AlgebroidSpec line = tangent_algebroid(1);
  CHECK(bracket_sections(line, {Expr::number(1)}, {parse("x1")}, std::vector<double>{7.0}) ==
        std::vector<double>{1.0});
}

TEST_CASE("bracket is antisymmetric and satisfies the Leibniz rule") {
  const AlgebroidSpec spec = exp_line();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const char* fs[] = {"x1^3 - x1", "2 + x1", "x1^2*0.5 + 1"};
  for (int trial = 0; trial < 60; ++trial) {
    const SectionCoeffs X = random_section(rng, 2);
    const SectionCoeffs Y = random_section(rng, 2);
    const std::vector<double> x{u(rng)};
    const auto xy = bracket_sections(spec, X, Y, x);
    const auto yx = bracket_sections(spec, Y, X, x);
    for (int g = 0; g < 2; ++g) CHECK(xy[g] == doctest::Approx(-yx[g]).epsilon(1e-14));

    const Expr f = parse(fs[trial % 3]);
    SectionCoeffs fY;
    for (const auto& c : Y) fY.push_back(mul(f, c));
    const Env env{x, {}, std::nullopt};
    // a(X) f computed independently of the library's bracket code.
    const Matrix a = spec.eval_anchor(x);
    double af = 0.0;
    for (int al = 0; al < 2; ++al) af += eval(X[al], env) * a(al, 0) * eval(diff(f, Variable::x(0)), env);
    const auto lhs = bracket_sections(spec, X, fY, x);
    for (int g = 0; g < 2; ++g) {
      const double rhs = eval(f, env) * xy[g] + af * eval(Y[g], env);
      CHECK(std::abs(lhs[g] - rhs) < 1e-9);
    }
  }
}

TEST_CASE("tangent algebroid shape") {
  const AlgebroidSpec t = tangent_algebroid(3);
  CHECK(t.base_dim() == 3);
  CHECK(t.rank() == 3);
  CHECK(t.structure_entries().empty());
  CHECK(t.anchor(2, 2).is_number(1));
  CHECK(t.anchor(2, 1).is_zero());
}
