#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "kdvr/gelfand_dickey.hpp"
#include "test_util.hpp"

using namespace kdvr;

namespace {
DiffPolynomial u(int r, int m, int j = 0) { return DiffPolynomial::jet(r, m, j); }
DiffPolynomial one(int r) { return DiffPolynomial(r, ScalarQL(1)); }
}  // namespace

TEST_CASE("rational arithmetic is canonical") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(-3, -6) == Rational(1, 2));
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(2, 3).pow(-2) == Rational(9, 4));
  CHECK(Rational::from_string("-10/4").to_string() == "-5/2");
  CHECK(Rational(7).to_string() == "7/1");
  CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
}

TEST_CASE("lambda scalar reduces lambda^2 = -1/r") {
  ScalarQL lam = ScalarQL::lambda(2);
  CHECK(lam * lam == ScalarQL(Rational(-1, 2)));
  ScalarQL lam3 = ScalarQL::lambda(3);
  CHECK(lam3 * lam3 * lam3 == ScalarQL(Rational(0), Rational(-1, 3), 3));
  CHECK_THROWS_AS(lam * lam3, ShapeError);
  CHECK((lam + (-lam)).is_zero());
}

TEST_CASE("dx: constants, jet shift, Leibniz") {
  const int r = 2;
  CHECK(dx(one(r)).is_zero());
  CHECK(dx(u(r, 0)) == u(r, 0, 1));
  CHECK(dx(u(r, 0) * u(r, 0, 1)) == u(r, 0, 1) * u(r, 0, 1) + u(r, 0) * u(r, 0, 2));
}

TEST_CASE("dx on a product of distinct dependents") {
  const int r = 3;
  CHECK(dx(u(r, 0) * u(r, 1)) == u(r, 0, 1) * u(r, 1) + u(r, 0) * u(r, 1, 1));
}

TEST_CASE("grade_component picks differential weight") {
  const int r = 2;
  DiffPolynomial f = u(r, 0) * u(r, 0, 1) + u(r, 0, 3);
  CHECK(grade_component(f, 1) == u(r, 0) * u(r, 0, 1));
  CHECK(grade_component(f, 3) == u(r, 0, 3));
  CHECK(grade_component(u(r, 0, 1) * u(r, 0, 1), 1).is_zero());
}

TEST_CASE("variational derivative kills exactly the total derivatives") {
  const int r = 3;
  std::mt19937 rng(20240811);
  for (int trial = 0; trial < 12; ++trial) {
    DiffPolynomial g = kdvr_test::random_diffpoly(rng, r, 2, 3);
    DiffPolynomial f = dx(g);
    CHECK(is_total_x_derivative(f));
  }
  CHECK(!is_total_x_derivative(u(r, 0) * u(r, 0)));  // u^2 is not a total derivative
  CHECK(is_total_x_derivative(u(r, 0) * u(r, 0, 1)));
}

TEST_CASE("psdo composition: defining commutation D u = u D + lambda u'") {
  const int r = 2;
  PseudoDiffOp d = PseudoDiffOp::d_power(r, 1);
  PseudoDiffOp u0(r);
  u0.set_coefficient(0, u(r, 0));
  PseudoDiffOp prod = psdo_mul(d, u0);
  CHECK(prod.coefficient(1) == u(r, 0));
  CHECK(prod.coefficient(0) == u(r, 0, 1).scaled(ScalarQL::lambda(r)));
  CHECK(prod.is_exact());
}

TEST_CASE("psdo composition: D^{-1} u with alternating Leibniz tail") {
  const int r = 2;
  PseudoDiffOp dinv = PseudoDiffOp::d_power(r, -1);
  PseudoDiffOp u0(r);
  u0.set_coefficient(0, u(r, 0));
  const int depth = 5;
  PseudoDiffOp prod = psdo_mul(dinv, u0, -depth);
  ScalarQL lam = ScalarQL::lambda(r);
  CHECK(prod.coefficient(-1) == u(r, 0));
  CHECK(prod.coefficient(-2) == u(r, 0, 1).scaled(-lam));
  CHECK(prod.coefficient(-3) == u(r, 0, 2).scaled(lam * lam));
  // Oracle: composing back with D on the left recovers u_0 D^{-1} ... exactly.
  PseudoDiffOp d = PseudoDiffOp::d_power(r, 1);
  PseudoDiffOp back = psdo_mul(d, prod, -depth + 1);
  PseudoDiffOp expected = psdo_mul(u0, dinv);
  for (int k = 0; k >= -depth + 1; --k) CHECK(back.coefficient(k) == expected.coefficient(k));
}

TEST_CASE("psdo: (D + w D^{-1})^2 by direct expansion oracle") {
  const int r = 2;
  PseudoDiffOp a = PseudoDiffOp::d_power(r, 1);
  PseudoDiffOp tail(r);
  tail.set_coefficient(-1, u(r, 0));
  a += tail;
  PseudoDiffOp sq = psdo_mul(a, a, -4);
  // D^2 + D w D^{-1} + w D^{-1} D + w D^{-1} w D^{-1}
  // = D^2 + 2w + lambda w' D^{-1} + (w^2 + ...) D^{-2} + ...
  ScalarQL lam = ScalarQL::lambda(r);
  CHECK(sq.coefficient(2) == one(r));
  CHECK(sq.coefficient(1).is_zero());
  CHECK(sq.coefficient(0) == u(r, 0).scaled(ScalarQL(Rational(2))));
  CHECK(sq.coefficient(-1) == u(r, 0, 1).scaled(lam));
}

TEST_CASE("psdo multiplication is associative to truncation") {
  const int r = 3;
  std::mt19937 rng(7);
  for (int trial = 0; trial < 6; ++trial) {
    PseudoDiffOp a(r), b(r), c(r);
    for (int k = -1; k <= 1; ++k) {
      a.set_coefficient(k, kdvr_test::random_diffpoly(rng, r, 1, 2));
      b.set_coefficient(k, kdvr_test::random_diffpoly(rng, r, 1, 2));
      c.set_coefficient(k, kdvr_test::random_diffpoly(rng, r, 1, 2));
    }
    const int keep = -4;
    PseudoDiffOp ab_c = psdo_mul(psdo_mul(a, b, keep - 2), c, keep);
    PseudoDiffOp a_bc = psdo_mul(a, psdo_mul(b, c, keep - 2), keep);
    for (int k = 3; k >= keep; --k) CHECK(ab_c.coefficient(k) == a_bc.coefficient(k));
  }
}

TEST_CASE("plus/minus parts recompose and split by exponent sign") {
  const int r = 2;
  PseudoDiffOp q = PseudoDiffOp::d_power(r, 2);
  PseudoDiffOp tail(r);
  tail.set_coefficient(-1, u(r, 0));
  q += tail;
  CHECK(q.plus_part() == PseudoDiffOp::d_power(r, 2));
  CHECK(q.minus_part() == tail);
  CHECK(q.plus_part() + q.minus_part() == q);
  // A differential operator is its own plus part.
  PseudoDiffOp l = PseudoDiffOp::generic_operator(3);
  CHECK(l.plus_part() == l);
}

TEST_CASE("residue: coefficient of D^{-1}") {
  const int r = 2;
  CHECK(PseudoDiffOp::d_power(r, 2).residue().is_zero());
  PseudoDiffOp trunc = PseudoDiffOp::d_power(r, 2);
  trunc.set_min_known(0);
  CHECK_THROWS_AS(trunc.residue(), TruncationError);
}

TEST_CASE("root_r: w_1 = -u_0/2 for the order-2 operator") {
  PseudoDiffOp l = PseudoDiffOp::generic_operator(2);
  PseudoDiffOp root = root_r(l, 4);
  CHECK(root.coefficient(1) == one(2));
  CHECK(root.coefficient(0).is_zero());
  CHECK(root.coefficient(-1) == u(2, 0).scaled(ScalarQL(Rational(-1, 2))));
  CHECK(root.residue() == u(2, 0).scaled(ScalarQL(Rational(-1, 2))));
  // Square back to L.
  PseudoDiffOp sq = psdo_mul(root, root, -3);
  for (int k = 2; k >= -3; --k) CHECK(sq.coefficient(k) == l.coefficient(k));
}

TEST_CASE("root_r: free case root of D^r is D") {
  for (int r = 2; r <= 5; ++r) {
    PseudoDiffOp l = PseudoDiffOp::d_power(r, r);
    PseudoDiffOp root = root_r(l, 5);
    CHECK(root.coefficient(1) == one(r));
    for (int s = 0; s >= -5; --s) CHECK(root.coefficient(s).is_zero());
  }
}

TEST_CASE("root_r: w_1 = -u_1/3 for r = 3") {
  PseudoDiffOp l = PseudoDiffOp::generic_operator(3);
  PseudoDiffOp root = root_r(l, 3);
  CHECK(root.coefficient(-1) == u(3, 1).scaled(ScalarQL(Rational(-1, 3))));
}

TEST_CASE("root_r rejects non-normalized operators") {
  PseudoDiffOp bad = PseudoDiffOp::d_power(2, 2);
  PseudoDiffOp extra(2);
  extra.set_coefficient(1, u(2, 0));  // nonzero D^{r-1} coefficient
  bad += extra;
  CHECK_THROWS_AS(root_r(bad, 2), ShapeError);
}

TEST_CASE("root-power identity for r in 2..5 at depth 6") {
  for (int r = 2; r <= 5; ++r) {
    PseudoDiffOp l = PseudoDiffOp::generic_operator(r);
    const int depth = 6;
    PseudoDiffOp root = root_r(l, depth + r - 1);
    PseudoDiffOp power = psdo_power(root, r, -depth);
    for (int k = r; k >= -depth; --k) CHECK(power.coefficient(k) == l.coefficient(k));
  }
}

TEST_CASE("residue trace property: res(AB - BA) is a total x-derivative") {
  const int r = 2;
  std::mt19937 rng(99);
  for (int trial = 0; trial < 8; ++trial) {
    PseudoDiffOp a(r), b(r);
    for (int k = -1; k <= 1; ++k) {
      a.set_coefficient(k, kdvr_test::random_diffpoly(rng, r, 1, 2));
      b.set_coefficient(k, kdvr_test::random_diffpoly(rng, r, 1, 2));
    }
    PseudoDiffOp comm = commutator(a, b, -2);
    CHECK(is_total_x_derivative(comm.residue()));
  }
}

TEST_CASE("k_const against the defining product") {
  CHECK(k_const(2, 0, 0) == Rational(2));
  CHECK(k_const(5, 0, 0) == Rational(5));
  CHECK(k_const(3, 0, 1) == Rational(3, 2));
  CHECK(k_const(2, 1, 0) == Rational(-4, 3));
  CHECK(k_const(3, 1, 1) == Rational(-9, 10));
  CHECK(k_const(2, 2, 0) == Rational(8, 15));  // 2^3 / (1*3*5)
}

TEST_CASE("gd_flow (0,0) is the x-translation on every component") {
  for (int r = 2; r <= 4; ++r) {
    PseudoDiffOp l = PseudoDiffOp::generic_operator(r);
    FlowResult flow = gd_flow(l, 0, 0);
    for (int k = 0; k <= r - 2; ++k) CHECK(flow.du_dt[k] == u(r, k, 1));
  }
}

TEST_CASE("gd_flow vanishes when r divides m+1") {
  for (int r = 2; r <= 4; ++r) {
    PseudoDiffOp l = PseudoDiffOp::generic_operator(r);
    FlowResult flow = gd_flow(l, 0, r - 1);
    for (const auto& c : flow.du_dt) CHECK(c.is_zero());
    FlowResult flow2 = gd_flow(l, 1, r - 1);
    for (const auto& c : flow2.du_dt) CHECK(c.is_zero());
  }
}

TEST_CASE("gd_flow r=2 (1,0): KdV shape A u u' + B u''' with golden constants") {
  PseudoDiffOp l = PseudoDiffOp::generic_operator(2);
  FlowResult flow = gd_flow(l, 1, 0);
  DiffPolynomial s = flow.du_dt[0];
  // Oracle: solve (D + w1 D^{-1} + w2 D^{-2} + w3 D^{-3} + w4 D^{-4})^2 = L
  // by hand-expanding the square directly (no root_r involved).
  const int r = 2;
  ScalarQL lam = ScalarQL::lambda(r);
  DiffPolynomial w1 = u(r, 0).scaled(ScalarQL(Rational(-1, 2)));
  // [D^0 of R^2] : 2 w1 = -u  -> w1 = -u/2
  DiffPolynomial w2 = dx(w1).scaled(-lam * ScalarQL(Rational(1, 2)));
  // [D^-1] : 2 w2 + lambda w1' = 0
  DiffPolynomial w3 = (dx(w2).scaled(lam) + (w1 * w1)).scaled(ScalarQL(Rational(-1, 2)));
  // [D^-2] : 2 w3 + lambda w2' + w1^2 = 0
  PseudoDiffOp root_oracle = PseudoDiffOp::d_power(r, 1);
  root_oracle.set_coefficient(-1, w1);
  root_oracle.set_coefficient(-2, w2);
  root_oracle.set_coefficient(-3, w3);
  root_oracle.set_min_known(-3);
  PseudoDiffOp check_sq = psdo_mul(root_oracle, root_oracle, -2);
  for (int k = 2; k >= -2; --k) CHECK(check_sq.coefficient(k) == l.coefficient(k));

  PseudoDiffOp q = psdo_power(root_oracle, 3, 0);
  PseudoDiffOp bracket = commutator(q.plus_part(), l);
  DiffPolynomial oracle = bracket.coefficient(0).scaled(lam * ScalarQL(k_const(2, 1, 0)));
  CHECK(s == oracle);

  // Golden values frozen from the oracle run: du/dt = u u' + (1/12) u'''.
  DiffPolynomial expected =
      u(r, 0) * u(r, 0, 1) + u(r, 0, 3).scaled(ScalarQL(Rational(1, 12)));
  CHECK(s == expected);
}

TEST_CASE("gd_flow components are lambda-free and respect the order bound") {
  PseudoDiffOp l = PseudoDiffOp::generic_operator(3);
  for (auto [n, m] : std::vector<std::pair<int, int>>{{0, 0}, {0, 1}, {1, 0}}) {
    FlowResult flow = gd_flow(l, n, m);
    for (const auto& c : flow.du_dt) CHECK(c.is_lambda_free());
  }
}

TEST_CASE("flow commutativity: x-flow against the first KdV flows") {
  CommuteReport r2 = flows_commute_check(2, {{0, 0}, {1, 0}});
  CHECK(r2.all_commute());
}

TEST_CASE("flow commutativity r=2: (1,0) vs (2,0)") {
  CommuteReport report = flows_commute_check(2, {{1, 0}, {2, 0}});
  CHECK(report.all_commute());
}

TEST_CASE("flow commutativity r=3: (0,0), (0,1), (1,0) pairwise") {
  CommuteReport report = flows_commute_check(3, {{0, 0}, {0, 1}, {1, 0}});
  CHECK(report.all_commute());
}

TEST_CASE("psdo_mul truncation errors surface") {
  const int r = 2;
  PseudoDiffOp a = PseudoDiffOp::d_power(r, 1);
  a.set_min_known(-2);
  PseudoDiffOp b = PseudoDiffOp::d_power(r, 1);
  CHECK_THROWS_AS(psdo_mul(a, b, -5), TruncationError);
}
