#pragma once

#include <string>
#include <vector>

#include "kdvr/rational.hpp"
#include "kdvr/sparse_poly.hpp"

namespace kdvr {

/// Polynomial over Q in integer-indexed variables.
using QPoly = SparsePoly<int, Rational>;
using QMonomial = Monomial<int>;

inline QPoly qpoly_const(Rational c) { return QPoly(std::move(c)); }
inline QPoly qpoly_var(int v) { return QPoly::variable(v, Rational(1)); }

QPoly qpoly_derivative(const QPoly& f, int var);
Rational qpoly_eval(const QPoly& f, const std::vector<Rational>& point);

/// Exponent vector of length nvars for a monomial (variables >= nvars rejected).
std::vector<int> exponent_vector(const QMonomial& m, int nvars);
QMonomial monomial_from_exponents(const std::vector<int>& exps);

std::string qpoly_to_string(const QPoly& f, const std::string& var_prefix = "x");

/// Dense exact matrix over Q.
using QMatrix = std::vector<std::vector<Rational>>;

QMatrix qmatrix_identity(int n);
/// Inverse by Gauss-Jordan elimination; throws ShapeError when singular.
QMatrix qmatrix_inverse(const QMatrix& a);

struct LinearSolveResult {
  bool consistent = false;
  std::vector<Rational> solution;  // a particular solution (free variables 0)
};

/// Solves A x = b exactly for a possibly rank-deficient, possibly
/// non-square A; reports inconsistency instead of throwing.
LinearSolveResult solve_linear_system(QMatrix a, std::vector<Rational> b);

}  // namespace kdvr
