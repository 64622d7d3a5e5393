#include "kdvr/qpoly.hpp"

#include <sstream>

#include "kdvr/errors.hpp"

namespace kdvr {

QPoly qpoly_derivative(const QPoly& f, int var) {
  QPoly out;
  for (const auto& [mono, coeff] : f.terms()) {
    for (std::size_t i = 0; i < mono.size(); ++i) {
      if (mono[i].first != var) continue;
      QMonomial m = mono;
      Rational c = coeff * Rational(m[i].second);
      if (--m[i].second == 0) m.erase(m.begin() + i);
      out.add_term(m, c);
    }
  }
  return out;
}

Rational qpoly_eval(const QPoly& f, const std::vector<Rational>& point) {
  Rational out(0);
  for (const auto& [mono, coeff] : f.terms()) {
    Rational term = coeff;
    for (const auto& [v, e] : mono) {
      if (v < 0 || v >= static_cast<int>(point.size()))
        throw ShapeError("qpoly_eval: variable out of range");
      term *= point[v].pow(e);
    }
    out += term;
  }
  return out;
}

std::vector<int> exponent_vector(const QMonomial& m, int nvars) {
  std::vector<int> exps(nvars, 0);
  for (const auto& [v, e] : m) {
    if (v < 0 || v >= nvars) throw ShapeError("exponent_vector: variable out of range");
    exps[v] = e;
  }
  return exps;
}

QMonomial monomial_from_exponents(const std::vector<int>& exps) {
  QMonomial m;
  for (int v = 0; v < static_cast<int>(exps.size()); ++v)
    if (exps[v] != 0) m.emplace_back(v, exps[v]);
  return m;
}

std::string qpoly_to_string(const QPoly& f, const std::string& var_prefix) {
  if (f.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [mono, coeff] : f.terms()) {
    if (!first) os << " + ";
    first = false;
    os << "(" << coeff.to_string_compact() << ")";
    for (const auto& [v, e] : mono) {
      os << "*" << var_prefix << v;
      if (e > 1) os << "^" << e;
    }
  }
  return os.str();
}

QMatrix qmatrix_identity(int n) {
  QMatrix m(n, std::vector<Rational>(n, Rational(0)));
  for (int i = 0; i < n; ++i) m[i][i] = Rational(1);
  return m;
}

QMatrix qmatrix_inverse(const QMatrix& a) {
  const int n = static_cast<int>(a.size());
  QMatrix work = a;
  QMatrix inv = qmatrix_identity(n);
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int row = col; row < n; ++row)
      if (!work[row][col].is_zero()) {
        pivot = row;
        break;
      }
    if (pivot < 0) throw ShapeError("qmatrix_inverse: singular matrix");
    std::swap(work[pivot], work[col]);
    std::swap(inv[pivot], inv[col]);
    Rational d = work[col][col];
    for (int j = 0; j < n; ++j) {
      work[col][j] /= d;
      inv[col][j] /= d;
    }
    for (int row = 0; row < n; ++row) {
      if (row == col || work[row][col].is_zero()) continue;
      Rational f = work[row][col];
      for (int j = 0; j < n; ++j) {
        work[row][j] -= f * work[col][j];
        inv[row][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

LinearSolveResult solve_linear_system(QMatrix a, std::vector<Rational> b) {
  const int rows = static_cast<int>(a.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(a[0].size());
  std::vector<int> pivot_col_of_row;
  int row = 0;
  for (int col = 0; col < cols && row < rows; ++col) {
    int pivot = -1;
    for (int rr = row; rr < rows; ++rr)
      if (!a[rr][col].is_zero()) {
        pivot = rr;
        break;
      }
    if (pivot < 0) continue;
    std::swap(a[pivot], a[row]);
    std::swap(b[pivot], b[row]);
    Rational d = a[row][col];
    for (int j = col; j < cols; ++j) a[row][j] /= d;
    b[row] /= d;
    for (int rr = 0; rr < rows; ++rr) {
      if (rr == row || a[rr][col].is_zero()) continue;
      Rational f = a[rr][col];
      for (int j = col; j < cols; ++j) a[rr][j] -= f * a[row][j];
      b[rr] -= f * b[row];
    }
    pivot_col_of_row.push_back(col);
    ++row;
  }
  LinearSolveResult out;
  for (int rr = row; rr < rows; ++rr)
    if (!b[rr].is_zero()) return out;  // 0 = nonzero: inconsistent
  out.consistent = true;
  out.solution.assign(cols, Rational(0));
  for (int rr = 0; rr < row; ++rr) out.solution[pivot_col_of_row[rr]] = b[rr];
  return out;
}

}  // namespace kdvr
