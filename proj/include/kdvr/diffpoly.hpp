#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kdvr/errors.hpp"
#include "kdvr/scalar.hpp"
#include "kdvr/sparse_poly.hpp"

namespace kdvr {

/// Jet variable u_m^(j): the j-th x-derivative of the dependent variable u_m.
struct JetVar {
  int m = 0;  // dependent-variable index, 0 <= m <= r-2
  int j = 0;  // derivative order, j >= 0

  friend bool operator<(const JetVar& a, const JetVar& b) {
    return a.m != b.m ? a.m < b.m : a.j < b.j;
  }
  friend bool operator==(const JetVar& a, const JetVar& b) { return a.m == b.m && a.j == b.j; }
};

using JetMonomial = Monomial<JetVar>;

/// Differential weight of a monomial: sum of j * exponent over its factors.
int differential_weight(const JetMonomial& m);

/// Polynomial in jet variables with ScalarQL coefficients, closed under the
/// total x-derivative. Carries the hierarchy parameter r as context.
class DiffPolynomial {
 public:
  using Core = SparsePoly<JetVar, ScalarQL>;

  explicit DiffPolynomial(int r) : r_(r) {
    if (r < 2) throw ShapeError("DiffPolynomial: r must be >= 2");
  }
  DiffPolynomial(int r, ScalarQL constant) : DiffPolynomial(r) {
    core_ = Core(std::move(constant));
  }
  DiffPolynomial(int r, Core core) : DiffPolynomial(r) { core_ = std::move(core); }

  /// The variable u_m^(j) as a polynomial.
  static DiffPolynomial jet(int r, int m, int j = 0);

  int r() const { return r_; }
  const Core& core() const { return core_; }
  bool is_zero() const { return core_.is_zero(); }
  bool is_constant() const {
    return core_.is_zero() || (core_.term_count() == 1 && core_.terms().begin()->first.empty());
  }
  ScalarQL constant_term() const { return core_.coefficient({}); }

  bool is_lambda_free() const;
  /// Largest derivative order j appearing, -1 for constants.
  int max_jet_order() const;

  DiffPolynomial operator-() const { return DiffPolynomial(r_, -core_); }
  DiffPolynomial& operator+=(const DiffPolynomial& o) { check(o); core_ += o.core_; return *this; }
  DiffPolynomial& operator-=(const DiffPolynomial& o) { check(o); core_ -= o.core_; return *this; }
  DiffPolynomial& operator*=(const DiffPolynomial& o) { check(o); core_ *= o.core_; return *this; }
  friend DiffPolynomial operator+(DiffPolynomial a, const DiffPolynomial& b) { return a += b; }
  friend DiffPolynomial operator-(DiffPolynomial a, const DiffPolynomial& b) { return a -= b; }
  friend DiffPolynomial operator*(DiffPolynomial a, const DiffPolynomial& b) { return a *= b; }
  DiffPolynomial scaled(const ScalarQL& c) const { return DiffPolynomial(r_, core_.scaled(c)); }

  friend bool operator==(const DiffPolynomial& a, const DiffPolynomial& b) {
    return a.r_ == b.r_ && a.core_ == b.core_;
  }
  friend bool operator!=(const DiffPolynomial& a, const DiffPolynomial& b) { return !(a == b); }

  std::string to_string() const;

 private:
  void check(const DiffPolynomial& o) const {
    if (r_ != o.r_) throw ShapeError("DiffPolynomial: mixing contexts r");
  }

  int r_;
  Core core_;
};

/// Total x-derivative: Leibniz-linear, sends u_m^(j) to u_m^(j+1).
DiffPolynomial dx(const DiffPolynomial& f);
DiffPolynomial dx_pow(DiffPolynomial f, int times);

/// Partial derivative with respect to a single jet variable.
DiffPolynomial jet_partial(const DiffPolynomial& f, const JetVar& v);

/// Terms of exact differential weight `grade`.
DiffPolynomial grade_component(const DiffPolynomial& f, int grade);

/// Variational (Euler-Lagrange) derivative with respect to u_m:
/// sum_j (-1)^j dx^j (df/du_m^(j)). Vanishes exactly on total x-derivatives.
DiffPolynomial variational_derivative(const DiffPolynomial& f, int m);

/// f is dx(g) for some differential polynomial g iff all variational
/// derivatives vanish and f has no constant term.
bool is_total_x_derivative(const DiffPolynomial& f);

/// Substitutes u_m := image(m) (and u_m^(j) := dx^j image(m)) into f.
/// Coefficients pass through unchanged; images must share one context r.
DiffPolynomial substitute_jets(const DiffPolynomial& f,
                               const std::function<DiffPolynomial(int)>& image);

}  // namespace kdvr
