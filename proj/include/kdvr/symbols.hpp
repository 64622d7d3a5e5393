#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kdvr/diffpoly.hpp"
#include "kdvr/gelfand_dickey.hpp"
#include "kdvr/psdo.hpp"

namespace kdvr {

/// Laurent polynomial / truncated Laurent series in the commuting symbol p
/// with differential-polynomial coefficients. Same truncation bookkeeping as
/// PseudoDiffOp, but multiplication is commutative.
class PSymbol {
 public:
  explicit PSymbol(int r) : r_(r) {
    if (r < 2) throw ShapeError("PSymbol: r must be >= 2");
  }

  static PSymbol p_power(int r, int k);
  /// The generic symbol p^r - sum_{m=0}^{r-2} u_m p^m.
  static PSymbol generic_symbol(int r);

  int r() const { return r_; }
  bool is_zero() const { return coeffs_.empty(); }
  bool is_exact() const { return !min_known_.has_value(); }
  std::optional<int> min_known() const { return min_known_; }
  int top_order() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }

  DiffPolynomial coefficient(int k) const;
  const std::map<int, DiffPolynomial>& coefficients() const { return coeffs_; }
  void set_coefficient(int k, DiffPolynomial f);
  void set_min_known(std::optional<int> m);

  PSymbol operator-() const;
  PSymbol& operator+=(const PSymbol& o);
  PSymbol& operator-=(const PSymbol& o);
  friend PSymbol operator+(PSymbol a, const PSymbol& b) { return a += b; }
  friend PSymbol operator-(PSymbol a, const PSymbol& b) { return a -= b; }
  PSymbol scaled(const ScalarQL& c) const;

  PSymbol plus_part() const;
  PSymbol minus_part() const;
  DiffPolynomial residue() const { return coefficient(-1); }

  bool is_normalized_form() const;

  friend bool operator==(const PSymbol& a, const PSymbol& b) {
    return a.r_ == b.r_ && a.min_known_ == b.min_known_ && a.coeffs_ == b.coeffs_;
  }

  std::string to_string() const;

 private:
  void prune();

  int r_;
  std::map<int, DiffPolynomial> coeffs_;
  std::optional<int> min_known_;
};

/// Forgets operator ordering: D^k -> p^k coefficientwise.
PSymbol symbolize(const PseudoDiffOp& q);

/// Commutative product keeping exponents >= min_keep (needed only when an
/// operand is truncated).
PSymbol symbol_mul(const PSymbol& a, const PSymbol& b, std::optional<int> min_keep = std::nullopt);

/// d/dp: shifts exponents down, scaling by the exponent.
PSymbol symbol_dp(const PSymbol& a);
/// d/dx: total derivative applied to every coefficient.
PSymbol symbol_dx(const PSymbol& a);

/// {A, B} = dA/dp dB/dx - dB/dp dA/dx.
PSymbol poisson(const PSymbol& a, const PSymbol& b);

/// Laurent expansion of Lsym^{n + (m+1)/r} in powers of p^{-1}, keeping
/// exponents >= min_keep. Lsym must be the normalized symbol. Leading term is
/// p^{nr+m+1}.
PSymbol symbol_root_power(const PSymbol& lsym, int n, int m, int min_keep);

/// Semiclassical flow: dL~/dt = (k_{n,m}/r) {(L~^{n+(m+1)/r})_+, L~},
/// returned as the right-hand sides of du_k/dt. Asserts the bracket lands in
/// p^0..p^{r-2} and that the full-symbol bracket vanishes to truncation.
FlowResult sc_flow(const PSymbol& lsym, int n, int m);

/// v_n = -(r/(n+1)) res(L~^{(n+1)/r}) for n = 0..r-2, as polynomials in the
/// u_m. Triangular: v_n = u_{r-2-n} + polynomial in u_{r-n}..u_{r-2}.
std::vector<DiffPolynomial> v_from_u(int r);

/// Inverse triangular system: u_m as polynomials in jet variables that stand
/// for v_0..v_{r-2} (index m of JetVar = index n of v_n).
std::vector<DiffPolynomial> u_from_v(int r);

}  // namespace kdvr
