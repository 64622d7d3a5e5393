#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kdvr/diffpoly.hpp"

namespace kdvr {

/// Truncated Laurent-type expansion sum_k f_k D^k in the symbol
/// D = lambda * d/dx (lambda^2 = -1/r) with differential-polynomial
/// coefficients.
///
/// Truncation bookkeeping: min_known() is the lowest exponent whose
/// coefficient is guaranteed correct; coefficients below it are unknown, not
/// zero. An operator without a truncation bound (min_known() empty) is exact:
/// every exponent absent from the map is exactly zero. Every operation
/// records the tightest bound guaranteed correct for its result.
class PseudoDiffOp {
 public:
  explicit PseudoDiffOp(int r) : r_(r) {
    if (r < 2) throw ShapeError("PseudoDiffOp: r must be >= 2");
  }

  /// D^k with unit coefficient.
  static PseudoDiffOp d_power(int r, int k);
  /// The generic normalized operator L = D^r - sum_{m=0}^{r-2} u_m D^m.
  static PseudoDiffOp generic_operator(int r);

  int r() const { return r_; }
  bool is_zero() const { return coeffs_.empty(); }
  bool is_exact() const { return !min_known_.has_value(); }
  std::optional<int> min_known() const { return min_known_; }
  /// Depth M: coefficients of D^{-m} are guaranteed for m <= M.
  int depth() const { return min_known_ ? -*min_known_ : kInfiniteDepth; }
  static constexpr int kInfiniteDepth = 1 << 28;

  /// Largest exponent with a nonzero coefficient (0 for the zero operator).
  int top_order() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }
  /// True when all stored exponents are >= 0 and the operator is exact.
  bool is_differential() const {
    return is_exact() && (coeffs_.empty() || coeffs_.begin()->first >= 0);
  }

  DiffPolynomial coefficient(int k) const;
  const std::map<int, DiffPolynomial>& coefficients() const { return coeffs_; }

  void set_coefficient(int k, DiffPolynomial f);
  void set_min_known(std::optional<int> m);

  PseudoDiffOp operator-() const;
  PseudoDiffOp& operator+=(const PseudoDiffOp& o);
  PseudoDiffOp& operator-=(const PseudoDiffOp& o);
  friend PseudoDiffOp operator+(PseudoDiffOp a, const PseudoDiffOp& b) { return a += b; }
  friend PseudoDiffOp operator-(PseudoDiffOp a, const PseudoDiffOp& b) { return a -= b; }
  PseudoDiffOp scaled(const ScalarQL& c) const;

  /// Keeps exponents >= 0. Exact by construction.
  PseudoDiffOp plus_part() const;
  /// Keeps exponents < 0; inherits the truncation bound. plus + minus = whole.
  PseudoDiffOp minus_part() const;

  /// Coefficient of D^{-1}; requires depth >= 1.
  DiffPolynomial residue() const;

  /// True for exact operators of the normalized shape
  /// D^r + 0*D^{r-1} + (coefficients only at exponents <= r-2 >= 0).
  bool is_normalized_form() const;

  friend bool operator==(const PseudoDiffOp& a, const PseudoDiffOp& b) {
    return a.r_ == b.r_ && a.min_known_ == b.min_known_ && a.coeffs_ == b.coeffs_;
  }

  std::string to_string() const;

 private:
  void prune();

  int r_;
  std::map<int, DiffPolynomial> coeffs_;
  std::optional<int> min_known_;
};

/// Lowest result exponent that the operands' truncation bounds can guarantee.
/// Empty when the product of exact operands is itself exact (left factor
/// differential, so the composition tails terminate).
std::optional<int> mul_supported_min(const PseudoDiffOp& a, const PseudoDiffOp& b);

/// Operator composition keeping exponents >= min_keep, via the generalized
/// Leibniz rule D^k f = sum_j C(k, j) lambda^j f^(j) D^{k-j}. Throws
/// TruncationError when min_keep asks for more than the operands support.
/// min_keep may be omitted for combinations whose product is exact.
PseudoDiffOp psdo_mul(const PseudoDiffOp& a, const PseudoDiffOp& b,
                      std::optional<int> min_keep = std::nullopt);

/// Convenience wrapper: product guaranteed to depth `depth` (exponents
/// >= -depth).
PseudoDiffOp psdo_mul_depth(const PseudoDiffOp& a, const PseudoDiffOp& b, int depth);

/// a^n keeping exponents >= min_keep (n >= 1); intermediate products are
/// truncated no tighter than correctness allows.
PseudoDiffOp psdo_power(const PseudoDiffOp& a, int n, std::optional<int> min_keep);

PseudoDiffOp commutator(const PseudoDiffOp& a, const PseudoDiffOp& b,
                        std::optional<int> min_keep = std::nullopt);

}  // namespace kdvr
