#pragma once

#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "kdvr/cohft.hpp"
#include "kdvr/symbols.hpp"

namespace kdvr {

/// One descendant insertion tau_a(e_m).
using DescInsertion = std::pair<int, int>;  // (a, m)
using DescMultiset = std::vector<DescInsertion>;

/// Variable index of t_a^m in descendant series (r-1 primaries).
inline int t_var(int r, int a, int m) { return a * (r - 1) + m; }

/// Genus-zero descendant correlators of a KdV_r-type theory, computed from
/// the primary correlators by the topological recursion relations and the
/// string equation, with the degree selection filter
/// sum(m_i + r a_i) = (n-2) r - 2. Memoized; safe for concurrent use.
class DescendantCalculator {
 public:
  /// `primaries` must provide all n-point primary correlators needed
  /// (n up to its n_max).
  DescendantCalculator(const CohFT0& primaries, int r);

  Rational correlator(DescMultiset insertions);

  bool selection_rule(const DescMultiset& sorted) const;

  /// Value via one explicit first TRR step: `slot` indexes the reduced
  /// descendant insertion, `anchor1` < `anchor2` index the two distinguished
  /// insertions. Deeper reductions are canonical. Used to check that the
  /// reduction path does not matter.
  Rational correlator_via_trr_choice(const DescMultiset& sorted, std::size_t slot,
                                     std::size_t anchor1, std::size_t anchor2);

 private:
  Rational reduce(const DescMultiset& sorted);
  Rational trr_sum(const DescMultiset& sorted, std::size_t slot, std::size_t anchor1,
                   std::size_t anchor2);

  const CohFT0& t_;
  int r_;
  std::map<DescMultiset, Rational> memo_;
  std::mutex mu_;
};

/// Truncated descendant potential: correlators for n <= N insertions with
/// descendant levels a <= a_max. Coefficient of a monomial of t-variables is
/// the correlator divided by the multiplicities' factorials.
struct DescendantPotential {
  int r = 0;
  int a_max = 0;
  int N = 0;
  std::map<DescMultiset, Rational> correlators;  // sorted keys, zeros omitted

  Rational correlator(DescMultiset insertions) const;
  /// The potential as a polynomial in the variables t_var(r, a, m).
  QPoly series() const;
};

DescendantPotential reconstruct(const CohFT0& primaries, int r, int a_max, int N);

/// Residual scan of the string equation
/// d Phi / d t_0^0 = 1/2 eta_{mn} t_0^m t_0^n + sum t_a^m d Phi / d t_{a-1}^m
/// at correlator level. Empty list = passes.
std::vector<DescMultiset> string_check_failures(const DescendantPotential& p, const QMatrix& eta);
bool string_check(const DescendantPotential& p, const QMatrix& eta);

/// Dilaton relation <tau_1(e_0) X> = (n-2) <X>.
std::vector<DescMultiset> dilaton_check_failures(const DescendantPotential& p);
bool dilaton_check(const DescendantPotential& p);

/// v_m(t) = d^2 Phi / d t_0^0 d t_0^m for m = 0..r-2.
std::vector<QPoly> v_from_phi(const DescendantPotential& p);

/// Evaluates a lambda-free differential polynomial on series images of the
/// jet variables, truncating products beyond max_degree.
QPoly eval_diffpoly_on_series(const DiffPolynomial& f,
                              const std::function<QPoly(int, int)>& jet_image, int max_degree);

struct WittenReport {
  struct FlowCheck {
    int n = 0;
    int m = 0;
    int compare_degree = 0;
    std::vector<QPoly> residuals;  // per component u_k, truncated
    bool zero = true;
    Rational max_abs_coefficient() const;
  };
  int r = 0;
  int a_max = 0;
  int N = 0;
  std::vector<FlowCheck> flows;
  bool all_zero() const {
    for (const auto& f : flows)
      if (!f.zero) return false;
    return true;
  }
};

/// Desk-scale check that the reconstructed descendant potential solves the
/// semiclassical hierarchy: v_m(t) from the potential, u_k(t) through the
/// triangular change of coordinates, and for every requested flow (n, m) the
/// series identity  d u_k / d t_n^m = S_k(u(t))  with x = t_0^0, compared
/// exactly through degree N-3.
WittenReport witten_verify(int r, int a_max, int N,
                           const std::vector<std::pair<int, int>>& flows);

/// Exhaustively re-derives every stored correlator through all admissible
/// first TRR steps; returns multisets with any path disagreement.
std::vector<DescMultiset> trr_path_dependence(const CohFT0& primaries,
                                              const DescendantPotential& p);

nlohmann::ordered_json descendant_to_json(const DescendantPotential& p);
DescendantPotential descendant_from_json(const nlohmann::json& j);

}  // namespace kdvr
