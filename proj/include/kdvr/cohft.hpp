#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include "kdvr/frobenius.hpp"
#include "kdvr/moduli.hpp"

namespace kdvr {

/// Genus-zero cohomological field theory presented through its correlator
/// table: for every insertion multiset of size 3..n_max an exact rational
/// integral of the n-point class. Immutable once built.
struct CohFT0 {
  int rank = 0;
  QMatrix metric;
  QMatrix metric_inv;
  int identity_index = 0;
  bool has_charges = false;
  std::vector<Rational> charges;
  Rational d_conf;
  int n_max = 0;
  std::map<std::vector<int>, Rational> table;  // keys sorted; zeros omitted

  /// Symmetric in the insertions; 0 for absent keys.
  Rational correlator(std::vector<int> insertions) const;
};

/// Invokes fn on every sorted multiset of the given size over 0..rank-1.
void for_each_multiset(int rank, int size, const std::function<void(const std::vector<int>&)>& fn);

/// Correlators by coefficient extraction from a WDVV potential.
CohFT0 from_potential(const FrobeniusPotential& f, int n_max);

/// Rank-one theory of the point: unit class in degree zero.
CohFT0 trivial_cohft(int n_max);

/// Selection rule for the KdV_r primary correlator <e_{m_1}..e_{m_n}>:
/// all m_i <= r-2 and sum m_i = (n-2) r - 2.
bool kdv_selection_rule(int r, const std::vector<int>& m);

/// Pairing of the n-point class against a closed stratum via the restriction
/// property: per-vertex correlators contracted with eta^{-1} along each edge
/// (tails carry the given insertions; labeled trees have no automorphisms).
Rational stratum_integral(const CohFT0& t, const StableTree& tree,
                          const std::vector<int>& insertions);

/// Coordinates of the degree-k component of the class Lambda(insertions) in
/// the spanning set of codimension-k strata classes, by a Poincare-duality
/// solve against codimension n-3-k strata. The Gram system may be singular
/// (strata satisfy linear relations); any particular solution pairs
/// identically against everything.
struct ClassInStrataBasis {
  int n = 0;
  int codim = 0;
  std::vector<StableTree> strata;      // codim-k strata, fixed enumeration order
  std::vector<Rational> coefficients;  // parallel to strata
};

/// Shared scratch for cup-product computations: strata lists, Gram matrices
/// and divisor integrals, all memoized and lock-protected.
class CupCache {
 public:
  IntegralTable& integrals() { return integrals_; }
  const std::vector<StableTree>& strata(int n, int k);
  /// Rows: codim n-3-k strata; columns: codim k strata; entries are integrals
  /// of the concatenated edge monomials.
  const QMatrix& gram(int n, int k);

 private:
  IntegralTable integrals_;
  std::map<std::pair<int, int>, std::vector<StableTree>> strata_;
  std::map<std::pair<int, int>, QMatrix> gram_;
  std::mutex mu_;
};

ClassInStrataBasis class_coords(const CohFT0& t, int n, const std::vector<int>& insertions,
                                int codim, CupCache& cache);

/// Integral over the n-pointed moduli space of the cup product of the two
/// theories' classes: reconstructs the first class degreewise in strata
/// coordinates and pairs each piece against the second theory through the
/// restriction property.
Rational cup_integral(const CohFT0& t1, const CohFT0& t2, int n,
                      const std::vector<int>& insertions1, const std::vector<int>& insertions2,
                      CupCache& cache);

/// Tensor product at correlator level: rank d1*d2, metric eta1 (x) eta2,
/// correlators by cup_integral, charges additive.
CohFT0 tensor(const CohFT0& t1, const CohFT0& t2, int n_max, CupCache& cache);

/// Potential Phi(x) = sum_n <Lambda_n, x^(x n)> / n!, truncated at n_max.
FrobeniusPotential potential_of(const CohFT0& t, int n_max);

nlohmann::ordered_json cohft_to_json(const CohFT0& t);
CohFT0 cohft_from_json(const nlohmann::json& j);

}  // namespace kdvr
