#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "kdvr/rational.hpp"

namespace kdvr {

/// Subset of the tail labels 1..n, bit i-1 standing for label i.
using LabelSet = std::uint32_t;

inline int labelset_size(LabelSet s) { return __builtin_popcount(s); }
inline LabelSet full_labelset(int n) { return (LabelSet{1} << n) - 1; }
inline bool labelset_contains(LabelSet s, int label) { return (s >> (label - 1)) & 1u; }

/// Boundary divisor of the moduli space of n-pointed genus-zero stable
/// curves: a two-block partition {S, S^c} of the tail labels with both blocks
/// of size >= 2. Canonical representative: the block not containing label 1.
struct BoundaryDivisor {
  int n = 0;
  LabelSet block = 0;

  BoundaryDivisor() = default;
  /// Canonicalizes an arbitrary block (complements if it contains label 1)
  /// and validates both block sizes.
  BoundaryDivisor(int n, LabelSet raw_block);

  friend bool operator==(const BoundaryDivisor& a, const BoundaryDivisor& b) {
    return a.n == b.n && a.block == b.block;
  }
  friend bool operator<(const BoundaryDivisor& a, const BoundaryDivisor& b) {
    return a.n != b.n ? a.n < b.n : a.block < b.block;
  }
  std::string to_string() const;
};

/// Divisors intersect iff their canonical blocks are nested or disjoint.
bool compatible(const BoundaryDivisor& a, const BoundaryDivisor& b);

/// All boundary divisors on n labels in canonical order; empty for n < 4.
std::vector<BoundaryDivisor> enumerate_divisors(int n);

/// Genus-zero stable graph with all tails labeled: a tree, every vertex of
/// valence >= 3, stored through its edge set (one boundary divisor per edge;
/// the edges of any stable tree are pairwise compatible and conversely).
struct StableTree {
  int n = 0;
  std::vector<LabelSet> edges;  // canonical blocks, sorted

  StableTree() = default;
  StableTree(int n, std::vector<LabelSet> edge_blocks);

  int codim() const { return static_cast<int>(edges.size()); }

  struct Vertex {
    LabelSet tails = 0;
    std::vector<int> neighbors;   // adjacent vertex indices
    std::vector<int> edge_index;  // parallel to neighbors: index into edges
    int valence() const { return labelset_size(tails) + static_cast<int>(neighbors.size()); }
  };
  /// Vertex structure recovered from the nested-block (laminar) family.
  /// Vertex 0 is the component whose region contains label 1.
  std::vector<Vertex> vertices() const;

  friend bool operator==(const StableTree& a, const StableTree& b) {
    return a.n == b.n && a.edges == b.edges;
  }
  friend bool operator<(const StableTree& a, const StableTree& b) {
    return a.n != b.n ? a.n < b.n : a.edges < b.edges;
  }
  std::string to_string() const;
};

/// All stable trees on n labeled tails with exactly `codim` edges.
std::vector<StableTree> enumerate_strata(int n, int codim);

/// The class of the closed stratum as a product of its edge divisors (all
/// multiplicity one; genus-zero strata meet transversally).
std::vector<BoundaryDivisor> stratum_class_as_monomial(const StableTree& t);

/// psi_i = sum of D_S over S containing i but neither j nor k.
std::vector<BoundaryDivisor> psi_as_boundary(int n, int i, int j, int k);

/// Memoizing evaluator for top intersection numbers on the moduli space of
/// n-pointed genus-zero stable curves. All values exact; safe for concurrent
/// use.
class IntegralTable {
 public:
  /// Integral of a product of boundary divisors (with multiplicity); 0 unless
  /// the total multiplicity is n-3.
  Rational divisor_monomial_integral(int n, const std::vector<BoundaryDivisor>& monomial);

  /// Integral of psi_1^{a_1} ... psi_n^{a_n}; 0 unless sum a_i = n-3.
  Rational psi_monomial_integral(int n, const std::vector<int>& exponents);

  /// General integrand: psi powers by label times a divisor multiset.
  Rational mixed_integral(int n, const std::vector<int>& psi, std::vector<LabelSet> divisors);

  std::size_t cache_size() const;

 private:
  Rational evaluate(int n, const std::vector<int>& psi, const std::vector<LabelSet>& divisors);

  using Key = std::tuple<int, std::vector<int>, std::vector<LabelSet>>;
  std::map<Key, Rational> memo_;
  mutable std::mutex mu_;
};

}  // namespace kdvr
