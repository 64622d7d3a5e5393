#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kdvr/qpoly.hpp"

#include "json.hpp"

namespace kdvr {

/// Genus-zero Frobenius potential in flat coordinates x^0..x^{d-1}: cubic-
/// and-higher polynomial, nondegenerate metric, flat identity, and
/// quasi-homogeneity data (charges q_a, conformal dimension d_conf; the
/// monomial weight under weights 1 - q_a is 3 - d_conf throughout).
struct FrobeniusPotential {
  int dim = 0;
  QPoly phi;
  QMatrix metric;
  int identity_index = 0;
  std::vector<Rational> charges;
  Rational d_conf;
  /// Highest total degree to which phi is known; -1 means phi is the complete
  /// polynomial.
  int truncation_degree = -1;

  /// Degree to which a WDVV residual built from two third derivatives is
  /// trustworthy (unbounded for complete potentials).
  std::optional<int> reliable_residual_degree() const {
    if (truncation_degree < 0) return std::nullopt;
    return truncation_degree - 3;
  }
};

/// eta(e_a, e_b) = delta_{a+b, r-2} on the (r-1)-dimensional state space.
QMatrix metric_kdv(int r);

/// Frobenius potential of the A_{r-1} singularity in the normalization with
/// metric_kdv(r), flat identity e_0, charges q_m = m/r and d_conf = (r-2)/r.
///
/// Construction: W(p) = p^r - sum u_m p^m; flat coordinates
/// x^m = v_{r-2-m} with v_n = -(r/(n+1)) [p^{-1}] W^{(n+1)/r}; third
/// derivatives by the exact residue-sum trace
///   c_abc = -[p^{r-2}] ( dW/dx^a dW/dx^b dW/dx^c  mod  W'(p)/r ),
/// no algebraic numbers materialized. The potential is recovered from
/// sum_{abc} x^a x^b x^c c_abc degreewise.
FrobeniusPotential lg_potential(int r);

struct WdvvViolation {
  int a, b, c, d;
  QPoly residual;
};
struct WdvvReport {
  std::vector<WdvvViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks d_a d_b d_e Phi eta^{ef} d_f d_c d_d Phi symmetric in (a <-> c) for
/// all index quadruples, up to the potential's reliable degree.
WdvvReport wdvv_check(const FrobeniusPotential& f);

/// Residual polynomial LHS - RHS for one quadruple (exact; no degree cut).
QPoly wdvv_residual(const FrobeniusPotential& f, int a, int b, int c, int d);

/// d_0 d_a d_b Phi == eta_{ab} identically.
bool identity_check(const FrobeniusPotential& f);

/// Every monomial of phi has weight 3 - d_conf under weights 1 - q_a.
bool euler_check(const FrobeniusPotential& f);

/// Third derivatives evaluated at a point: index (a*d + b)*d + c.
std::vector<Rational> structure_constants(const FrobeniusPotential& f,
                                          const std::vector<Rational>& point);

/// c_{ab}^e eta-raised product at a point; associativity of this product is
/// equivalent to WDVV there.
bool product_associative_at(const FrobeniusPotential& f, const std::vector<Rational>& point);

nlohmann::ordered_json potential_to_json(const FrobeniusPotential& f);
FrobeniusPotential potential_from_json(const nlohmann::json& j);

}  // namespace kdvr
