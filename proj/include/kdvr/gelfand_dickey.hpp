#pragma once

#include <optional>
#include <vector>

#include "kdvr/psdo.hpp"

namespace kdvr {

/// k_{n,m} = (-1)^n r^{n+1} / ((m+1)(r+m+1)...(nr+m+1)).
Rational k_const(int r, int n, int m);

/// Unique R = D + sum_{m>0} w_m D^{-m} with R^r = L, solved coefficient by
/// coefficient: w_s is read off the defect L - R^r at exponent r-1-s, where it
/// enters linearly with factor r. L must be in normalized form. The result is
/// guaranteed to the requested depth (exponents >= -depth).
PseudoDiffOp root_r(const PseudoDiffOp& L, int depth);

struct FlowResult {
  int n = 0;
  int m = 0;
  Rational k;                            // k_{n,m}
  std::vector<DiffPolynomial> du_dt;     // index k = 0..r-2
};

/// Right-hand sides S^m_{k,n} of du_k/dt^m_n for the flow
/// dL/dt = -lambda k_{n,m} [ (L^{n+(m+1)/r})_+ , L ].
/// Checks the commutator order bound (no exponents above r-2) and that every
/// component is lambda-free. `depth` overrides the automatically chosen root
/// truncation; it must be at least nr+m.
FlowResult gd_flow(const PseudoDiffOp& L, int n, int m, std::optional<int> depth = std::nullopt);

/// Applies the prolonged vector field of flow F to the differential
/// polynomial g: sum_{m,j} dg/du_m^(j) * dx^j F_m.
DiffPolynomial apply_flow_field(const std::vector<DiffPolynomial>& flow, const DiffPolynomial& g);

/// Components of the formal Lie bracket [X_F, X_G] on jet space; all zero iff
/// the flows commute.
std::vector<DiffPolynomial> flow_lie_bracket(const std::vector<DiffPolynomial>& f,
                                             const std::vector<DiffPolynomial>& g);

struct CommuteReport {
  struct Entry {
    std::pair<int, int> flow_a;
    std::pair<int, int> flow_b;
    std::vector<DiffPolynomial> residual;
    bool commutes = false;
  };
  std::vector<Entry> entries;
  bool all_commute() const {
    for (const auto& e : entries)
      if (!e.commutes) return false;
    return true;
  }
};

/// Pairwise Lie brackets of the given flows on the generic operator of
/// context r.
CommuteReport flows_commute_check(int r, const std::vector<std::pair<int, int>>& flows);

}  // namespace kdvr
