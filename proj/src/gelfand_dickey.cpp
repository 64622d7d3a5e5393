#include "kdvr/gelfand_dickey.hpp"

namespace kdvr {

Rational k_const(int r, int n, int m) {
  if (r < 2 || n < 0 || m < 0) throw ShapeError("k_const: need r >= 2, n >= 0, m >= 0");
  Rational denom(1);
  for (int i = 0; i <= n; ++i) denom *= Rational(static_cast<long>(i) * r + m + 1);
  Rational num = Rational(r).pow(n + 1);
  if (n % 2 != 0) num = -num;
  return num / denom;
}

PseudoDiffOp root_r(const PseudoDiffOp& L, int depth) {
  if (!L.is_normalized_form()) throw ShapeError("root_r: operator not in normalized form");
  const int r = L.r();
  if (depth < 0) throw ShapeError("root_r: negative depth");
  const Rational inv_r = Rational(1) / Rational(r);

  PseudoDiffOp root = PseudoDiffOp::d_power(r, 1);
  for (int s = 1; s <= depth; ++s) {
    // The defect L - root^r vanishes at exponents > r-1-s; its coefficient at
    // r-1-s is r * w_s.
    PseudoDiffOp power = psdo_power(root, r, r - 1 - s);
    DiffPolynomial w = (L.coefficient(r - 1 - s) - power.coefficient(r - 1 - s))
                           .scaled(ScalarQL(inv_r));
    if (!w.is_zero()) {
      PseudoDiffOp term(r);
      term.set_coefficient(-s, w);
      root += term;
    }
  }
  root.set_min_known(-depth);
  return root;
}

FlowResult gd_flow(const PseudoDiffOp& L, int n, int m, std::optional<int> depth) {
  if (!L.is_normalized_form()) throw ShapeError("gd_flow: operator not in normalized form");
  if (n < 0 || m < 0) throw ShapeError("gd_flow: need n >= 0, m >= 0");
  const int r = L.r();
  const int power = n * r + m + 1;  // L^{n+(m+1)/r} = root^power
  const int need = power - 1;      // root depth so that root^power is exact at exponents >= 0
  if (depth && *depth < need) throw TruncationError("gd_flow: depth below nr+m");

  FlowResult out;
  out.n = n;
  out.m = m;
  out.k = k_const(r, n, m);

  PseudoDiffOp q_plus = psdo_power(root_r(L, depth.value_or(need)), power, 0).plus_part();
  PseudoDiffOp bracket = commutator(q_plus, L);  // differential operators: exact

  // [Q_+, L] = -[Q_-, L] has order at most r-2.
  for (const auto& [k, f] : bracket.coefficients())
    if (k > r - 2 && !f.is_zero())
      throw ConsistencyError("gd_flow: commutator exceeds order r-2 at exponent " +
                             std::to_string(k));

  // dL/dt = -lambda k [Q_+, L] and L = D^r - sum u_k D^k, so
  // du_k/dt = lambda k_{n,m} * coefficient_k([Q_+, L]).
  const ScalarQL factor = ScalarQL::lambda(r) * ScalarQL(out.k);
  out.du_dt.reserve(r - 1);
  for (int k = 0; k <= r - 2; ++k) {
    DiffPolynomial s = bracket.coefficient(k).scaled(factor);
    if (!s.is_lambda_free())
      throw ConsistencyError("gd_flow: flow component not lambda-free at u_" + std::to_string(k));
    out.du_dt.push_back(std::move(s));
  }
  return out;
}

DiffPolynomial apply_flow_field(const std::vector<DiffPolynomial>& flow,
                                const DiffPolynomial& g) {
  DiffPolynomial out(g.r());
  const int jmax = g.max_jet_order();
  for (int m = 0; m < static_cast<int>(flow.size()); ++m) {
    DiffPolynomial shifted = flow[m];
    for (int j = 0; j <= jmax; ++j) {
      if (j > 0) shifted = dx(shifted);
      DiffPolynomial partial = jet_partial(g, JetVar{m, j});
      if (!partial.is_zero()) out += partial * shifted;
    }
  }
  return out;
}

std::vector<DiffPolynomial> flow_lie_bracket(const std::vector<DiffPolynomial>& f,
                                             const std::vector<DiffPolynomial>& g) {
  if (f.size() != g.size()) throw ShapeError("flow_lie_bracket: component count mismatch");
  std::vector<DiffPolynomial> out;
  out.reserve(f.size());
  for (std::size_t k = 0; k < f.size(); ++k)
    out.push_back(apply_flow_field(f, g[k]) - apply_flow_field(g, f[k]));
  return out;
}

CommuteReport flows_commute_check(int r, const std::vector<std::pair<int, int>>& flows) {
  PseudoDiffOp L = PseudoDiffOp::generic_operator(r);
  std::vector<std::vector<DiffPolynomial>> fields;
  fields.reserve(flows.size());
  for (const auto& [n, m] : flows) fields.push_back(gd_flow(L, n, m).du_dt);

  CommuteReport report;
  for (std::size_t i = 0; i < flows.size(); ++i) {
    for (std::size_t j = i + 1; j < flows.size(); ++j) {
      CommuteReport::Entry e;
      e.flow_a = flows[i];
      e.flow_b = flows[j];
      e.residual = flow_lie_bracket(fields[i], fields[j]);
      e.commutes = true;
      for (const auto& c : e.residual)
        if (!c.is_zero()) e.commutes = false;
      report.entries.push_back(std::move(e));
    }
  }
  return report;
}

}  // namespace kdvr
