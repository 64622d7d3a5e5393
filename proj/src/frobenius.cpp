#include "kdvr/frobenius.hpp"

#include <map>

#include "kdvr/errors.hpp"

namespace kdvr {

namespace {

/// Laurent polynomial in p with QPoly coefficients.
using PolyInP = std::map<int, QPoly>;

void padd_term(PolyInP& f, int k, const QPoly& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = f.emplace(k, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) f.erase(it);
  }
}

PolyInP pmul(const PolyInP& a, const PolyInP& b, std::optional<int> min_keep = std::nullopt) {
  PolyInP out;
  for (const auto& [k, fa] : a)
    for (const auto& [l, fb] : b) {
      if (min_keep && k + l < *min_keep) continue;
      padd_term(out, k + l, fa * fb);
    }
  return out;
}

/// Remainder of `a` (ordinary polynomial in p) modulo a monic polynomial.
PolyInP pmod(PolyInP a, const PolyInP& monic) {
  const int deg = monic.rbegin()->first;
  while (!a.empty() && a.rbegin()->first >= deg) {
    const int k = a.rbegin()->first;
    QPoly lead = a.rbegin()->second;
    for (const auto& [l, c] : monic) padd_term(a, k - deg + l, -(lead * c));
    // The leading term cancels exactly; numeric drift cannot occur in exact
    // arithmetic, but guard the loop anyway.
    if (!a.empty() && a.rbegin()->first == k)
      throw ConsistencyError("pmod: leading term failed to cancel");
  }
  return a;
}

QPoly pcoeff(const PolyInP& a, int k) {
  auto it = a.find(k);
  return it == a.end() ? QPoly() : it->second;
}

/// [p^{-1}] of W^{(n+1)/r} for W = p^r + (lower, exponents <= r-2).
QPoly laurent_root_power_residue(const PolyInP& w, int r, int n) {
  const Rational alpha = Rational(n + 1, r);
  const int lead = n + 1;  // r * alpha
  PolyInP z;               // (W - p^r) p^{-r}, exponents <= -2
  for (const auto& [k, c] : w)
    if (k != r) padd_term(z, k - r, c);
  QPoly residue;
  PolyInP zpow{{0, qpoly_const(Rational(1))}};
  for (int j = 0;; ++j) {
    if (j > 0) {
      if (z.empty() || lead - 2 * j < -1) break;
      zpow = pmul(zpow, z, -1 - lead);
    }
    Rational c = binomial_general(alpha, j);
    residue += pcoeff(zpow, -1 - lead).scaled(c);
  }
  return residue;
}

/// Substitutes images[v] for variable v.
QPoly qpoly_substitute(const QPoly& f, const std::vector<QPoly>& images) {
  QPoly out;
  for (const auto& [mono, coeff] : f.terms()) {
    QPoly term = qpoly_const(coeff);
    for (const auto& [v, e] : mono) {
      if (v < 0 || v >= static_cast<int>(images.size()))
        throw ShapeError("qpoly_substitute: variable out of range");
      for (int i = 0; i < e; ++i) term *= images[v];
    }
    out += term;
  }
  return out;
}

}  // namespace

QMatrix metric_kdv(int r) {
  if (r < 2) throw ShapeError("metric_kdv: r must be >= 2");
  const int d = r - 1;
  QMatrix eta(d, std::vector<Rational>(d, Rational(0)));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      if (a + b == r - 2) eta[a][b] = Rational(1);
  return eta;
}

FrobeniusPotential lg_potential(int r) {
  if (r < 2) throw ShapeError("lg_potential: r must be >= 2");
  const int d = r - 1;

  // W over the deformation coordinates u_0..u_{d-1} (QPoly variables).
  PolyInP w_of_u{{r, qpoly_const(Rational(1))}};
  for (int m = 0; m < d; ++m) padd_term(w_of_u, m, -qpoly_var(m));

  // Flat coordinates x^m = v_{r-2-m}; the triangular system
  // v_n = u_{r-2-n} + g_n(u_{r-n}..u_{r-2}) inverts by back-substitution.
  std::vector<QPoly> v_of_u(d);
  for (int n = 0; n < d; ++n)
    v_of_u[n] = laurent_root_power_residue(w_of_u, r, n).scaled(Rational(-r, n + 1));

  std::vector<QPoly> u_of_x(d);
  std::vector<bool> known(d, false);
  for (int n = 0; n < d; ++n) {
    const int target = r - 2 - n;
    QPoly rest = v_of_u[n] - qpoly_var(target);
    for (const auto& [mono, c] : rest.terms())
      for (const auto& [var, e] : mono)
        if (var <= target || !known[var])
          throw ConsistencyError("lg_potential: triangular structure broken");
    u_of_x[target] = qpoly_var(target) - qpoly_substitute(rest, u_of_x);
    known[target] = true;
  }

  PolyInP w;  // W(p; x)
  padd_term(w, r, qpoly_const(Rational(1)));
  for (int m = 0; m < d; ++m) padd_term(w, m, -u_of_x[m]);

  // Monic P = W'(p)/r; residue sums become remainder coefficient extraction.
  PolyInP wp;
  for (const auto& [k, c] : w)
    if (k != 0) padd_term(wp, k - 1, c.scaled(Rational(k, r)));

  std::vector<PolyInP> dw(d);
  for (int a = 0; a < d; ++a)
    for (const auto& [k, c] : w) padd_term(dw[a], k, qpoly_derivative(c, a));

  QMatrix eta = metric_kdv(r);
  QPoly t_poly;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        QPoly cabc = -pcoeff(pmod(pmul(pmul(dw[a], dw[b]), dw[c]), wp), r - 2);
        if (a == 0) {
          // Flat-identity normalization: third derivatives against e_0
          // reproduce the metric.
          if (cabc != qpoly_const(eta[b][c]))
            throw ConsistencyError("lg_potential: identity normalization failed");
        }
        QPoly cube = qpoly_var(a) * qpoly_var(b) * qpoly_var(c);
        t_poly += cube * cabc;
      }

  FrobeniusPotential out;
  out.dim = d;
  out.metric = std::move(eta);
  out.identity_index = 0;
  out.d_conf = Rational(r - 2, r);
  for (int m = 0; m < d; ++m) out.charges.push_back(Rational(m, r));
  // sum_{abc} x^a x^b x^c c_abc = sum_deg deg (deg-1) (deg-2) Phi_deg.
  const int maxdeg = t_poly.total_degree();
  for (int deg = 3; deg <= maxdeg; ++deg) {
    QPoly comp = t_poly.homogeneous_component(deg);
    out.phi += comp.scaled(Rational(1, static_cast<long>(deg) * (deg - 1) * (deg - 2)));
  }
  return out;
}

namespace {
QPoly third_derivative(const QPoly& phi, int a, int b, int c) {
  return qpoly_derivative(qpoly_derivative(qpoly_derivative(phi, a), b), c);
}
}  // namespace

QPoly wdvv_residual(const FrobeniusPotential& f, int a, int b, int c, int d) {
  QMatrix inv = qmatrix_inverse(f.metric);
  QPoly lhs, rhs;
  for (int e = 0; e < f.dim; ++e)
    for (int g = 0; g < f.dim; ++g) {
      if (inv[e][g].is_zero()) continue;
      lhs += (third_derivative(f.phi, a, b, e) * third_derivative(f.phi, g, c, d))
                 .scaled(inv[e][g]);
      rhs += (third_derivative(f.phi, b, c, e) * third_derivative(f.phi, g, a, d))
                 .scaled(inv[e][g]);
    }
  return lhs - rhs;
}

WdvvReport wdvv_check(const FrobeniusPotential& f) {
  WdvvReport report;
  QMatrix inv = qmatrix_inverse(f.metric);
  std::vector<std::vector<std::vector<QPoly>>> c3(
      f.dim, std::vector<std::vector<QPoly>>(f.dim, std::vector<QPoly>(f.dim)));
  for (int a = 0; a < f.dim; ++a)
    for (int b = a; b < f.dim; ++b)
      for (int c = b; c < f.dim; ++c) {
        QPoly v = third_derivative(f.phi, a, b, c);
        c3[a][b][c] = c3[a][c][b] = c3[b][a][c] = c3[b][c][a] = c3[c][a][b] = c3[c][b][a] = v;
      }
  const std::optional<int> cut = f.reliable_residual_degree();
  for (int a = 0; a < f.dim; ++a)
    for (int b = 0; b < f.dim; ++b)
      for (int c = 0; c < f.dim; ++c)
        for (int d = 0; d < f.dim; ++d) {
          QPoly residual;
          for (int e = 0; e < f.dim; ++e)
            for (int g = 0; g < f.dim; ++g) {
              if (inv[e][g].is_zero()) continue;
              residual += (c3[a][b][e] * c3[g][c][d] - c3[b][c][e] * c3[g][a][d])
                              .scaled(inv[e][g]);
            }
          if (cut) residual = residual.truncate_degree(*cut);
          if (!residual.is_zero())
            report.violations.push_back(WdvvViolation{a, b, c, d, std::move(residual)});
        }
  return report;
}

bool identity_check(const FrobeniusPotential& f) {
  for (int a = 0; a < f.dim; ++a)
    for (int b = 0; b < f.dim; ++b) {
      QPoly v = third_derivative(f.phi, f.identity_index, a, b);
      if (v != qpoly_const(f.metric[a][b])) return false;
    }
  return true;
}

bool euler_check(const FrobeniusPotential& f) {
  if (static_cast<int>(f.charges.size()) != f.dim) return false;
  const Rational want = Rational(3) - f.d_conf;
  for (const auto& [mono, coeff] : f.phi.terms()) {
    Rational weight(0);
    for (const auto& [v, e] : mono) {
      if (v >= f.dim) return false;
      weight += (Rational(1) - f.charges[v]) * Rational(e);
    }
    if (weight != want) return false;
  }
  return true;
}

std::vector<Rational> structure_constants(const FrobeniusPotential& f,
                                          const std::vector<Rational>& point) {
  std::vector<Rational> out;
  out.reserve(static_cast<std::size_t>(f.dim) * f.dim * f.dim);
  for (int a = 0; a < f.dim; ++a)
    for (int b = 0; b < f.dim; ++b)
      for (int c = 0; c < f.dim; ++c)
        out.push_back(qpoly_eval(third_derivative(f.phi, a, b, c), point));
  return out;
}

bool product_associative_at(const FrobeniusPotential& f, const std::vector<Rational>& point) {
  const int d = f.dim;
  std::vector<Rational> c = structure_constants(f, point);
  QMatrix inv = qmatrix_inverse(f.metric);
  auto cc = [&](int a, int b, int e) { return c[(a * d + b) * d + e]; };
  // (e_a * e_b) * e_c vs e_a * (e_b * e_c) in the eta-raised product.
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int cix = 0; cix < d; ++cix)
        for (int dd = 0; dd < d; ++dd) {
          Rational lhs(0), rhs(0);
          for (int e = 0; e < d; ++e)
            for (int g = 0; g < d; ++g) {
              lhs += cc(a, b, e) * inv[e][g] * cc(g, cix, dd);
              rhs += cc(b, cix, e) * inv[e][g] * cc(g, a, dd);
            }
          if (lhs != rhs) return false;
        }
  return true;
}

nlohmann::ordered_json potential_to_json(const FrobeniusPotential& f) {
  nlohmann::ordered_json j;
  j["dimension"] = f.dim;
  j["metric"] = nlohmann::ordered_json::array();
  for (const auto& row : f.metric) {
    nlohmann::ordered_json jr = nlohmann::ordered_json::array();
    for (const auto& v : row) jr.push_back(v.to_string());
    j["metric"].push_back(jr);
  }
  j["monomials"] = nlohmann::ordered_json::array();
  for (const auto& [mono, coeff] : f.phi.terms()) {
    nlohmann::ordered_json jm;
    jm["exponents"] = exponent_vector(mono, f.dim);
    jm["coefficient"] = coeff.to_string();
    j["monomials"].push_back(jm);
  }
  j["identity_index"] = f.identity_index;
  j["charges"] = nlohmann::ordered_json::array();
  for (const auto& q : f.charges) j["charges"].push_back(q.to_string());
  j["d_conf"] = f.d_conf.to_string();
  j["truncation_degree"] = f.truncation_degree;
  return j;
}

FrobeniusPotential potential_from_json(const nlohmann::json& j) {
  FrobeniusPotential f;
  f.dim = j.at("dimension").get<int>();
  for (const auto& jr : j.at("metric")) {
    std::vector<Rational> row;
    for (const auto& v : jr) row.push_back(Rational::from_string(v.get<std::string>()));
    f.metric.push_back(std::move(row));
  }
  for (const auto& jm : j.at("monomials")) {
    std::vector<int> exps = jm.at("exponents").get<std::vector<int>>();
    f.phi.add_term(monomial_from_exponents(exps),
                   Rational::from_string(jm.at("coefficient").get<std::string>()));
  }
  f.identity_index = j.value("identity_index", 0);
  if (j.contains("charges"))
    for (const auto& q : j.at("charges")) f.charges.push_back(Rational::from_string(q.get<std::string>()));
  if (j.contains("d_conf")) f.d_conf = Rational::from_string(j.at("d_conf").get<std::string>());
  f.truncation_degree = j.value("truncation_degree", -1);
  return f;
}

}  // namespace kdvr
