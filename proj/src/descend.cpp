#include "kdvr/descend.hpp"

#include <algorithm>

#include "kdvr/errors.hpp"

namespace kdvr {

DescendantCalculator::DescendantCalculator(const CohFT0& primaries, int r)
    : t_(primaries), r_(r) {
  if (r < 2) throw ShapeError("DescendantCalculator: r must be >= 2");
  if (t_.rank != r - 1) throw ShapeError("DescendantCalculator: primaries have wrong rank");
}

bool DescendantCalculator::selection_rule(const DescMultiset& ms) const {
  long degree = 0;
  for (const auto& [a, m] : ms) {
    if (a < 0 || m < 0 || m > r_ - 2) return false;
    degree += m + static_cast<long>(r_) * a;
  }
  const long n = static_cast<long>(ms.size());
  return degree == (n - 2) * r_ - 2;
}

Rational DescendantCalculator::correlator(DescMultiset insertions) {
  std::sort(insertions.begin(), insertions.end());
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(insertions);
    if (it != memo_.end()) return it->second;
  }
  Rational value = reduce(insertions);
  std::lock_guard<std::mutex> lock(mu_);
  memo_.emplace(std::move(insertions), value);
  return value;
}

Rational DescendantCalculator::reduce(const DescMultiset& ms) {
  const int n = static_cast<int>(ms.size());
  if (n < 3) return Rational(0);
  if (!selection_rule(ms)) return Rational(0);

  bool has_descendant = false;
  for (const auto& [a, m] : ms)
    if (a > 0) has_descendant = true;

  if (!has_descendant) {
    std::vector<int> primaries;
    primaries.reserve(n);
    for (const auto& [a, m] : ms) primaries.push_back(m);
    return t_.correlator(std::move(primaries));
  }

  // String: remove one tau_0(e_0) and lower one descendant level.
  if (n >= 4 && ms.front() == DescInsertion{0, 0}) {
    DescMultiset rest(ms.begin() + 1, ms.end());
    Rational value(0);
    for (std::size_t j = 0; j < rest.size(); ++j) {
      if (rest[j].first == 0) continue;
      DescMultiset lowered = rest;
      --lowered[j].first;
      value += correlator(std::move(lowered));
    }
    return value;
  }

  // TRR on the smallest descendant insertion, anchored at the two largest
  // other insertions.
  std::size_t slot = 0;
  while (ms[slot].first == 0) ++slot;
  std::size_t anchor2 = ms.size() - 1;
  if (anchor2 == slot) --anchor2;
  std::size_t anchor1 = anchor2 - 1;
  if (anchor1 == slot) --anchor1;
  return trr_sum(ms, slot, anchor1, anchor2);
}

Rational DescendantCalculator::trr_sum(const DescMultiset& ms, std::size_t slot,
                                       std::size_t anchor1, std::size_t anchor2) {
  const auto [a, m] = ms[slot];
  const DescInsertion left_head{a - 1, m};
  const DescInsertion head1 = ms[anchor1];
  const DescInsertion head2 = ms[anchor2];
  DescMultiset spectators;
  for (std::size_t i = 0; i < ms.size(); ++i)
    if (i != slot && i != anchor1 && i != anchor2) spectators.push_back(ms[i]);

  const int s = static_cast<int>(spectators.size());
  Rational total(0);
  for (unsigned mask = 0; mask < (1u << s); ++mask) {
    DescMultiset left{left_head};
    DescMultiset right{head1, head2};
    for (int i = 0; i < s; ++i)
      ((mask >> i) & 1u ? left : right).push_back(spectators[i]);
    if (left.size() + 1 < 3 || right.size() + 1 < 3) continue;  // no 2-point factors
    for (int mu = 0; mu < t_.rank; ++mu) {
      for (int nu = 0; nu < t_.rank; ++nu) {
        const Rational& eta = t_.metric_inv[mu][nu];
        if (eta.is_zero()) continue;
        DescMultiset l = left;
        l.emplace_back(0, mu);
        Rational lv = correlator(std::move(l));
        if (lv.is_zero()) continue;
        DescMultiset rgt = right;
        rgt.emplace_back(0, nu);
        total += lv * eta * correlator(std::move(rgt));
      }
    }
  }
  return total;
}

Rational DescendantCalculator::correlator_via_trr_choice(const DescMultiset& sorted,
                                                         std::size_t slot, std::size_t anchor1,
                                                         std::size_t anchor2) {
  if (slot >= sorted.size() || sorted[slot].first < 1)
    throw ShapeError("correlator_via_trr_choice: slot is not a descendant insertion");
  if (anchor1 == anchor2 || anchor1 == slot || anchor2 == slot || anchor1 >= sorted.size() ||
      anchor2 >= sorted.size())
    throw ShapeError("correlator_via_trr_choice: anchors must be distinct non-slot positions");
  if (!selection_rule(sorted)) return Rational(0);
  return trr_sum(sorted, slot, anchor1, anchor2);
}

Rational DescendantPotential::correlator(DescMultiset insertions) const {
  std::sort(insertions.begin(), insertions.end());
  auto it = correlators.find(insertions);
  return it == correlators.end() ? Rational(0) : it->second;
}

QPoly DescendantPotential::series() const {
  QPoly out;
  for (const auto& [ms, value] : correlators) {
    std::map<DescInsertion, int> mult;
    for (const auto& ins : ms) ++mult[ins];
    Rational c = value;
    QMonomial mono;
    for (const auto& [ins, e] : mult) {
      c /= factorial(e);
      mono.emplace_back(t_var(r, ins.first, ins.second), e);
    }
    std::sort(mono.begin(), mono.end());
    out.add_term(mono, c);
  }
  return out;
}

namespace {
void for_each_desc_multiset(int r, int a_max, int n,
                            const std::function<void(const DescMultiset&)>& fn) {
  std::vector<DescInsertion> alphabet;
  for (int a = 0; a <= a_max; ++a)
    for (int m = 0; m <= r - 2; ++m) alphabet.emplace_back(a, m);
  DescMultiset current;
  std::function<void(std::size_t)> rec = [&](std::size_t min_idx) {
    if (static_cast<int>(current.size()) == n) {
      fn(current);
      return;
    }
    for (std::size_t i = min_idx; i < alphabet.size(); ++i) {
      current.push_back(alphabet[i]);
      rec(i);
      current.pop_back();
    }
  };
  rec(0);
}
}  // namespace

DescendantPotential reconstruct(const CohFT0& primaries, int r, int a_max, int N) {
  if (a_max < 0 || N < 3) throw ShapeError("reconstruct: need a_max >= 0, N >= 3");
  if (primaries.n_max < N)
    throw TruncationError("reconstruct: primary table too small for cutoff N");
  DescendantCalculator calc(primaries, r);
  DescendantPotential p;
  p.r = r;
  p.a_max = a_max;
  p.N = N;
  for (int n = 3; n <= N; ++n) {
    for_each_desc_multiset(r, a_max, n, [&](const DescMultiset& ms) {
      Rational v = calc.correlator(ms);
      if (!v.is_zero()) p.correlators.emplace(ms, std::move(v));
    });
  }
  return p;
}

std::vector<DescMultiset> string_check_failures(const DescendantPotential& p,
                                                const QMatrix& eta) {
  std::vector<DescMultiset> failures;
  for (int n = 2; n <= p.N - 1; ++n) {
    for_each_desc_multiset(p.r, p.a_max, n, [&](const DescMultiset& ms) {
      DescMultiset with_string = ms;
      with_string.emplace_back(0, 0);
      Rational lhs = p.correlator(std::move(with_string));
      Rational rhs(0);
      if (n == 2 && ms[0].first == 0 && ms[1].first == 0)
        rhs += eta[ms[0].second][ms[1].second];
      for (std::size_t j = 0; j < ms.size(); ++j) {
        if (ms[j].first == 0) continue;
        DescMultiset lowered = ms;
        --lowered[j].first;
        rhs += p.correlator(std::move(lowered));
      }
      if (lhs != rhs) failures.push_back(ms);
    });
  }
  return failures;
}

bool string_check(const DescendantPotential& p, const QMatrix& eta) {
  return string_check_failures(p, eta).empty();
}

std::vector<DescMultiset> dilaton_check_failures(const DescendantPotential& p) {
  std::vector<DescMultiset> failures;
  if (p.a_max < 1) return failures;
  for (int n = 3; n <= p.N - 1; ++n) {
    for_each_desc_multiset(p.r, p.a_max, n, [&](const DescMultiset& ms) {
      DescMultiset with_dilaton = ms;
      with_dilaton.emplace_back(1, 0);
      Rational lhs = p.correlator(std::move(with_dilaton));
      Rational rhs = Rational(n - 2) * p.correlator(ms);
      if (lhs != rhs) failures.push_back(ms);
    });
  }
  return failures;
}

bool dilaton_check(const DescendantPotential& p) { return dilaton_check_failures(p).empty(); }

std::vector<QPoly> v_from_phi(const DescendantPotential& p) {
  QPoly phi = p.series();
  std::vector<QPoly> v;
  v.reserve(p.r - 1);
  QPoly d0 = qpoly_derivative(phi, t_var(p.r, 0, 0));
  for (int m = 0; m <= p.r - 2; ++m) v.push_back(qpoly_derivative(d0, t_var(p.r, 0, m)));
  return v;
}

QPoly eval_diffpoly_on_series(const DiffPolynomial& f,
                              const std::function<QPoly(int, int)>& jet_image, int max_degree) {
  QPoly out;
  for (const auto& [mono, coeff] : f.core().terms()) {
    if (!coeff.is_lambda_free())
      throw ShapeError("eval_diffpoly_on_series: coefficient not lambda-free");
    QPoly term = qpoly_const(coeff.rational_part());
    for (const auto& [v, e] : mono) {
      QPoly img = jet_image(v.m, v.j);
      for (int i = 0; i < e && !term.is_zero(); ++i)
        term = QPoly::mul_truncated(term, img, max_degree);
    }
    out += term;
  }
  return out;
}

Rational WittenReport::FlowCheck::max_abs_coefficient() const {
  Rational best(0);
  for (const QPoly& q : residuals)
    for (const auto& [mono, c] : q.terms())
      if (best < c.abs()) best = c.abs();
  return best;
}

WittenReport witten_verify(int r, int a_max, int N,
                           const std::vector<std::pair<int, int>>& flows) {
  WittenReport report;
  report.r = r;
  report.a_max = a_max;
  report.N = N;

  FrobeniusPotential pot = lg_potential(r);
  CohFT0 primaries = from_potential(pot, N);
  DescendantPotential phi = reconstruct(primaries, r, a_max, N);

  // u_k(t) through v_m(t) = d^2 Phi / dt_0^0 dt_0^m and the triangular
  // inversion of v_n = -(r/(n+1)) res L~^{(n+1)/r}.
  const int series_degree = N - 2;
  std::vector<QPoly> v_series = v_from_phi(phi);
  std::vector<DiffPolynomial> u_sym = u_from_v(r);
  std::vector<QPoly> u_series;
  u_series.reserve(r - 1);
  for (int k = 0; k <= r - 2; ++k) {
    QPoly u = eval_diffpoly_on_series(
        u_sym[k],
        [&](int m, int j) {
          QPoly img = v_series[m];
          for (int i = 0; i < j; ++i) img = qpoly_derivative(img, t_var(r, 0, 0));
          return img;
        },
        series_degree);
    u_series.push_back(u.truncate_degree(series_degree));
  }

  const int compare_degree = N - 3;
  PSymbol lsym = PSymbol::generic_symbol(r);
  const int x_var = t_var(r, 0, 0);
  for (const auto& [n, m] : flows) {
    WittenReport::FlowCheck check;
    check.n = n;
    check.m = m;
    check.compare_degree = compare_degree;
    std::vector<DiffPolynomial> rhs_sym = sc_flow(lsym, n, m).du_dt;
    for (int k = 0; k <= r - 2; ++k) {
      if (rhs_sym[k].max_jet_order() > 1)
        throw ConsistencyError("witten_verify: semiclassical flow of weight > 1");
      QPoly lhs = qpoly_derivative(u_series[k], t_var(r, n, m)).truncate_degree(compare_degree);
      QPoly rhs = eval_diffpoly_on_series(
                      rhs_sym[k],
                      [&](int q, int j) {
                        QPoly img = u_series[q];
                        for (int i = 0; i < j; ++i) img = qpoly_derivative(img, x_var);
                        return img;
                      },
                      compare_degree)
                      .truncate_degree(compare_degree);
      QPoly residual = lhs - rhs;
      if (!residual.is_zero()) check.zero = false;
      check.residuals.push_back(std::move(residual));
    }
    report.flows.push_back(std::move(check));
  }
  return report;
}

std::vector<DescMultiset> trr_path_dependence(const CohFT0& primaries,
                                              const DescendantPotential& p) {
  DescendantCalculator calc(primaries, p.r);
  std::vector<DescMultiset> disagreements;
  for (int n = 3; n <= p.N; ++n) {
    for_each_desc_multiset(p.r, p.a_max, n, [&](const DescMultiset& ms) {
      if (!calc.selection_rule(ms)) return;
      bool any_descendant = false;
      for (const auto& [a, m] : ms)
        if (a > 0) any_descendant = true;
      if (!any_descendant) return;
      const Rational reference = calc.correlator(ms);
      for (std::size_t slot = 0; slot < ms.size(); ++slot) {
        if (ms[slot].first < 1) continue;
        if (slot > 0 && ms[slot] == ms[slot - 1]) continue;  // same insertion, same value
        for (std::size_t a1 = 0; a1 < ms.size(); ++a1) {
          if (a1 == slot) continue;
          for (std::size_t a2 = a1 + 1; a2 < ms.size(); ++a2) {
            if (a2 == slot) continue;
            if (calc.correlator_via_trr_choice(ms, slot, a1, a2) != reference) {
              disagreements.push_back(ms);
              return;
            }
          }
        }
      }
    });
  }
  return disagreements;
}

nlohmann::ordered_json descendant_to_json(const DescendantPotential& p) {
  nlohmann::ordered_json j;
  j["r"] = p.r;
  j["a_max"] = p.a_max;
  j["N"] = p.N;
  j["terms"] = nlohmann::ordered_json::array();
  for (const auto& [ms, value] : p.correlators) {
    nlohmann::ordered_json je;
    je["insertions"] = nlohmann::ordered_json::array();
    for (const auto& [a, m] : ms) je["insertions"].push_back({a, m});
    je["correlator"] = value.to_string();
    j["terms"].push_back(je);
  }
  return j;
}

DescendantPotential descendant_from_json(const nlohmann::json& j) {
  DescendantPotential p;
  p.r = j.at("r").get<int>();
  p.a_max = j.at("a_max").get<int>();
  p.N = j.at("N").get<int>();
  for (const auto& je : j.at("terms")) {
    DescMultiset ms;
    for (const auto& ji : je.at("insertions")) ms.emplace_back(ji.at(0).get<int>(), ji.at(1).get<int>());
    std::sort(ms.begin(), ms.end());
    p.correlators.emplace(std::move(ms),
                          Rational::from_string(je.at("correlator").get<std::string>()));
  }
  return p;
}

}  // namespace kdvr
