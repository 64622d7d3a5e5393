#include "kdvr/cohft.hpp"

#include <algorithm>

#include "kdvr/errors.hpp"

namespace kdvr {

Rational CohFT0::correlator(std::vector<int> insertions) const {
  const int n = static_cast<int>(insertions.size());
  if (n < 3) return Rational(0);
  if (n > n_max) throw TruncationError("CohFT0: correlator beyond n_max");
  for (int b : insertions)
    if (b < 0 || b >= rank) throw ShapeError("CohFT0: basis index out of range");
  std::sort(insertions.begin(), insertions.end());
  auto it = table.find(insertions);
  return it == table.end() ? Rational(0) : it->second;
}

void for_each_multiset(int rank, int size,
                       const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> current;
  std::function<void(int)> rec = [&](int min_value) {
    if (static_cast<int>(current.size()) == size) {
      fn(current);
      return;
    }
    for (int v = min_value; v < rank; ++v) {
      current.push_back(v);
      rec(v);
      current.pop_back();
    }
  };
  rec(0);
  (void)rank;
}

CohFT0 from_potential(const FrobeniusPotential& f, int n_max) {
  if (f.truncation_degree >= 0 && n_max > f.truncation_degree)
    throw TruncationError("from_potential: potential truncated below n_max");
  WdvvReport w = wdvv_check(f);
  if (!w.ok()) throw ShapeError("from_potential: potential violates WDVV");

  CohFT0 t;
  t.rank = f.dim;
  t.metric = f.metric;
  t.metric_inv = qmatrix_inverse(f.metric);
  t.identity_index = f.identity_index;
  t.has_charges = static_cast<int>(f.charges.size()) == f.dim;
  t.charges = f.charges;
  t.d_conf = f.d_conf;
  t.n_max = n_max;
  for (int n = 3; n <= n_max; ++n) {
    for_each_multiset(f.dim, n, [&](const std::vector<int>& ms) {
      std::vector<int> exps(f.dim, 0);
      for (int b : ms) ++exps[b];
      Rational c = f.phi.coefficient(monomial_from_exponents(exps));
      if (c.is_zero()) return;
      for (int e : exps) c *= factorial(e);
      t.table.emplace(ms, c);
    });
  }
  return t;
}

CohFT0 trivial_cohft(int n_max) {
  CohFT0 t;
  t.rank = 1;
  t.metric = {{Rational(1)}};
  t.metric_inv = {{Rational(1)}};
  t.identity_index = 0;
  t.has_charges = true;
  t.charges = {Rational(0)};
  t.d_conf = Rational(0);
  t.n_max = n_max;
  t.table.emplace(std::vector<int>{0, 0, 0}, Rational(1));
  return t;
}

bool kdv_selection_rule(int r, const std::vector<int>& m) {
  long sum = 0;
  for (int mi : m) {
    if (mi < 0 || mi > r - 2) return false;
    sum += mi;
  }
  const long n = static_cast<long>(m.size());
  return sum == (n - 2) * r - 2;
}

Rational stratum_integral(const CohFT0& t, const StableTree& tree,
                          const std::vector<int>& insertions) {
  if (static_cast<int>(insertions.size()) != tree.n)
    throw ShapeError("stratum_integral: insertion count mismatch");
  for (int b : insertions)
    if (b < 0 || b >= t.rank) throw ShapeError("stratum_integral: rank mismatch");

  const std::vector<StableTree::Vertex> verts = tree.vertices();
  const int k = tree.codim();

  // Nonzero entries of eta^{-1}, summed per edge.
  std::vector<std::pair<int, int>> eta_pairs;
  for (int mu = 0; mu < t.rank; ++mu)
    for (int nu = 0; nu < t.rank; ++nu)
      if (!t.metric_inv[mu][nu].is_zero()) eta_pairs.emplace_back(mu, nu);

  // Per-vertex base insertions from tails.
  std::vector<std::vector<int>> base(verts.size());
  for (std::size_t v = 0; v < verts.size(); ++v)
    for (int lbl = 1; lbl <= tree.n; ++lbl)
      if (labelset_contains(verts[v].tails, lbl)) base[v].push_back(insertions[lbl - 1]);

  // Edge v-side bookkeeping: for edge e joining (parent, child), mu goes to
  // the lower vertex index, nu to the other.
  std::vector<std::pair<int, int>> edge_vertices(k, {-1, -1});
  for (std::size_t v = 0; v < verts.size(); ++v)
    for (std::size_t i = 0; i < verts[v].neighbors.size(); ++i) {
      int e = verts[v].edge_index[i];
      if (edge_vertices[e].first < 0)
        edge_vertices[e].first = static_cast<int>(v);
      else if (edge_vertices[e].second < 0 && edge_vertices[e].first != static_cast<int>(v))
        edge_vertices[e].second = static_cast<int>(v);
    }

  Rational total(0);
  std::vector<int> choice(k, 0);
  std::function<void(int, Rational)> rec = [&](int e, Rational weight) {
    if (e == k) {
      Rational term = weight;
      for (std::size_t v = 0; v < verts.size(); ++v) {
        std::vector<int> ins = base[v];
        for (std::size_t i = 0; i < verts[v].neighbors.size(); ++i) {
          int ei = verts[v].edge_index[i];
          const auto& [mu, nu] = eta_pairs[choice[ei]];
          ins.push_back(edge_vertices[ei].first == static_cast<int>(v) ? mu : nu);
        }
        term *= t.correlator(std::move(ins));
        if (term.is_zero()) return;
      }
      total += term;
      return;
    }
    for (std::size_t c = 0; c < eta_pairs.size(); ++c) {
      choice[e] = static_cast<int>(c);
      const auto& [mu, nu] = eta_pairs[c];
      rec(e + 1, weight * t.metric_inv[mu][nu]);
    }
  };
  rec(0, Rational(1));
  return total;
}

const std::vector<StableTree>& CupCache::strata(int n, int k) {
  std::lock_guard<std::mutex> lock(mu_);
  auto key = std::make_pair(n, k);
  auto it = strata_.find(key);
  if (it == strata_.end()) it = strata_.emplace(key, enumerate_strata(n, k)).first;
  return it->second;
}

const QMatrix& CupCache::gram(int n, int k) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = gram_.find({n, k});
    if (it != gram_.end()) return it->second;
  }
  const std::vector<StableTree>& rows = strata(n, n - 3 - k);
  const std::vector<StableTree>& cols = strata(n, k);
  QMatrix g(rows.size(), std::vector<Rational>(cols.size(), Rational(0)));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      std::vector<BoundaryDivisor> monomial = stratum_class_as_monomial(rows[i]);
      std::vector<BoundaryDivisor> extra = stratum_class_as_monomial(cols[j]);
      monomial.insert(monomial.end(), extra.begin(), extra.end());
      g[i][j] = integrals_.divisor_monomial_integral(n, monomial);
    }
  }
  std::lock_guard<std::mutex> lock(mu_);
  return gram_.emplace(std::make_pair(n, k), std::move(g)).first->second;
}

ClassInStrataBasis class_coords(const CohFT0& t, int n, const std::vector<int>& insertions,
                                int codim, CupCache& cache) {
  if (codim < 0 || codim > n - 3) throw ShapeError("class_coords: codim out of range");
  ClassInStrataBasis out;
  out.n = n;
  out.codim = codim;
  out.strata = cache.strata(n, codim);

  const std::vector<StableTree>& rows = cache.strata(n, n - 3 - codim);
  std::vector<Rational> b;
  b.reserve(rows.size());
  bool all_zero = true;
  for (const StableTree& delta : rows) {
    Rational v = stratum_integral(t, delta, insertions);
    if (!v.is_zero()) all_zero = false;
    b.push_back(std::move(v));
  }
  if (all_zero) {
    out.coefficients.assign(out.strata.size(), Rational(0));
    return out;
  }
  LinearSolveResult sol = solve_linear_system(cache.gram(n, codim), std::move(b));
  if (!sol.consistent)
    throw ConsistencyError("class_coords: inconsistent Gram system (axioms violated upstream)");
  out.coefficients = std::move(sol.solution);
  return out;
}

Rational cup_integral(const CohFT0& t1, const CohFT0& t2, int n,
                      const std::vector<int>& insertions1, const std::vector<int>& insertions2,
                      CupCache& cache) {
  if (static_cast<int>(insertions1.size()) != n || static_cast<int>(insertions2.size()) != n)
    throw ShapeError("cup_integral: insertion count mismatch");
  if (n == 3) {
    return t1.correlator(insertions1) * t2.correlator(insertions2);
  }
  Rational total(0);
  for (int k = 0; k <= n - 3; ++k) {
    ClassInStrataBasis coords = class_coords(t1, n, insertions1, k, cache);
    for (std::size_t i = 0; i < coords.strata.size(); ++i) {
      if (coords.coefficients[i].is_zero()) continue;
      Rational pairing = stratum_integral(t2, coords.strata[i], insertions2);
      if (!pairing.is_zero()) total += coords.coefficients[i] * pairing;
    }
  }
  return total;
}

CohFT0 tensor(const CohFT0& t1, const CohFT0& t2, int n_max, CupCache& cache) {
  if (n_max > t1.n_max || n_max > t2.n_max)
    throw TruncationError("tensor: factors not defined up to n_max");
  CohFT0 t;
  t.rank = t1.rank * t2.rank;
  t.metric.assign(t.rank, std::vector<Rational>(t.rank, Rational(0)));
  for (int a = 0; a < t1.rank; ++a)
    for (int b = 0; b < t2.rank; ++b)
      for (int c = 0; c < t1.rank; ++c)
        for (int d = 0; d < t2.rank; ++d)
          t.metric[a * t2.rank + b][c * t2.rank + d] = t1.metric[a][c] * t2.metric[b][d];
  t.metric_inv = qmatrix_inverse(t.metric);
  t.identity_index = t1.identity_index * t2.rank + t2.identity_index;
  t.has_charges = t1.has_charges && t2.has_charges;
  if (t.has_charges) {
    for (int a = 0; a < t1.rank; ++a)
      for (int b = 0; b < t2.rank; ++b) t.charges.push_back(t1.charges[a] + t2.charges[b]);
    t.d_conf = t1.d_conf + t2.d_conf;
  }
  t.n_max = n_max;

  // Insertion multisets sorted by pair index keep both factor insertion
  // vectors sorted, so the strata solves repeat across the table; memoize
  // them, and the per-stratum pairings of the second factor.
  std::map<std::tuple<int, std::vector<int>, int>, std::vector<Rational>> coords_memo;
  std::map<std::pair<std::vector<LabelSet>, std::vector<int>>, Rational> pairing_memo;
  auto coords_for = [&](int n, const std::vector<int>& ins1, int k) -> const std::vector<Rational>& {
    auto key = std::make_tuple(n, ins1, k);
    auto it = coords_memo.find(key);
    if (it == coords_memo.end())
      it = coords_memo.emplace(key, class_coords(t1, n, ins1, k, cache).coefficients).first;
    return it->second;
  };
  auto pairing_for = [&](const StableTree& tree, const std::vector<int>& ins2) -> const Rational& {
    auto key = std::make_pair(tree.edges, ins2);
    auto it = pairing_memo.find(key);
    if (it == pairing_memo.end())
      it = pairing_memo.emplace(key, stratum_integral(t2, tree, ins2)).first;
    return it->second;
  };

  for (int n = 3; n <= n_max; ++n) {
    for_each_multiset(t.rank, n, [&](const std::vector<int>& ms) {
      std::vector<int> ins1, ins2;
      ins1.reserve(n);
      ins2.reserve(n);
      for (int pair_index : ms) {
        ins1.push_back(pair_index / t2.rank);
        ins2.push_back(pair_index % t2.rank);
      }
      Rational v(0);
      for (int k = 0; k <= n - 3; ++k) {
        const std::vector<Rational>& coeffs = coords_for(n, ins1, k);
        const std::vector<StableTree>& strata = cache.strata(n, k);
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
          if (coeffs[i].is_zero()) continue;
          const Rational& pairing = pairing_for(strata[i], ins2);
          if (!pairing.is_zero()) v += coeffs[i] * pairing;
        }
      }
      if (!v.is_zero()) t.table.emplace(ms, std::move(v));
    });
  }
  return t;
}

FrobeniusPotential potential_of(const CohFT0& t, int n_max) {
  if (n_max > t.n_max) throw TruncationError("potential_of: beyond the theory's n_max");
  FrobeniusPotential f;
  f.dim = t.rank;
  f.metric = t.metric;
  f.identity_index = t.identity_index;
  f.charges = t.has_charges ? t.charges : std::vector<Rational>{};
  f.d_conf = t.d_conf;
  f.truncation_degree = n_max;
  for (const auto& [ms, value] : t.table) {
    if (static_cast<int>(ms.size()) > n_max) continue;
    std::vector<int> exps(t.rank, 0);
    for (int b : ms) ++exps[b];
    Rational c = value;
    for (int e : exps)
      if (e > 1) c /= factorial(e);
    f.phi.add_term(monomial_from_exponents(exps), c);
  }
  return f;
}

nlohmann::ordered_json cohft_to_json(const CohFT0& t) {
  nlohmann::ordered_json j;
  j["rank"] = t.rank;
  j["metric"] = nlohmann::ordered_json::array();
  for (const auto& row : t.metric) {
    nlohmann::ordered_json jr = nlohmann::ordered_json::array();
    for (const auto& v : row) jr.push_back(v.to_string());
    j["metric"].push_back(jr);
  }
  j["identity_index"] = t.identity_index;
  j["n_max"] = t.n_max;
  if (t.has_charges) {
    j["charges"] = nlohmann::ordered_json::array();
    for (const auto& q : t.charges) j["charges"].push_back(q.to_string());
    j["d_conf"] = t.d_conf.to_string();
  }
  j["correlators"] = nlohmann::ordered_json::array();
  for (const auto& [ms, value] : t.table) {
    nlohmann::ordered_json je;
    je["n"] = static_cast<int>(ms.size());
    je["insertions"] = ms;
    je["value"] = value.to_string();
    j["correlators"].push_back(je);
  }
  return j;
}

CohFT0 cohft_from_json(const nlohmann::json& j) {
  CohFT0 t;
  t.rank = j.at("rank").get<int>();
  for (const auto& jr : j.at("metric")) {
    std::vector<Rational> row;
    for (const auto& v : jr) row.push_back(Rational::from_string(v.get<std::string>()));
    t.metric.push_back(std::move(row));
  }
  t.metric_inv = qmatrix_inverse(t.metric);
  t.identity_index = j.value("identity_index", 0);
  t.n_max = j.at("n_max").get<int>();
  if (j.contains("charges")) {
    t.has_charges = true;
    for (const auto& q : j.at("charges"))
      t.charges.push_back(Rational::from_string(q.get<std::string>()));
    t.d_conf = Rational::from_string(j.at("d_conf").get<std::string>());
  }
  for (const auto& je : j.at("correlators")) {
    std::vector<int> ms = je.at("insertions").get<std::vector<int>>();
    std::sort(ms.begin(), ms.end());
    t.table.emplace(std::move(ms), Rational::from_string(je.at("value").get<std::string>()));
  }
  return t;
}

}  // namespace kdvr
