#pragma once

// Shared oracles and generators for the test suites. Everything here is
// deliberately independent of the library's own algorithms: psi integrals
// come from the string-equation recursion, stratum counts from a Pruefer-
// sequence enumeration, and random inputs from fixed-seed generators.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "kdvr/diffpoly.hpp"
#include "kdvr/moduli.hpp"
#include "kdvr/rational.hpp"

namespace kdvr_test {

/// <tau_{a_1} ... tau_{a_n}> in genus zero via the string equation alone:
/// remove a tau_0 insertion and lower each other index in turn.
inline kdvr::Rational psi_string_oracle(std::vector<int> a) {
  const int n = static_cast<int>(a.size());
  long total = std::accumulate(a.begin(), a.end(), 0L);
  if (n < 3 || total != n - 3) return kdvr::Rational(0);
  if (n == 3) return kdvr::Rational(1);
  auto zero = std::find(a.begin(), a.end(), 0);
  // Some entry is 0: otherwise total >= n > n-3.
  std::vector<int> rest;
  for (auto it = a.begin(); it != a.end(); ++it)
    if (it != zero) rest.push_back(*it);
  kdvr::Rational out(0);
  for (std::size_t i = 0; i < rest.size(); ++i) {
    if (rest[i] == 0) continue;
    std::vector<int> lowered = rest;
    --lowered[i];
    out += psi_string_oracle(lowered);
  }
  return out;
}

/// Closed form (n-3)! / prod a_i! for the same integrals.
inline kdvr::Rational psi_closed_form(const std::vector<int>& a) {
  const int n = static_cast<int>(a.size());
  long total = std::accumulate(a.begin(), a.end(), 0L);
  if (n < 3 || total != n - 3) return kdvr::Rational(0);
  kdvr::Rational out = kdvr::factorial(n - 3);
  for (int ai : a) out /= kdvr::factorial(ai);
  return out;
}

/// All exponent vectors a_1..a_n >= 0 with sum = n-3.
inline std::vector<std::vector<int>> admissible_psi_exponents(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> current(n, 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == n - 1) {
      current[pos] = left;
      out.push_back(current);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      current[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  if (n >= 3) rec(0, n - 3);
  return out;
}

/// Stratum count oracle: enumerates trees on k+1 vertices through Pruefer
/// sequences, attaches the n labels to vertices in all ways, keeps stable
/// assignments, and identifies trees by their set of edge splits (computed by
/// component search, not by the library's laminar machinery).
inline std::size_t count_strata_oracle(int n, int k) {
  if (k == 0) return 1;
  const int V = k + 1;
  std::set<std::vector<kdvr::LabelSet>> seen;

  std::vector<std::vector<int>> all_trees;  // each: list of edges (a,b) packed a*V+b
  if (V == 2) {
    all_trees.push_back({0 * V + 1});
  } else {
    std::vector<int> pruefer(V - 2, 0);
    std::function<void(int)> gen = [&](int pos) {
      if (pos == V - 2) {
        // Decode the sequence.
        std::vector<int> degree(V, 1);
        for (int v : pruefer) ++degree[v];
        std::vector<int> seq = pruefer;
        std::vector<bool> used(V, false);
        std::vector<int> edges;
        for (int v : seq) {
          int leaf = -1;
          for (int u = 0; u < V; ++u)
            if (degree[u] == 1 && !used[u]) {
              leaf = u;
              break;
            }
          used[leaf] = true;
          edges.push_back(leaf * V + v);
          --degree[v];
        }
        std::vector<int> last;
        for (int u = 0; u < V; ++u)
          if (!used[u] && degree[u] == 1) last.push_back(u);
        edges.push_back(last[0] * V + last[1]);
        all_trees.push_back(edges);
        return;
      }
      for (int v = 0; v < V; ++v) {
        pruefer[pos] = v;
        gen(pos + 1);
      }
    };
    gen(0);
  }

  std::vector<int> assign(n, 0);
  std::function<void(const std::vector<int>&, int)> place = [&](const std::vector<int>& edges,
                                                                int pos) {
    if (pos == n) {
      // Stability: valence = #tails + degree >= 3.
      std::vector<int> valence(V, 0);
      for (int e : edges) {
        ++valence[e / V];
        ++valence[e % V];
      }
      for (int lbl = 0; lbl < n; ++lbl) ++valence[assign[lbl]];
      for (int v = 0; v < V; ++v)
        if (valence[v] < 3) return;
      // Canonical identity: per edge, the labels reachable on the side away
      // from label 1.
      std::vector<kdvr::LabelSet> splits;
      for (int cut : edges) {
        std::vector<bool> visited(V, false);
        std::vector<int> stack{cut / V};
        visited[cut / V] = true;
        while (!stack.empty()) {
          int v = stack.back();
          stack.pop_back();
          for (int e : edges) {
            if (e == cut) continue;
            int a = e / V, b = e % V;
            if (a == v && !visited[b]) visited[b] = true, stack.push_back(b);
            if (b == v && !visited[a]) visited[a] = true, stack.push_back(a);
          }
        }
        kdvr::LabelSet side = 0;
        for (int lbl = 0; lbl < n; ++lbl)
          if (visited[assign[lbl]]) side |= kdvr::LabelSet{1} << lbl;
        if (side & 1u) side = kdvr::full_labelset(n) & ~side;
        splits.push_back(side);
      }
      std::sort(splits.begin(), splits.end());
      seen.insert(splits);
      return;
    }
    for (int v = 0; v < V; ++v) {
      assign[pos] = v;
      place(edges, pos + 1);
    }
  };
  for (const auto& edges : all_trees) place(edges, 0);
  return seen.size();
}

/// Deterministic random differential polynomial: `terms` monomials in
/// u_0..u_{r-2} with derivative orders <= jmax and small integer
/// coefficients.
inline kdvr::DiffPolynomial random_diffpoly(std::mt19937& rng, int r, int jmax, int terms,
                                            int max_factors = 2) {
  kdvr::DiffPolynomial out(r);
  std::uniform_int_distribution<int> coeff(-4, 4);
  std::uniform_int_distribution<int> pick_m(0, r - 2);
  std::uniform_int_distribution<int> pick_j(0, jmax);
  std::uniform_int_distribution<int> pick_f(1, max_factors);
  for (int t = 0; t < terms; ++t) {
    int c = coeff(rng);
    if (c == 0) c = 1;
    kdvr::DiffPolynomial mono(r, kdvr::ScalarQL(kdvr::Rational(c)));
    const int factors = pick_f(rng);
    for (int f = 0; f < factors; ++f)
      mono *= kdvr::DiffPolynomial::jet(r, pick_m(rng), pick_j(rng));
    out += mono;
  }
  return out;
}

}  // namespace kdvr_test
