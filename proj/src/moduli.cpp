#include "kdvr/moduli.hpp"

#include <algorithm>
#include <sstream>

#include "kdvr/errors.hpp"

namespace kdvr {

BoundaryDivisor::BoundaryDivisor(int n_, LabelSet raw_block) : n(n_) {
  if (n < 4) throw ShapeError("BoundaryDivisor: need n >= 4");
  LabelSet full = full_labelset(n);
  if ((raw_block & ~full) != 0) throw ShapeError("BoundaryDivisor: labels out of range");
  block = labelset_contains(raw_block, 1) ? (full & ~raw_block) : raw_block;
  const int sz = labelset_size(block);
  if (sz < 2 || sz > n - 2) throw ShapeError("BoundaryDivisor: block sizes must be >= 2");
}

std::string BoundaryDivisor::to_string() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (int i = 1; i <= n; ++i)
    if (labelset_contains(block, i)) {
      if (!first) os << ",";
      first = false;
      os << i;
    }
  os << "}";
  return os.str();
}

bool compatible(const BoundaryDivisor& a, const BoundaryDivisor& b) {
  if (a.n != b.n) throw ShapeError("compatible: different n");
  // Canonical blocks both avoid label 1, so "union = everything" cannot
  // occur; nested or disjoint is the whole criterion.
  LabelSet s = a.block, t = b.block;
  return (s & t) == 0 || (s & t) == s || (s & t) == t;
}

std::vector<BoundaryDivisor> enumerate_divisors(int n) {
  std::vector<BoundaryDivisor> out;
  if (n < 4) return out;
  LabelSet full = full_labelset(n);
  for (LabelSet block = 0; block <= full; ++block) {
    if (labelset_contains(block, 1)) continue;
    const int sz = labelset_size(block);
    if (sz < 2 || sz > n - 2) continue;
    out.push_back(BoundaryDivisor(n, block));
  }
  return out;
}

StableTree::StableTree(int n_, std::vector<LabelSet> edge_blocks) : n(n_) {
  edges = std::move(edge_blocks);
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    BoundaryDivisor di(n, edges[i]);
    if (di.block != edges[i]) throw ShapeError("StableTree: edge block not canonical");
    if (i > 0 && edges[i] == edges[i - 1]) throw ShapeError("StableTree: repeated edge");
    for (std::size_t j = 0; j < i; ++j)
      if (!compatible(di, BoundaryDivisor(n, edges[j])))
        throw ShapeError("StableTree: incompatible edges");
  }
}

std::vector<StableTree::Vertex> StableTree::vertices() const {
  const int k = codim();
  // parent[i]: index of the minimal block properly containing edges[i], or -1
  // for maximal blocks (attached to the root component, which holds label 1).
  std::vector<int> parent(k, -1);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      if ((edges[i] & edges[j]) == edges[i] && edges[i] != edges[j]) {
        if (parent[i] < 0 || (edges[j] & edges[parent[i]]) == edges[j]) parent[i] = j;
      }
    }
  }
  std::vector<Vertex> verts(k + 1);
  // Vertex 0 = root; vertex i+1 corresponds to block edges[i].
  std::vector<LabelSet> covered(k + 1, 0);
  for (int i = 0; i < k; ++i) {
    int pv = parent[i] < 0 ? 0 : parent[i] + 1;
    verts[pv].neighbors.push_back(i + 1);
    verts[pv].edge_index.push_back(i);
    verts[i + 1].neighbors.push_back(pv);
    verts[i + 1].edge_index.push_back(i);
    covered[pv] |= edges[i];
  }
  verts[0].tails = full_labelset(n) & ~covered[0];
  for (int i = 0; i < k; ++i) verts[i + 1].tails = edges[i] & ~covered[i + 1];
  for (const auto& v : verts)
    if (v.valence() < 3) throw ConsistencyError("StableTree: vertex of valence < 3");
  return verts;
}

std::string StableTree::to_string() const {
  std::ostringstream os;
  os << "tree(n=" << n << ";";
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (i) os << ",";
    os << BoundaryDivisor(n, edges[i]).to_string();
  }
  os << ")";
  return os.str();
}

namespace {
void strata_backtrack(int n, int codim, const std::vector<BoundaryDivisor>& divisors,
                      std::size_t start, std::vector<LabelSet>& chosen,
                      std::vector<StableTree>& out) {
  if (static_cast<int>(chosen.size()) == codim) {
    out.push_back(StableTree(n, chosen));
    return;
  }
  for (std::size_t i = start; i < divisors.size(); ++i) {
    bool ok = true;
    for (LabelSet c : chosen)
      if (!compatible(divisors[i], BoundaryDivisor(n, c))) {
        ok = false;
        break;
      }
    if (!ok) continue;
    chosen.push_back(divisors[i].block);
    strata_backtrack(n, codim, divisors, i + 1, chosen, out);
    chosen.pop_back();
  }
}
}  // namespace

std::vector<StableTree> enumerate_strata(int n, int codim) {
  if (n < 3) throw ShapeError("enumerate_strata: need n >= 3");
  if (codim < 0 || codim > std::max(0, n - 3)) return {};
  if (codim == 0) return {StableTree(n, {})};
  std::vector<BoundaryDivisor> divisors = enumerate_divisors(n);
  std::vector<StableTree> out;
  std::vector<LabelSet> chosen;
  strata_backtrack(n, codim, divisors, 0, chosen, out);
  return out;
}

std::vector<BoundaryDivisor> stratum_class_as_monomial(const StableTree& t) {
  std::vector<BoundaryDivisor> out;
  out.reserve(t.edges.size());
  for (LabelSet e : t.edges) out.push_back(BoundaryDivisor(t.n, e));
  return out;
}

std::vector<BoundaryDivisor> psi_as_boundary(int n, int i, int j, int k) {
  if (n < 3) throw ShapeError("psi_as_boundary: need n >= 3");
  if (i == j || i == k || j == k || i < 1 || j < 1 || k < 1 || i > n || j > n || k > n)
    throw ShapeError("psi_as_boundary: labels must be three distinct tails");
  std::vector<BoundaryDivisor> out;
  for (const BoundaryDivisor& d : enumerate_divisors(n)) {
    LabelSet side = labelset_contains(d.block, i) ? d.block : (full_labelset(n) & ~d.block);
    if (labelset_contains(side, j) || labelset_contains(side, k)) continue;
    out.push_back(d);
  }
  return out;
}

Rational IntegralTable::divisor_monomial_integral(int n,
                                                  const std::vector<BoundaryDivisor>& monomial) {
  std::vector<LabelSet> blocks;
  blocks.reserve(monomial.size());
  for (const auto& d : monomial) {
    if (d.n != n) throw ShapeError("divisor_monomial_integral: mixed n");
    blocks.push_back(d.block);
  }
  return mixed_integral(n, std::vector<int>(n, 0), std::move(blocks));
}

Rational IntegralTable::psi_monomial_integral(int n, const std::vector<int>& exponents) {
  if (static_cast<int>(exponents.size()) != n)
    throw ShapeError("psi_monomial_integral: need one exponent per label");
  return mixed_integral(n, exponents, {});
}

std::size_t IntegralTable::cache_size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return memo_.size();
}

Rational IntegralTable::mixed_integral(int n, const std::vector<int>& psi,
                                       std::vector<LabelSet> divisors) {
  if (n < 3) throw ShapeError("mixed_integral: need n >= 3");
  if (static_cast<int>(psi.size()) != n) throw ShapeError("mixed_integral: psi size mismatch");
  for (int a : psi)
    if (a < 0) throw ShapeError("mixed_integral: negative psi exponent");
  int degree = 0;
  for (int a : psi) degree += a;
  degree += static_cast<int>(divisors.size());
  if (degree != n - 3) return Rational(0);

  std::sort(divisors.begin(), divisors.end());
  Key key{n, psi, divisors};
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  Rational value = evaluate(n, psi, divisors);
  std::lock_guard<std::mutex> lock(mu_);
  memo_.emplace(std::move(key), value);
  return value;
}

Rational IntegralTable::evaluate(int n, const std::vector<int>& psi,
                                 const std::vector<LabelSet>& divisors) {
  if (n == 3) return Rational(1);  // a point; degree check already passed

  if (!divisors.empty()) {
    // Restrict to the first divisor T. The divisor splits the labels into
    // side 1 = T + node and side 2 = T^c + node; compatible divisors and psi
    // classes restrict factorwise, and the e-fold self-intersection
    // contributes (-psi_node1 - psi_node2)^{e-1}.
    const LabelSet t = divisors[0];
    int mult = 0;
    std::vector<LabelSet> rest;
    for (LabelSet d : divisors) {
      if (d == t) {
        ++mult;
        continue;
      }
      BoundaryDivisor a(n, d), bT(n, t);
      if (!compatible(a, bT)) return Rational(0);
      rest.push_back(d);
    }
    for (std::size_t i = 0; i < rest.size(); ++i)
      for (std::size_t j = i + 1; j < rest.size(); ++j)
        if (rest[i] != rest[j] && !compatible(BoundaryDivisor(n, rest[i]),
                                              BoundaryDivisor(n, rest[j])))
          return Rational(0);

    // Label maps: old label -> new label on its side; node gets the last slot.
    std::vector<int> side1_labels, side2_labels;
    for (int lbl = 1; lbl <= n; ++lbl)
      (labelset_contains(t, lbl) ? side1_labels : side2_labels).push_back(lbl);
    const int n1 = static_cast<int>(side1_labels.size()) + 1;
    const int n2 = static_cast<int>(side2_labels.size()) + 1;
    std::vector<int> new_label(n + 1, 0);
    for (int idx = 0; idx < n1 - 1; ++idx) new_label[side1_labels[idx]] = idx + 1;
    for (int idx = 0; idx < n2 - 1; ++idx) new_label[side2_labels[idx]] = idx + 1;

    auto remap = [&](LabelSet block) {
      LabelSet out = 0;
      for (int lbl = 1; lbl <= n; ++lbl)
        if (labelset_contains(block, lbl)) out |= LabelSet{1} << (new_label[lbl] - 1);
      return out;
    };
    auto canonical_on = [&](LabelSet block, int side_n) {
      return labelset_contains(block, 1) ? (full_labelset(side_n) & ~block) : block;
    };

    std::vector<LabelSet> divs1, divs2;
    for (LabelSet d : rest) {
      if ((d & t) == d) {
        divs1.push_back(canonical_on(remap(d), n1));        // block inside T
      } else if ((d & t) == 0) {
        divs2.push_back(canonical_on(remap(d), n2));        // block inside T^c
      } else {
        // T strictly inside d: the complement block lives on side 2.
        LabelSet comp = full_labelset(n) & ~d;               // contains label 1
        divs2.push_back(canonical_on(remap(comp), n2));
      }
    }

    std::vector<int> psi1(n1, 0), psi2(n2, 0);
    for (int lbl = 1; lbl <= n; ++lbl) {
      if (psi[lbl - 1] == 0) continue;
      if (labelset_contains(t, lbl))
        psi1[new_label[lbl] - 1] = psi[lbl - 1];
      else
        psi2[new_label[lbl] - 1] = psi[lbl - 1];
    }

    Rational total(0);
    const int e = mult;
    for (int a = 0; a <= e - 1; ++a) {
      const int b = e - 1 - a;
      std::vector<int> p1 = psi1, p2 = psi2;
      p1[n1 - 1] += a;  // node is the last label on each side
      p2[n2 - 1] += b;
      Rational c = binomial(e - 1, a);
      if ((e - 1) % 2 != 0) c = -c;
      Rational f1 = mixed_integral(n1, p1, divs1);
      if (f1.is_zero()) continue;
      Rational f2 = mixed_integral(n2, p2, divs2);
      total += c * f1 * f2;
    }
    return total;
  }

  // Pure psi monomial: expand one psi factor through boundary divisors.
  int q = 0;
  for (int lbl = 1; lbl <= n; ++lbl)
    if (psi[lbl - 1] > 0) {
      q = lbl;
      break;
    }
  if (q == 0) throw ConsistencyError("mixed_integral: degree bookkeeping broken");
  int j = 0, k = 0;
  for (int lbl = 1; lbl <= n && k == 0; ++lbl) {
    if (lbl == q) continue;
    if (j == 0)
      j = lbl;
    else
      k = lbl;
  }
  std::vector<int> reduced = psi;
  --reduced[q - 1];
  Rational total(0);
  for (const BoundaryDivisor& d : psi_as_boundary(n, q, j, k))
    total += mixed_integral(n, reduced, {d.block});
  return total;
}

}  // namespace kdvr
