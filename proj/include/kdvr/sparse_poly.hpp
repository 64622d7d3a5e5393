#pragma once

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

namespace kdvr {

/// Monomial in variables of type Var: sorted (Var, exponent) pairs with
/// positive exponents. The empty vector is the constant monomial.
template <class Var>
using Monomial = std::vector<std::pair<Var, int>>;

template <class Var>
Monomial<Var> monomial_mul(const Monomial<Var>& a, const Monomial<Var>& b) {
  Monomial<Var> out;
  out.reserve(a.size() + b.size());
  auto ia = a.begin(), ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first)
      out.push_back(*ia++);
    else if (ib->first < ia->first)
      out.push_back(*ib++);
    else {
      out.emplace_back(ia->first, ia->second + ib->second);
      ++ia;
      ++ib;
    }
  }
  out.insert(out.end(), ia, a.end());
  out.insert(out.end(), ib, b.end());
  return out;
}

template <class Var>
int monomial_degree(const Monomial<Var>& m) {
  int d = 0;
  for (const auto& [v, e] : m) d += e;
  return d;
}

/// Sparse multivariate polynomial with exact coefficients. Zero coefficients
/// are never stored, so structural equality is semantic equality.
template <class Var, class Coeff>
class SparsePoly {
 public:
  using Mono = Monomial<Var>;
  using Terms = std::map<Mono, Coeff>;

  SparsePoly() = default;
  explicit SparsePoly(Coeff c) {
    if (!c.is_zero()) terms_.emplace(Mono{}, std::move(c));
  }
  static SparsePoly variable(Var v, Coeff one) {
    SparsePoly p;
    p.terms_.emplace(Mono{{v, 1}}, std::move(one));
    return p;
  }

  bool is_zero() const { return terms_.empty(); }
  const Terms& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }

  void add_term(const Mono& m, const Coeff& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Coeff coefficient(const Mono& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Coeff() : it->second;
  }

  int total_degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, monomial_degree(m));
    return d;
  }

  SparsePoly operator-() const {
    SparsePoly out;
    for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
    return out;
  }

  SparsePoly& operator+=(const SparsePoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  SparsePoly& operator-=(const SparsePoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }

  friend SparsePoly operator+(SparsePoly a, const SparsePoly& b) { return a += b; }
  friend SparsePoly operator-(SparsePoly a, const SparsePoly& b) { return a -= b; }

  friend SparsePoly operator*(const SparsePoly& a, const SparsePoly& b) {
    SparsePoly out;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) out.add_term(monomial_mul(ma, mb), ca * cb);
    return out;
  }
  SparsePoly& operator*=(const SparsePoly& o) { return *this = *this * o; }

  SparsePoly& scale(const Coeff& c) {
    if (c.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second *= c;
      it = it->second.is_zero() ? terms_.erase(it) : std::next(it);
    }
    return *this;
  }
  SparsePoly scaled(const Coeff& c) const {
    SparsePoly out = *this;
    out.scale(c);
    return out;
  }

  /// Product with all result terms above max_degree dropped; max_degree < 0
  /// means no truncation.
  static SparsePoly mul_truncated(const SparsePoly& a, const SparsePoly& b, int max_degree) {
    if (max_degree < 0) return a * b;
    SparsePoly out;
    for (const auto& [ma, ca] : a.terms()) {
      const int da = monomial_degree(ma);
      if (da > max_degree) continue;
      for (const auto& [mb, cb] : b.terms()) {
        if (da + monomial_degree(mb) > max_degree) continue;
        out.add_term(monomial_mul(ma, mb), ca * cb);
      }
    }
    return out;
  }

  SparsePoly truncate_degree(int max_degree) const {
    SparsePoly out;
    for (const auto& [m, c] : terms_)
      if (monomial_degree(m) <= max_degree) out.terms_.emplace(m, c);
    return out;
  }

  SparsePoly homogeneous_component(int degree) const {
    SparsePoly out;
    for (const auto& [m, c] : terms_)
      if (monomial_degree(m) == degree) out.terms_.emplace(m, c);
    return out;
  }

  friend bool operator==(const SparsePoly& a, const SparsePoly& b) {
    return a.terms_ == b.terms_;
  }
  friend bool operator!=(const SparsePoly& a, const SparsePoly& b) { return !(a == b); }
  friend bool operator<(const SparsePoly& a, const SparsePoly& b) {
    return a.terms_ < b.terms_;
  }

 private:
  Terms terms_;
};

}  // namespace kdvr
