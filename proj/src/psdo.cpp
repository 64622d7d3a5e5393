#include "kdvr/psdo.hpp"

#include <sstream>

namespace kdvr {

PseudoDiffOp PseudoDiffOp::d_power(int r, int k) {
  PseudoDiffOp op(r);
  op.coeffs_.emplace(k, DiffPolynomial(r, ScalarQL(1)));
  return op;
}

PseudoDiffOp PseudoDiffOp::generic_operator(int r) {
  PseudoDiffOp op = d_power(r, r);
  for (int m = 0; m <= r - 2; ++m) op.coeffs_.emplace(m, -DiffPolynomial::jet(r, m));
  return op;
}

DiffPolynomial PseudoDiffOp::coefficient(int k) const {
  if (min_known_ && k < *min_known_)
    throw TruncationError("PseudoDiffOp: coefficient of D^" + std::to_string(k) +
                          " below truncation depth");
  auto it = coeffs_.find(k);
  return it == coeffs_.end() ? DiffPolynomial(r_) : it->second;
}

void PseudoDiffOp::set_coefficient(int k, DiffPolynomial f) {
  if (f.r() != r_) throw ShapeError("PseudoDiffOp: coefficient context mismatch");
  if (f.is_zero())
    coeffs_.erase(k);
  else
    coeffs_.insert_or_assign(k, std::move(f));
}

void PseudoDiffOp::set_min_known(std::optional<int> m) {
  min_known_ = m;
  if (min_known_) {
    for (auto it = coeffs_.begin(); it != coeffs_.end();)
      it = it->first < *min_known_ ? coeffs_.erase(it) : std::next(it);
  }
}

void PseudoDiffOp::prune() {
  for (auto it = coeffs_.begin(); it != coeffs_.end();)
    it = it->second.is_zero() ? coeffs_.erase(it) : std::next(it);
}

PseudoDiffOp PseudoDiffOp::operator-() const {
  PseudoDiffOp out(r_);
  out.min_known_ = min_known_;
  for (const auto& [k, f] : coeffs_) out.coeffs_.emplace(k, -f);
  return out;
}

namespace {
std::optional<int> max_opt(std::optional<int> a, std::optional<int> b) {
  if (!a) return b;
  if (!b) return a;
  return std::max(*a, *b);
}
}  // namespace

PseudoDiffOp& PseudoDiffOp::operator+=(const PseudoDiffOp& o) {
  if (r_ != o.r_) throw ShapeError("PseudoDiffOp: mixing contexts r");
  min_known_ = max_opt(min_known_, o.min_known_);
  for (const auto& [k, f] : o.coeffs_) {
    auto [it, inserted] = coeffs_.emplace(k, f);
    if (!inserted) it->second += f;
  }
  prune();
  if (min_known_) set_min_known(min_known_);
  return *this;
}

PseudoDiffOp& PseudoDiffOp::operator-=(const PseudoDiffOp& o) { return *this += -o; }

PseudoDiffOp PseudoDiffOp::scaled(const ScalarQL& c) const {
  PseudoDiffOp out(r_);
  out.min_known_ = min_known_;
  for (const auto& [k, f] : coeffs_) out.set_coefficient(k, f.scaled(c));
  return out;
}

PseudoDiffOp PseudoDiffOp::plus_part() const {
  if (min_known_ && *min_known_ > 0)
    throw TruncationError("plus_part: nonnegative exponents not fully known");
  PseudoDiffOp out(r_);
  for (const auto& [k, f] : coeffs_)
    if (k >= 0) out.coeffs_.emplace(k, f);
  return out;
}

PseudoDiffOp PseudoDiffOp::minus_part() const {
  PseudoDiffOp out(r_);
  out.min_known_ = min_known_;
  for (const auto& [k, f] : coeffs_)
    if (k < 0) out.coeffs_.emplace(k, f);
  return out;
}

DiffPolynomial PseudoDiffOp::residue() const { return coefficient(-1); }

bool PseudoDiffOp::is_normalized_form() const {
  if (!is_exact()) return false;
  if (coefficient(r_) != DiffPolynomial(r_, ScalarQL(1))) return false;
  for (const auto& [k, f] : coeffs_) {
    if (k == r_) continue;
    if (k < 0 || k > r_ - 2) return false;
  }
  return true;
}

std::optional<int> mul_supported_min(const PseudoDiffOp& a, const PseudoDiffOp& b) {
  // Unknown coefficients of a (exponents < a.min) reach product exponents up
  // to a.min - 1 + b.top; symmetrically for b.
  std::optional<int> bound;
  if (a.min_known()) bound = max_opt(bound, *a.min_known() + b.top_order());
  if (b.min_known()) bound = max_opt(bound, *b.min_known() + a.top_order());
  return bound;
}

PseudoDiffOp psdo_mul(const PseudoDiffOp& a, const PseudoDiffOp& b, std::optional<int> min_keep) {
  if (a.r() != b.r()) throw ShapeError("psdo_mul: mixing contexts r");
  const int r = a.r();
  PseudoDiffOp out(r);
  if (a.is_zero() || b.is_zero()) return out;

  // Exact-times-exact is finite only when the left factor is differential
  // (D^k f terminates for k >= 0); otherwise the Leibniz tail is infinite.
  const bool infinite_tail = !(a.is_exact() && b.is_exact() && a.is_differential());
  std::optional<int> supported = mul_supported_min(a, b);
  if (infinite_tail && !min_keep && !supported)
    throw TruncationError("psdo_mul: product has an infinite tail; pass min_keep");
  if (min_keep && supported && *min_keep < *supported)
    throw TruncationError("psdo_mul: requested depth exceeds what inputs support");

  std::optional<int> cutoff;  // discard exponents below this
  if (infinite_tail) cutoff = min_keep ? min_keep : supported;

  const ScalarQL lambda = ScalarQL::lambda(r);
  std::map<int, DiffPolynomial> acc;
  for (const auto& [k, fa] : a.coefficients()) {
    for (const auto& [l, fb] : b.coefficients()) {
      // D^k fb = sum_j C(k,j) lambda^j fb^(j) D^{k-j}
      DiffPolynomial deriv = fb;
      ScalarQL lam_pow(1);
      for (int j = 0;; ++j) {
        if (k >= 0 && j > k) break;
        const int exponent = k + l - j;
        if (cutoff && exponent < *cutoff) break;
        if (j > 0) {
          deriv = dx(deriv);
          lam_pow *= lambda;
        }
        if (deriv.is_zero()) break;
        ScalarQL c = lam_pow * ScalarQL(binomial_general(Rational(k), j));
        if (c.is_zero()) continue;
        DiffPolynomial term = (fa * deriv).scaled(c);
        if (term.is_zero()) continue;
        auto [it, inserted] = acc.emplace(exponent, term);
        if (!inserted) it->second += term;
      }
    }
  }
  for (auto& [k, f] : acc)
    if (!f.is_zero()) out.set_coefficient(k, std::move(f));
  out.set_min_known(cutoff);
  return out;
}

PseudoDiffOp psdo_mul_depth(const PseudoDiffOp& a, const PseudoDiffOp& b, int depth) {
  return psdo_mul(a, b, -depth);
}

PseudoDiffOp psdo_power(const PseudoDiffOp& a, int n, std::optional<int> min_keep) {
  if (n < 1) throw ShapeError("psdo_power: exponent must be >= 1");
  PseudoDiffOp acc = a;
  const int top = a.top_order();
  for (int i = 2; i <= n; ++i) {
    // Later factors raise the reachable exponent by top each; ask only for
    // what the final truncation needs.
    std::optional<int> step_keep;
    if (min_keep) step_keep = *min_keep - (n - i) * top;
    acc = psdo_mul(acc, a, step_keep);
  }
  return acc;
}

PseudoDiffOp commutator(const PseudoDiffOp& a, const PseudoDiffOp& b,
                        std::optional<int> min_keep) {
  return psdo_mul(a, b, min_keep) - psdo_mul(b, a, min_keep);
}

std::string PseudoDiffOp::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    if (!first) os << " + ";
    first = false;
    os << "(" << it->second.to_string() << ")";
    if (it->first != 0) os << "*D^" << it->first;
  }
  if (first) os << "0";
  if (min_known_) os << "  [exponents >= " << *min_known_ << "]";
  return os.str();
}

}  // namespace kdvr
