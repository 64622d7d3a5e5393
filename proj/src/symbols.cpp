#include "kdvr/symbols.hpp"

#include <sstream>

#include "kdvr/gelfand_dickey.hpp"

namespace kdvr {

namespace {
std::optional<int> max_opt(std::optional<int> a, std::optional<int> b) {
  if (!a) return b;
  if (!b) return a;
  return std::max(*a, *b);
}
}  // namespace

PSymbol PSymbol::p_power(int r, int k) {
  PSymbol s(r);
  s.coeffs_.emplace(k, DiffPolynomial(r, ScalarQL(1)));
  return s;
}

PSymbol PSymbol::generic_symbol(int r) {
  PSymbol s = p_power(r, r);
  for (int m = 0; m <= r - 2; ++m) s.coeffs_.emplace(m, -DiffPolynomial::jet(r, m));
  return s;
}

DiffPolynomial PSymbol::coefficient(int k) const {
  if (min_known_ && k < *min_known_)
    throw TruncationError("PSymbol: coefficient of p^" + std::to_string(k) +
                          " below truncation depth");
  auto it = coeffs_.find(k);
  return it == coeffs_.end() ? DiffPolynomial(r_) : it->second;
}

void PSymbol::set_coefficient(int k, DiffPolynomial f) {
  if (f.r() != r_) throw ShapeError("PSymbol: coefficient context mismatch");
  if (f.is_zero())
    coeffs_.erase(k);
  else
    coeffs_.insert_or_assign(k, std::move(f));
}

void PSymbol::set_min_known(std::optional<int> m) {
  min_known_ = m;
  if (min_known_) {
    for (auto it = coeffs_.begin(); it != coeffs_.end();)
      it = it->first < *min_known_ ? coeffs_.erase(it) : std::next(it);
  }
}

void PSymbol::prune() {
  for (auto it = coeffs_.begin(); it != coeffs_.end();)
    it = it->second.is_zero() ? coeffs_.erase(it) : std::next(it);
}

PSymbol PSymbol::operator-() const {
  PSymbol out(r_);
  out.min_known_ = min_known_;
  for (const auto& [k, f] : coeffs_) out.coeffs_.emplace(k, -f);
  return out;
}

PSymbol& PSymbol::operator+=(const PSymbol& o) {
  if (r_ != o.r_) throw ShapeError("PSymbol: mixing contexts r");
  min_known_ = max_opt(min_known_, o.min_known_);
  for (const auto& [k, f] : o.coeffs_) {
    auto [it, inserted] = coeffs_.emplace(k, f);
    if (!inserted) it->second += f;
  }
  prune();
  if (min_known_) set_min_known(min_known_);
  return *this;
}

PSymbol& PSymbol::operator-=(const PSymbol& o) { return *this += -o; }

PSymbol PSymbol::scaled(const ScalarQL& c) const {
  PSymbol out(r_);
  out.min_known_ = min_known_;
  for (const auto& [k, f] : coeffs_) out.set_coefficient(k, f.scaled(c));
  return out;
}

PSymbol PSymbol::plus_part() const {
  if (min_known_ && *min_known_ > 0)
    throw TruncationError("PSymbol::plus_part: nonnegative exponents not fully known");
  PSymbol out(r_);
  for (const auto& [k, f] : coeffs_)
    if (k >= 0) out.coeffs_.emplace(k, f);
  return out;
}

PSymbol PSymbol::minus_part() const {
  PSymbol out(r_);
  out.min_known_ = min_known_;
  for (const auto& [k, f] : coeffs_)
    if (k < 0) out.coeffs_.emplace(k, f);
  return out;
}

bool PSymbol::is_normalized_form() const {
  if (!is_exact()) return false;
  if (coefficient(r_) != DiffPolynomial(r_, ScalarQL(1))) return false;
  for (const auto& [k, f] : coeffs_) {
    if (k == r_) continue;
    if (k < 0 || k > r_ - 2) return false;
  }
  return true;
}

std::string PSymbol::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    if (!first) os << " + ";
    first = false;
    os << "(" << it->second.to_string() << ")";
    if (it->first != 0) os << "*p^" << it->first;
  }
  if (first) os << "0";
  if (min_known_) os << "  [exponents >= " << *min_known_ << "]";
  return os.str();
}

PSymbol symbolize(const PseudoDiffOp& q) {
  PSymbol out(q.r());
  for (const auto& [k, f] : q.coefficients()) out.set_coefficient(k, f);
  out.set_min_known(q.min_known());
  return out;
}

PSymbol symbol_mul(const PSymbol& a, const PSymbol& b, std::optional<int> min_keep) {
  if (a.r() != b.r()) throw ShapeError("symbol_mul: mixing contexts r");
  PSymbol out(a.r());
  if (a.is_zero() || b.is_zero()) return out;

  std::optional<int> supported;
  if (a.min_known()) supported = max_opt(supported, *a.min_known() + b.top_order());
  if (b.min_known()) supported = max_opt(supported, *b.min_known() + a.top_order());
  if (min_keep && supported && *min_keep < *supported)
    throw TruncationError("symbol_mul: requested depth exceeds what inputs support");
  // Unlike operator composition, the commutative product of finite symbols is
  // finite; the cutoff only ever drops terms, but dropping must be recorded.
  std::optional<int> cutoff = supported ? max_opt(supported, min_keep) : min_keep;

  for (const auto& [k, fa] : a.coefficients()) {
    for (const auto& [l, fb] : b.coefficients()) {
      if (cutoff && k + l < *cutoff) continue;
      DiffPolynomial prod = fa * fb;
      if (prod.is_zero()) continue;
      DiffPolynomial acc = out.coefficient(k + l) + prod;
      out.set_coefficient(k + l, acc);
    }
  }
  out.set_min_known(cutoff);
  return out;
}

PSymbol symbol_dp(const PSymbol& a) {
  PSymbol out(a.r());
  for (const auto& [k, f] : a.coefficients())
    if (k != 0) out.set_coefficient(k - 1, f.scaled(ScalarQL(Rational(k))));
  if (a.min_known()) out.set_min_known(*a.min_known() - 1);
  return out;
}

PSymbol symbol_dx(const PSymbol& a) {
  PSymbol out(a.r());
  for (const auto& [k, f] : a.coefficients()) out.set_coefficient(k, dx(f));
  out.set_min_known(a.min_known());
  return out;
}

PSymbol poisson(const PSymbol& a, const PSymbol& b) {
  return symbol_mul(symbol_dp(a), symbol_dx(b)) - symbol_mul(symbol_dp(b), symbol_dx(a));
}

PSymbol symbol_root_power(const PSymbol& lsym, int n, int m, int min_keep) {
  if (!lsym.is_normalized_form())
    throw ShapeError("symbol_root_power: symbol not in normalized form");
  const int r = lsym.r();
  if (n < 0 || m < 0) throw ShapeError("symbol_root_power: need n >= 0, m >= 0");
  const Rational alpha = Rational(n) + Rational(m + 1, r);
  const int lead = n * r + m + 1;  // = r * alpha

  // L^alpha = p^{r alpha} (1 + z)^alpha with z = (L - p^r) p^{-r}; z has only
  // exponents <= -2, so the binomial series truncates quickly.
  PSymbol z(r);
  for (const auto& [k, f] : lsym.coefficients())
    if (k != r) z.set_coefficient(k - r, f);

  PSymbol out(r);
  PSymbol zpow = PSymbol::p_power(r, 0);
  for (int j = 0;; ++j) {
    if (j > 0) {
      if (z.is_zero() || lead - 2 * j < min_keep) break;
      zpow = symbol_mul(zpow, z, min_keep - lead);
    }
    Rational c = binomial_general(alpha, j);
    if (!c.is_zero()) {
      for (const auto& [k, f] : zpow.coefficients()) {
        if (k + lead < min_keep) continue;
        DiffPolynomial acc = out.coefficient(k + lead) + f.scaled(ScalarQL(c));
        out.set_coefficient(k + lead, acc);
      }
    }
  }
  out.set_min_known(min_keep);
  return out;
}

FlowResult sc_flow(const PSymbol& lsym, int n, int m) {
  if (!lsym.is_normalized_form()) throw ShapeError("sc_flow: symbol not in normalized form");
  const int r = lsym.r();

  // Guard against misreading the bracket: the full symbol power Poisson-
  // commutes with the symbol itself, so only the polynomial part drives the
  // flow.
  PSymbol full = symbol_root_power(lsym, n, m, -(r + 2));
  PSymbol full_bracket = poisson(full, lsym);
  for (const auto& [k, f] : full_bracket.coefficients())
    if (!f.is_zero())
      throw ConsistencyError("sc_flow: full-symbol bracket nonzero at p^" + std::to_string(k));

  PSymbol q_plus = symbol_root_power(lsym, n, m, 0).plus_part();
  PSymbol bracket = poisson(q_plus, lsym);
  for (const auto& [k, f] : bracket.coefficients())
    if ((k < 0 || k > r - 2) && !f.is_zero())
      throw ConsistencyError("sc_flow: bracket outside p^0..p^{r-2} at p^" + std::to_string(k));

  FlowResult out;
  out.n = n;
  out.m = m;
  out.k = k_const(r, n, m);
  const ScalarQL factor = ScalarQL(-out.k / Rational(r));
  for (int k = 0; k <= r - 2; ++k) {
    // dL~/dt = (k/r){Q~_+, L~} and L~ = p^r - sum u_k p^k.
    DiffPolynomial s = bracket.coefficient(k).scaled(factor);
    for (const auto& [mono, c] : s.core().terms())
      if (differential_weight(mono) != 1)
        throw ConsistencyError("sc_flow: component of differential weight != 1");
    out.du_dt.push_back(std::move(s));
  }
  return out;
}

std::vector<DiffPolynomial> v_from_u(int r) {
  PSymbol lsym = PSymbol::generic_symbol(r);
  std::vector<DiffPolynomial> v;
  v.reserve(r - 1);
  for (int n = 0; n <= r - 2; ++n) {
    PSymbol power = symbol_root_power(lsym, 0, n, -1);
    v.push_back(power.residue().scaled(ScalarQL(Rational(-r, n + 1))));
  }
  return v;
}

std::vector<DiffPolynomial> u_from_v(int r) {
  std::vector<DiffPolynomial> v_polys = v_from_u(r);
  // v_n = u_{r-2-n} + g_n(u_{r-n}, .., u_{r-2}): solve downward, substituting
  // the already-inverted higher u's.
  std::vector<DiffPolynomial> u(r - 1, DiffPolynomial(r));
  std::vector<bool> known(r - 1, false);
  for (int n = 0; n <= r - 2; ++n) {
    const int target = r - 2 - n;
    DiffPolynomial vn_var = DiffPolynomial::jet(r, n, 0);  // stands for v_n
    DiffPolynomial rest = v_polys[n] - DiffPolynomial::jet(r, target, 0);
    // rest depends only on u_m with m > target, all already known.
    DiffPolynomial rest_in_v = substitute_jets(rest, [&](int mm) {
      if (mm <= target || !known[mm]) throw ConsistencyError("u_from_v: triangularity broken");
      return u[mm];
    });
    u[target] = vn_var - rest_in_v;
    known[target] = true;
  }
  return u;
}

}  // namespace kdvr
