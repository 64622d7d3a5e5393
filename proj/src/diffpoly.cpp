#include "kdvr/diffpoly.hpp"

#include <sstream>

namespace kdvr {

int differential_weight(const JetMonomial& m) {
  int w = 0;
  for (const auto& [v, e] : m) w += v.j * e;
  return w;
}

DiffPolynomial DiffPolynomial::jet(int r, int m, int j) {
  if (m < 0 || m > r - 2) throw ShapeError("DiffPolynomial::jet: index m out of range");
  if (j < 0) throw ShapeError("DiffPolynomial::jet: negative derivative order");
  return DiffPolynomial(r, Core::variable(JetVar{m, j}, ScalarQL(1)));
}

bool DiffPolynomial::is_lambda_free() const {
  for (const auto& [m, c] : core_.terms())
    if (!c.is_lambda_free()) return false;
  return true;
}

int DiffPolynomial::max_jet_order() const {
  int jmax = -1;
  for (const auto& [m, c] : core_.terms())
    for (const auto& [v, e] : m) jmax = std::max(jmax, v.j);
  return jmax;
}

DiffPolynomial dx(const DiffPolynomial& f) {
  DiffPolynomial::Core out;
  for (const auto& [mono, coeff] : f.core().terms()) {
    for (std::size_t i = 0; i < mono.size(); ++i) {
      // Differentiate the i-th factor.
      JetMonomial m = mono;
      ScalarQL c = coeff * ScalarQL(Rational(m[i].second));
      if (--m[i].second == 0) m.erase(m.begin() + i);
      JetMonomial shifted = monomial_mul(m, {{JetVar{mono[i].first.m, mono[i].first.j + 1}, 1}});
      out.add_term(shifted, c);
    }
  }
  return DiffPolynomial(f.r(), std::move(out));
}

DiffPolynomial dx_pow(DiffPolynomial f, int times) {
  for (int i = 0; i < times; ++i) f = dx(f);
  return f;
}

DiffPolynomial jet_partial(const DiffPolynomial& f, const JetVar& v) {
  DiffPolynomial::Core out;
  for (const auto& [mono, coeff] : f.core().terms()) {
    for (std::size_t i = 0; i < mono.size(); ++i) {
      if (!(mono[i].first == v)) continue;
      JetMonomial m = mono;
      ScalarQL c = coeff * ScalarQL(Rational(m[i].second));
      if (--m[i].second == 0) m.erase(m.begin() + i);
      out.add_term(m, c);
    }
  }
  return DiffPolynomial(f.r(), std::move(out));
}

DiffPolynomial grade_component(const DiffPolynomial& f, int grade) {
  DiffPolynomial::Core out;
  for (const auto& [mono, coeff] : f.core().terms())
    if (differential_weight(mono) == grade) out.add_term(mono, coeff);
  return DiffPolynomial(f.r(), std::move(out));
}

DiffPolynomial variational_derivative(const DiffPolynomial& f, int m) {
  DiffPolynomial out(f.r());
  int jmax = f.max_jet_order();
  for (int j = 0; j <= jmax; ++j) {
    DiffPolynomial term = dx_pow(jet_partial(f, JetVar{m, j}), j);
    if (j % 2 == 0)
      out += term;
    else
      out -= term;
  }
  return out;
}

bool is_total_x_derivative(const DiffPolynomial& f) {
  if (!f.constant_term().is_zero()) return false;
  for (int m = 0; m <= f.r() - 2; ++m)
    if (!variational_derivative(f, m).is_zero()) return false;
  return true;
}

DiffPolynomial substitute_jets(const DiffPolynomial& f,
                               const std::function<DiffPolynomial(int)>& image) {
  DiffPolynomial out(f.r());
  for (const auto& [mono, coeff] : f.core().terms()) {
    DiffPolynomial term(f.r(), coeff);
    for (const auto& [v, e] : mono) {
      DiffPolynomial img = dx_pow(image(v.m), v.j);
      for (int i = 0; i < e; ++i) term *= img;
    }
    out += term;
  }
  return out;
}

std::string DiffPolynomial::to_string() const {
  if (core_.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [mono, coeff] : core_.terms()) {
    if (!first) os << " + ";
    first = false;
    os << "(" << coeff.to_string() << ")";
    for (const auto& [v, e] : mono) {
      os << "*u" << v.m;
      if (v.j > 0 && v.j <= 3)
        for (int i = 0; i < v.j; ++i) os << "'";
      else if (v.j > 3)
        os << "^(" << v.j << ")";
      if (e > 1) os << "^" << e;
    }
  }
  return os.str();
}

}  // namespace kdvr
