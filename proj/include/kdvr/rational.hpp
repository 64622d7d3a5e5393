#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace kdvr {

/// Exact rational number backed by GMP. The wrapper keeps every value in
/// canonical form (reduced fraction, positive denominator) so that equality
/// and ordering are structural.
class Rational {
 public:
  Rational() : v_(0) {}
  Rational(int n) : v_(n) {}
  Rational(long n) : v_(static_cast<signed long>(n)) {}
  Rational(long num, long den) : v_(static_cast<signed long>(num)) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    v_ /= mpq_class(static_cast<signed long>(den));
  }

  /// Parses "p/q" or "p". Throws on malformed input or q = 0.
  static Rational from_string(const std::string& s) {
    mpq_class q;
    if (q.set_str(s, 10) != 0)
      throw std::invalid_argument("Rational: cannot parse '" + s + "'");
    if (q.get_den() == 0) throw std::invalid_argument("Rational: zero denominator");
    q.canonicalize();
    Rational r;
    r.v_ = q;
    return r;
  }

  bool is_zero() const { return sgn(v_) == 0; }
  int sign() const { return sgn(v_); }

  Rational operator-() const { return Rational(-v_); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::invalid_argument("Rational: division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

  Rational abs() const { return Rational(::abs(v_)); }

  /// Integer power, negative exponents allowed for nonzero values.
  Rational pow(long e) const {
    if (e == 0) return Rational(1);
    mpq_class base = v_;
    if (e < 0) {
      if (is_zero()) throw std::invalid_argument("Rational: 0^negative");
      base = 1 / base;
      e = -e;
    }
    mpq_class out;
    mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(e));
    mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(e));
    return Rational(out);
  }

  bool is_integer() const { return v_.get_den() == 1; }

  /// Always prints with an explicit denominator, e.g. "3/1", "-5/2".
  std::string to_string() const {
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
  }

  /// Compact form: omits "/1".
  std::string to_string_compact() const {
    if (is_integer()) return v_.get_num().get_str();
    return to_string();
  }

 private:
  explicit Rational(mpq_class v) : v_(std::move(v)) {}
  mpq_class v_;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

/// n! as an exact rational.
Rational factorial(long n);

/// Generalized binomial coefficient C(alpha, j) = alpha (alpha-1) ... (alpha-j+1) / j!
/// for rational alpha and j >= 0.
Rational binomial_general(const Rational& alpha, long j);

/// Ordinary binomial coefficient for integers, 0 when k < 0 or k > n.
Rational binomial(long n, long k);

}  // namespace kdvr
