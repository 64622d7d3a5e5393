#pragma once

#include <string>

#include "kdvr/errors.hpp"
#include "kdvr/rational.hpp"

namespace kdvr {

/// Element of the ring Q[lambda] / (lambda^2 + 1/r), stored as re + la*lambda.
///
/// The parameter r is context metadata, not part of the value: equality
/// compares (re, la) only. A value with zero lambda part may carry r == 0
/// ("context free"); any value with a nonzero lambda part must know its r,
/// and mixing two different nonzero r's is a ShapeError.
class ScalarQL {
 public:
  ScalarQL() = default;
  ScalarQL(Rational rational_part) : re_(std::move(rational_part)) {}
  ScalarQL(long n) : re_(n) {}
  ScalarQL(Rational rational_part, Rational lambda_part, int r)
      : re_(std::move(rational_part)), la_(std::move(lambda_part)), r_(r) {
    if (!la_.is_zero() && r_ < 2) throw ShapeError("ScalarQL: lambda part requires r >= 2");
    if (la_.is_zero()) r_ = 0;
  }

  static ScalarQL lambda(int r) { return ScalarQL(Rational(0), Rational(1), r); }

  const Rational& rational_part() const { return re_; }
  const Rational& lambda_part() const { return la_; }
  int context_r() const { return r_; }

  bool is_zero() const { return re_.is_zero() && la_.is_zero(); }
  bool is_lambda_free() const { return la_.is_zero(); }

  ScalarQL operator-() const { return make(-re_, -la_, r_); }

  ScalarQL& operator+=(const ScalarQL& o) {
    re_ += o.re_;
    la_ += o.la_;
    r_ = merged_r(o);
    normalize();
    return *this;
  }
  ScalarQL& operator-=(const ScalarQL& o) { return *this += -o; }

  ScalarQL& operator*=(const ScalarQL& o) {
    const int r = merged_r(o);
    Rational re = re_ * o.re_;
    if (!la_.is_zero() && !o.la_.is_zero())
      re -= la_ * o.la_ / Rational(r);  // lambda^2 = -1/r
    la_ = re_ * o.la_ + la_ * o.re_;
    re_ = std::move(re);
    r_ = r;
    normalize();
    return *this;
  }

  friend ScalarQL operator+(ScalarQL a, const ScalarQL& b) { return a += b; }
  friend ScalarQL operator-(ScalarQL a, const ScalarQL& b) { return a -= b; }
  friend ScalarQL operator*(ScalarQL a, const ScalarQL& b) { return a *= b; }

  friend bool operator==(const ScalarQL& a, const ScalarQL& b) {
    return a.re_ == b.re_ && a.la_ == b.la_;
  }
  friend bool operator!=(const ScalarQL& a, const ScalarQL& b) { return !(a == b); }

  std::string to_string() const {
    if (la_.is_zero()) return re_.to_string_compact();
    std::string s;
    if (!re_.is_zero()) s += re_.to_string_compact() + (la_.sign() >= 0 ? "+" : "");
    s += la_.to_string_compact() + "*L";
    return s;
  }

 private:
  static ScalarQL make(Rational re, Rational la, int r) {
    ScalarQL s;
    s.re_ = std::move(re);
    s.la_ = std::move(la);
    s.r_ = r;
    s.normalize();
    return s;
  }

  int merged_r(const ScalarQL& o) const {
    if (r_ != 0 && o.r_ != 0 && r_ != o.r_)
      throw ShapeError("ScalarQL: mixing lambda contexts r=" + std::to_string(r_) + " and r=" +
                       std::to_string(o.r_));
    return r_ != 0 ? r_ : o.r_;
  }

  void normalize() {
    if (la_.is_zero()) r_ = 0;
  }

  Rational re_;
  Rational la_;
  int r_ = 0;
};

}  // namespace kdvr
