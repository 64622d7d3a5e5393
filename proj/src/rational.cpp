#include "kdvr/rational.hpp"

#include <ostream>

namespace kdvr {

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

Rational factorial(long n) {
  Rational out(1);
  for (long i = 2; i <= n; ++i) out *= Rational(i);
  return out;
}

Rational binomial_general(const Rational& alpha, long j) {
  if (j < 0) return Rational(0);
  Rational out(1);
  for (long i = 0; i < j; ++i) out *= alpha - Rational(i);
  return out / factorial(j);
}

Rational binomial(long n, long k) {
  if (k < 0 || k > n) return Rational(0);
  return binomial_general(Rational(n), k);
}

}  // namespace kdvr
