#include "hypshadow/unipoly.hpp"

#include "hypshadow/error.hpp"

#include <sstream>

namespace hypshadow {

UniPoly::UniPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

void UniPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational UniPoly::eval(const Rational& t) const {
  Rational acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

double UniPoly::eval(double t) const {
  double acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + it->get_d();
  return acc;
}

UniPoly UniPoly::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<Rational> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<long>(i);
  return UniPoly(std::move(d));
}

UniPoly UniPoly::operator+(const UniPoly& o) const {
  std::vector<Rational> r(std::max(c_.size(), o.c_.size()));
  for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
  for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
  return UniPoly(std::move(r));
}

UniPoly UniPoly::operator-(const UniPoly& o) const { return *this + (-o); }

UniPoly UniPoly::operator-() const {
  UniPoly r = *this;
  for (auto& x : r.c_) x = -x;
  return r;
}

UniPoly UniPoly::operator*(const UniPoly& o) const {
  if (is_zero() || o.is_zero()) return {};
  std::vector<Rational> r(c_.size() + o.c_.size() - 1);
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  }
  return UniPoly(std::move(r));
}

UniPoly UniPoly::operator*(const Rational& s) const {
  if (s == 0) return {};
  UniPoly r = *this;
  for (auto& x : r.c_) x *= s;
  return r;
}

std::pair<UniPoly, UniPoly> UniPoly::divmod(const UniPoly& divisor) const {
  if (divisor.is_zero()) throw DomainError("UniPoly division by zero polynomial");
  std::vector<Rational> rem = c_;
  const int dd = divisor.degree();
  if (degree() < dd) return {UniPoly{}, *this};
  std::vector<Rational> quo(static_cast<std::size_t>(degree() - dd + 1));
  const Rational inv_lead = 1 / divisor.leading();
  for (int k = degree() - dd; k >= 0; --k) {
    const Rational q = rem[static_cast<std::size_t>(k + dd)] * inv_lead;
    quo[static_cast<std::size_t>(k)] = q;
    if (q == 0) continue;
    for (int j = 0; j <= dd; ++j) rem[static_cast<std::size_t>(k + j)] -= q * divisor.c_[static_cast<std::size_t>(j)];
  }
  rem.resize(static_cast<std::size_t>(dd));
  return {UniPoly(std::move(quo)), UniPoly(std::move(rem))};
}

UniPoly UniPoly::monic() const {
  if (is_zero()) return {};
  return *this * (1 / leading());
}

UniPoly UniPoly::primitive() const {
  if (is_zero()) return {};
  mpz_class den_lcm = 1;
  for (const auto& x : c_) mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), x.get_den_mpz_t());
  mpz_class num_gcd = 0;
  for (const auto& x : c_) {
    mpz_class n = x.get_num() * (den_lcm / x.get_den());
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), n.get_mpz_t());
  }
  return *this * Rational(den_lcm, num_gcd);
}

UniPoly UniPoly::shifted(const Rational& shift) const {
  // Horner in the polynomial ring: p(t + s)
  UniPoly acc;
  const UniPoly lin({shift, Rational(1)});
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * lin + UniPoly::constant(*it);
  return acc;
}

std::string UniPoly::to_string(const std::string& var) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    const Rational& a = c_[static_cast<std::size_t>(i)];
    if (a == 0) continue;
    Rational mag = abs(a);
    if (first) {
      if (a < 0) os << "-";
    } else {
      os << (a < 0 ? " - " : " + ");
    }
    first = false;
    if (i == 0 || mag != 1) {
      os << hypshadow::to_string(mag);
      if (i > 0) os << "*";
    }
    if (i >= 1) os << var;
    if (i >= 2) os << "^" << i;
  }
  return os.str();
}

UniPoly gcd(const UniPoly& a, const UniPoly& b) {
  UniPoly x = a, y = b;
  while (!y.is_zero()) {
    UniPoly r = x.divmod(y).second;
    x = std::move(y);
    y = r.is_zero() ? r : r.primitive();
  }
  return x.is_zero() ? x : x.monic();
}

}  // namespace hypshadow
