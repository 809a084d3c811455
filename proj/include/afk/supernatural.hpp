#pragma once

#include "afk/exactlin.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace afk {

/// Exponent in N ∪ {∞}.
class Exponent {
 public:
  Exponent() = default;
  explicit Exponent(std::uint64_t value) : value_(value) {}
  static Exponent infinite() {
    Exponent e;
    e.infinite_ = true;
    return e;
  }

  bool is_infinite() const noexcept { return infinite_; }
  /// Meaningless for infinite exponents.
  std::uint64_t value() const noexcept { return value_; }

  friend Exponent operator+(const Exponent& a, const Exponent& b);
  friend bool operator==(const Exponent&, const Exponent&) = default;

 private:
  std::uint64_t value_ = 0;
  bool infinite_ = false;
};

/// Formal product of primes with exponents in N ∪ {∞}. The empty product is 1.
class SupernaturalNumber {
 public:
  SupernaturalNumber() = default;
  /// Factors a positive integer.
  static SupernaturalNumber of(const Integer& n);
  /// p^∞ for every prime p dividing n (n >= 1).
  static SupernaturalNumber infinite_part_of(const Integer& n);

  const std::map<Integer, Exponent>& exponents() const noexcept { return exps_; }

  bool is_one() const noexcept { return exps_.empty(); }
  bool is_finite() const;
  /// The integer value; requires is_finite().
  Integer finite_value() const;
  /// Product of p^e over the finite exponents only.
  Integer finite_part() const;
  /// Keeps only the primes carrying an infinite exponent.
  SupernaturalNumber infinite_support() const;
  /// True if the integer n divides this number.
  bool divisible_by(const Integer& n) const;

  void multiply_prime(const Integer& prime, const Exponent& e);
  SupernaturalNumber& operator*=(const SupernaturalNumber& other);
  friend SupernaturalNumber operator*(SupernaturalNumber a, const SupernaturalNumber& b) {
    a *= b;
    return a;
  }
  /// Exponent-wise maximum.
  SupernaturalNumber lcm(const SupernaturalNumber& other) const;

  friend bool operator==(const SupernaturalNumber&, const SupernaturalNumber&) = default;

 private:
  std::map<Integer, Exponent> exps_;
};

/// "1", "2^inf", "2^inf*3^inf", "2^6".
std::string to_string(const SupernaturalNumber& s);
/// Unicode rendering for human-readable reports: "2^∞·3^∞".
std::string to_pretty_string(const SupernaturalNumber& s);
SupernaturalNumber parse_supernatural(const std::string& text);

/// Trial-division factorization of n >= 1 as (prime, exponent) pairs.
std::vector<std::pair<Integer, std::uint64_t>> factorize(const Integer& n);

}  // namespace afk
