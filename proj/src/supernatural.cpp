#include "afk/supernatural.hpp"

#include "afk/error.hpp"

#include <sstream>

namespace afk {

Exponent operator+(const Exponent& a, const Exponent& b) {
  if (a.is_infinite() || b.is_infinite()) return Exponent::infinite();
  return Exponent(a.value() + b.value());
}

std::vector<std::pair<Integer, std::uint64_t>> factorize(const Integer& n) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "factorize requires n >= 1, got " + n.get_str());
  std::vector<std::pair<Integer, std::uint64_t>> out;
  Integer m = n;
  auto strip = [&](const Integer& p) {
    std::uint64_t e = 0;
    while (mpz_divisible_p(m.get_mpz_t(), p.get_mpz_t())) {
      m /= p;
      ++e;
    }
    if (e) out.emplace_back(p, e);
  };
  strip(2);
  for (Integer p = 3; p * p <= m; p += 2) strip(p);
  if (m > 1) out.emplace_back(m, 1);
  return out;
}

SupernaturalNumber SupernaturalNumber::of(const Integer& n) {
  SupernaturalNumber s;
  for (const auto& [p, e] : factorize(n)) s.exps_[p] = Exponent(e);
  return s;
}

SupernaturalNumber SupernaturalNumber::infinite_part_of(const Integer& n) {
  SupernaturalNumber s;
  for (const auto& [p, e] : factorize(n)) s.exps_[p] = Exponent::infinite();
  return s;
}

bool SupernaturalNumber::is_finite() const {
  for (const auto& [p, e] : exps_)
    if (e.is_infinite()) return false;
  return true;
}

Integer SupernaturalNumber::finite_value() const {
  if (!is_finite()) throw Error(ErrorKind::invalid_argument, "supernatural number is infinite");
  return finite_part();
}

Integer SupernaturalNumber::finite_part() const {
  Integer v = 1;
  for (const auto& [p, e] : exps_) {
    if (e.is_infinite()) continue;
    Integer pe;
    mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e.value());
    v *= pe;
  }
  return v;
}

SupernaturalNumber SupernaturalNumber::infinite_support() const {
  SupernaturalNumber s;
  for (const auto& [p, e] : exps_)
    if (e.is_infinite()) s.exps_[p] = e;
  return s;
}

bool SupernaturalNumber::divisible_by(const Integer& n) const {
  if (n == 0) return false;
  for (const auto& [p, e] : factorize(abs(n))) {
    auto it = exps_.find(p);
    if (it == exps_.end()) return false;
    if (!it->second.is_infinite() && it->second.value() < e) return false;
  }
  return true;
}

void SupernaturalNumber::multiply_prime(const Integer& prime, const Exponent& e) {
  if (!e.is_infinite() && e.value() == 0) return;
  auto [it, inserted] = exps_.try_emplace(prime, e);
  if (!inserted) it->second = it->second + e;
}

SupernaturalNumber& SupernaturalNumber::operator*=(const SupernaturalNumber& other) {
  for (const auto& [p, e] : other.exps_) multiply_prime(p, e);
  return *this;
}

SupernaturalNumber SupernaturalNumber::lcm(const SupernaturalNumber& other) const {
  SupernaturalNumber s = *this;
  for (const auto& [p, e] : other.exps_) {
    auto [it, inserted] = s.exps_.try_emplace(p, e);
    if (inserted) continue;
    if (e.is_infinite() || (!it->second.is_infinite() && e.value() > it->second.value()))
      it->second = e;
  }
  return s;
}

namespace {

std::string render(const SupernaturalNumber& s, const char* inf, const char* sep) {
  if (s.is_one()) return "1";
  std::string out;
  for (const auto& [p, e] : s.exponents()) {
    if (!out.empty()) out += sep;
    out += p.get_str();
    if (e.is_infinite()) {
      out += "^";
      out += inf;
    } else if (e.value() != 1) {
      out += "^" + std::to_string(e.value());
    }
  }
  return out;
}

}  // namespace

std::string to_string(const SupernaturalNumber& s) { return render(s, "inf", "*"); }

std::string to_pretty_string(const SupernaturalNumber& s) { return render(s, "∞", "·"); }

SupernaturalNumber parse_supernatural(const std::string& text) {
  SupernaturalNumber s;
  if (text == "1") return s;
  std::stringstream ss(text);
  std::string factor;
  while (std::getline(ss, factor, '*')) {
    auto caret = factor.find('^');
    std::string base = factor.substr(0, caret);
    Integer p;
    if (base.empty() || p.set_str(base, 10) != 0 || p < 2) {
      throw Error(ErrorKind::syntax, "bad supernatural factor '" + factor + "'");
    }
    if (caret == std::string::npos) {
      s.multiply_prime(p, Exponent(1));
    } else {
      std::string exp = factor.substr(caret + 1);
      if (exp == "inf") {
        s.multiply_prime(p, Exponent::infinite());
      } else {
        try {
          s.multiply_prime(p, Exponent(std::stoull(exp)));
        } catch (const std::exception&) {
          throw Error(ErrorKind::syntax, "bad exponent in '" + factor + "'");
        }
      }
    }
  }
  return s;
}

}  // namespace afk
