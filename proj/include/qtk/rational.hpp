#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "qtk/errors.hpp"

namespace qtk {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational rational_pow(const Rational& base, std::uint64_t exp) {
  Rational acc(1);
  Rational b = base;
  while (exp > 0) {
    if (exp & 1) acc *= b;
    b *= b;
    exp >>= 1;
  }
  return acc;
}

// Serialized form is "p/q" (or "p" when q == 1), matching the file formats.
inline std::string rational_to_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string_view::npos) {
      return Rational(BigInt(std::string(text)));
    }
    const BigInt num{std::string(text.substr(0, slash))};
    const BigInt den{std::string(text.substr(slash + 1))};
    if (den == 0) fail(ErrorCode::InvalidConfig, "rational with zero denominator");
    return Rational(num, den);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidConfig, "malformed rational '" + std::string(text) + "'");
  }
}

// Cache of base^k, grown on demand. Used on hot paths where the same rate is
// raised to many small exponents.
class PowerCache {
 public:
  explicit PowerCache(Rational base) : base_(std::move(base)) {
    powers_.emplace_back(1);
  }

  const Rational& pow(std::size_t k) {
    while (powers_.size() <= k) powers_.push_back(powers_.back() * base_);
    return powers_[k];
  }

  const Rational& base() const { return base_; }

 private:
  Rational base_;
  std::vector<Rational> powers_;
};

}  // namespace qtk
