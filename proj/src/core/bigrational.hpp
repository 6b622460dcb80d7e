// Copyright 2026 The qpinem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QPINEM_CORE_BIGRATIONAL_HPP
#define QPINEM_CORE_BIGRATIONAL_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace qpinem {

// Arbitrary-precision signed integer, base 2^32 sign-magnitude. Only the
// handful of operations the exact series accumulator needs.
class BigInt {
 public:
  BigInt() = default;
  BigInt(std::int64_t v);

  static BigInt from_double_mantissa(double x, int* exp2);  // x = m * 2^exp2
  static BigInt factorial(int n);

  bool is_zero() const { return limbs_.empty(); }
  bool negative() const { return negative_; }
  int sign() const { return is_zero() ? 0 : (negative_ ? -1 : 1); }

  BigInt operator+(const BigInt& o) const;
  BigInt operator-(const BigInt& o) const;
  BigInt operator*(const BigInt& o) const;
  BigInt operator-() const;

  // Quotient truncated toward zero; remainder has the dividend's sign.
  static void divmod(const BigInt& num, const BigInt& den, BigInt& quot, BigInt& rem);
  static BigInt gcd(BigInt a, BigInt b);

  BigInt shifted_left(unsigned bits) const;

  int compare_abs(const BigInt& o) const;  // -1, 0, +1
  bool operator==(const BigInt& o) const;

  double to_double() const;
  // log(|value|); -inf for zero.
  double log_abs() const;
  std::string to_string() const;  // decimal, for diagnostics

 private:
  void trim();
  static std::vector<std::uint32_t> add_mag(const std::vector<std::uint32_t>& a,
                                            const std::vector<std::uint32_t>& b);
  static std::vector<std::uint32_t> sub_mag(const std::vector<std::uint32_t>& a,
                                            const std::vector<std::uint32_t>& b);

  bool negative_ = false;
  std::vector<std::uint32_t> limbs_;  // little-endian, no trailing zeros
};

// Rational number with a BigInt numerator/denominator, reduced on
// construction; denominator kept positive.
class BigRational {
 public:
  BigRational() : num_(0), den_(1) {}
  BigRational(std::int64_t v) : num_(v), den_(1) {}
  BigRational(BigInt num, BigInt den);

  // Exact value of the double (every finite double is rational).
  static BigRational from_double(double x);

  BigRational operator+(const BigRational& o) const;
  BigRational operator-(const BigRational& o) const;
  BigRational operator*(const BigRational& o) const;
  BigRational operator/(const BigRational& o) const;
  BigRational operator-() const;

  bool is_zero() const { return num_.is_zero(); }
  int sign() const { return num_.sign(); }
  bool operator==(const BigRational& o) const;

  double to_double() const;
  double log_abs() const { return num_.log_abs() - den_.log_abs(); }
  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }

 private:
  void reduce();
  BigInt num_;
  BigInt den_;
};

}  // namespace qpinem

#endif
