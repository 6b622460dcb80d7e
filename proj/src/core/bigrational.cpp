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

#include "core/bigrational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace qpinem {

namespace {
constexpr double kLn2 = 0.69314718055994530942;
}

BigInt::BigInt(std::int64_t v) {
  negative_ = v < 0;
  std::uint64_t mag = negative_ ? -static_cast<std::uint64_t>(v) : static_cast<std::uint64_t>(v);
  while (mag != 0) {
    limbs_.push_back(static_cast<std::uint32_t>(mag & 0xffffffffUL));
    mag >>= 32;
  }
}

void BigInt::trim() {
  while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
  if (limbs_.empty()) negative_ = false;
}

BigInt BigInt::from_double_mantissa(double x, int* exp2) {
  if (!std::isfinite(x)) {
    throw Error(ErrorCode::InvalidArgument, "BigInt: non-finite double");
  }
  int e = 0;
  double m = std::frexp(x, &e);  // x = m * 2^e, |m| in [0.5, 1)
  // 53 mantissa bits make the integer exact.
  m = std::ldexp(m, 53);
  e -= 53;
  *exp2 = e;
  return BigInt(static_cast<std::int64_t>(m));
}

BigInt BigInt::factorial(int n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "BigInt::factorial: negative");
  BigInt acc(1);
  for (int k = 2; k <= n; ++k) acc = acc * BigInt(k);
  return acc;
}

int BigInt::compare_abs(const BigInt& o) const {
  if (limbs_.size() != o.limbs_.size()) {
    return limbs_.size() < o.limbs_.size() ? -1 : 1;
  }
  for (std::size_t i = limbs_.size(); i-- > 0;) {
    if (limbs_[i] != o.limbs_[i]) return limbs_[i] < o.limbs_[i] ? -1 : 1;
  }
  return 0;
}

bool BigInt::operator==(const BigInt& o) const {
  return negative_ == o.negative_ && limbs_ == o.limbs_;
}

std::vector<std::uint32_t> BigInt::add_mag(const std::vector<std::uint32_t>& a,
                                           const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out(std::max(a.size(), b.size()) + 1, 0);
  std::uint64_t carry = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t s = carry;
    if (i < a.size()) s += a[i];
    if (i < b.size()) s += b[i];
    out[i] = static_cast<std::uint32_t>(s & 0xffffffffUL);
    carry = s >> 32;
  }
  return out;
}

// Requires |a| >= |b|.
std::vector<std::uint32_t> BigInt::sub_mag(const std::vector<std::uint32_t>& a,
                                           const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out(a.size(), 0);
  std::int64_t borrow = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::int64_t s = static_cast<std::int64_t>(a[i]) - borrow;
    if (i < b.size()) s -= static_cast<std::int64_t>(b[i]);
    if (s < 0) {
      s += (1LL << 32);
      borrow = 1;
    } else {
      borrow = 0;
    }
    out[i] = static_cast<std::uint32_t>(s);
  }
  return out;
}

BigInt BigInt::operator+(const BigInt& o) const {
  BigInt out;
  if (negative_ == o.negative_) {
    out.limbs_ = add_mag(limbs_, o.limbs_);
    out.negative_ = negative_;
  } else {
    int c = compare_abs(o);
    if (c == 0) return BigInt();
    if (c > 0) {
      out.limbs_ = sub_mag(limbs_, o.limbs_);
      out.negative_ = negative_;
    } else {
      out.limbs_ = sub_mag(o.limbs_, limbs_);
      out.negative_ = o.negative_;
    }
  }
  out.trim();
  return out;
}

BigInt BigInt::operator-() const {
  BigInt out = *this;
  if (!out.is_zero()) out.negative_ = !out.negative_;
  return out;
}

BigInt BigInt::operator-(const BigInt& o) const { return *this + (-o); }

BigInt BigInt::operator*(const BigInt& o) const {
  if (is_zero() || o.is_zero()) return BigInt();
  BigInt out;
  out.limbs_.assign(limbs_.size() + o.limbs_.size(), 0);
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    std::uint64_t carry = 0;
    for (std::size_t j = 0; j < o.limbs_.size(); ++j) {
      std::uint64_t cur = out.limbs_[i + j] +
                          static_cast<std::uint64_t>(limbs_[i]) * o.limbs_[j] + carry;
      out.limbs_[i + j] = static_cast<std::uint32_t>(cur & 0xffffffffUL);
      carry = cur >> 32;
    }
    std::size_t k = i + o.limbs_.size();
    while (carry != 0) {
      std::uint64_t cur = out.limbs_[k] + carry;
      out.limbs_[k] = static_cast<std::uint32_t>(cur & 0xffffffffUL);
      carry = cur >> 32;
      ++k;
    }
  }
  out.negative_ = negative_ != o.negative_;
  out.trim();
  return out;
}

BigInt BigInt::shifted_left(unsigned bits) const {
  if (is_zero() || bits == 0) {
    BigInt out = *this;
    return out;
  }
  unsigned limb_shift = bits / 32;
  unsigned bit_shift = bits % 32;
  BigInt out;
  out.negative_ = negative_;
  out.limbs_.assign(limbs_.size() + limb_shift + 1, 0);
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    std::uint64_t v = static_cast<std::uint64_t>(limbs_[i]) << bit_shift;
    out.limbs_[i + limb_shift] |= static_cast<std::uint32_t>(v & 0xffffffffUL);
    out.limbs_[i + limb_shift + 1] |= static_cast<std::uint32_t>(v >> 32);
  }
  out.trim();
  return out;
}

// Shift-and-subtract long division on magnitudes; adequate for the exact
// series oracle, which only sees a few thousand limbs of work.
void BigInt::divmod(const BigInt& num, const BigInt& den, BigInt& quot, BigInt& rem) {
  if (den.is_zero()) throw Error(ErrorCode::InvalidArgument, "BigInt: division by zero");
  if (num.compare_abs(den) < 0) {
    quot = BigInt();
    rem = num;
    return;
  }
  // Work on magnitudes.
  BigInt n = num;
  n.negative_ = false;
  BigInt d = den;
  d.negative_ = false;

  int shift = static_cast<int>((n.limbs_.size() - d.limbs_.size() + 1) * 32);
  BigInt dshift = d.shifted_left(static_cast<unsigned>(shift));
  BigInt q;
  q.limbs_.assign(n.limbs_.size() - d.limbs_.size() + 2, 0);
  for (int bit = shift; bit >= 0; --bit) {
    if (n.compare_abs(dshift) >= 0) {
      n = n - dshift;
      q.limbs_[static_cast<std::size_t>(bit) / 32] |= (1U << (bit % 32));
    }
    // dshift >>= 1
    BigInt half;
    half.limbs_.assign(dshift.limbs_.size(), 0);
    std::uint32_t carry = 0;
    for (std::size_t i = dshift.limbs_.size(); i-- > 0;) {
      half.limbs_[i] = (dshift.limbs_[i] >> 1) | (carry << 31);
      carry = dshift.limbs_[i] & 1U;
    }
    half.trim();
    dshift = half;
  }
  q.trim();
  n.trim();
  q.negative_ = !q.is_zero() && (num.negative_ != den.negative_);
  n.negative_ = !n.is_zero() && num.negative_;
  quot = q;
  rem = n;
}

BigInt BigInt::gcd(BigInt a, BigInt b) {
  a.negative_ = false;
  b.negative_ = false;
  while (!b.is_zero()) {
    BigInt q, r;
    divmod(a, b, q, r);
    a = b;
    b = r;
  }
  if (a.is_zero()) return BigInt(1);
  return a;
}

double BigInt::to_double() const {
  if (is_zero()) return 0.0;
  double acc = 0.0;
  // Top three limbs carry more bits than a double mantissa.
  std::size_t top = limbs_.size();
  std::size_t lo = top > 3 ? top - 3 : 0;
  for (std::size_t i = top; i-- > lo;) {
    acc = acc * 4294967296.0 + static_cast<double>(limbs_[i]);
  }
  acc = std::ldexp(acc, static_cast<int>(lo) * 32);
  return negative_ ? -acc : acc;
}

double BigInt::log_abs() const {
  if (is_zero()) return -std::numeric_limits<double>::infinity();
  std::size_t top = limbs_.size();
  std::size_t lo = top > 3 ? top - 3 : 0;
  double acc = 0.0;
  for (std::size_t i = top; i-- > lo;) {
    acc = acc * 4294967296.0 + static_cast<double>(limbs_[i]);
  }
  return std::log(acc) + static_cast<double>(lo) * 32.0 * kLn2;
}

std::string BigInt::to_string() const {
  if (is_zero()) return "0";
  BigInt n = *this;
  n.negative_ = false;
  const BigInt ten(10);
  std::string digits;
  while (!n.is_zero()) {
    BigInt q, r;
    divmod(n, ten, q, r);
    int d = r.is_zero() ? 0 : static_cast<int>(r.limbs_[0]);
    digits.push_back(static_cast<char>('0' + d));
    n = q;
  }
  if (negative_) digits.push_back('-');
  std::reverse(digits.begin(), digits.end());
  return digits;
}

BigRational::BigRational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw Error(ErrorCode::InvalidArgument, "BigRational: zero denominator");
  reduce();
}

void BigRational::reduce() {
  if (num_.is_zero()) {
    den_ = BigInt(1);
    return;
  }
  if (den_.negative()) {
    num_ = -num_;
    den_ = -den_;
  }
  BigInt g = BigInt::gcd(num_, den_);
  BigInt q, r;
  BigInt::divmod(num_, g, q, r);
  num_ = q;
  BigInt::divmod(den_, g, q, r);
  den_ = q;
}

BigRational BigRational::from_double(double x) {
  if (x == 0.0) return BigRational(0);
  int e = 0;
  BigInt m = BigInt::from_double_mantissa(x, &e);
  if (e >= 0) {
    return BigRational(m.shifted_left(static_cast<unsigned>(e)), BigInt(1));
  }
  return BigRational(m, BigInt(1).shifted_left(static_cast<unsigned>(-e)));
}

BigRational BigRational::operator+(const BigRational& o) const {
  return BigRational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

BigRational BigRational::operator-(const BigRational& o) const {
  return BigRational(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

BigRational BigRational::operator*(const BigRational& o) const {
  return BigRational(num_ * o.num_, den_ * o.den_);
}

BigRational BigRational::operator/(const BigRational& o) const {
  if (o.is_zero()) throw Error(ErrorCode::InvalidArgument, "BigRational: division by zero");
  return BigRational(num_ * o.den_, den_ * o.num_);
}

BigRational BigRational::operator-() const {
  BigRational out = *this;
  out.num_ = -out.num_;
  return out;
}

bool BigRational::operator==(const BigRational& o) const {
  return num_ == o.num_ && den_ == o.den_;
}

double BigRational::to_double() const {
  if (num_.is_zero()) return 0.0;
  // Scale through logs when the parts overflow a double on their own.
  double n = num_.to_double();
  double d = den_.to_double();
  if (std::isfinite(n) && std::isfinite(d) && d != 0.0) return n / d;
  double lg = log_abs();
  double mag = std::exp(lg);
  return num_.sign() < 0 ? -mag : mag;
}

}  // namespace qpinem
