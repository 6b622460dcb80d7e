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

#ifndef QPINEM_CORE_NUMERIC_HPP
#define QPINEM_CORE_NUMERIC_HPP

#include <cmath>
#include <complex>
#include <cstdint>

namespace qpinem {

using Complex = std::complex<double>;

/// ln(n!), exact integer product for n <= 20, lgamma above that.
double log_factorial(int n);

/// Neumaier-compensated accumulator. Deterministic for a fixed add order.
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// z^k for integer k (negative k inverts); z must be nonzero when k < 0.
Complex pow_int(Complex z, long k);

/// (z/|z|)^k. Requires z != 0.
Complex unit_pow(Complex z, long k);

inline double parity_sign(long k) { return (k & 1L) ? -1.0 : 1.0; }

}  // namespace qpinem

#endif
