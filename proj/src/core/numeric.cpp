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

#include "core/numeric.hpp"

#include <vector>

#include "core/error.hpp"

namespace qpinem {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Validation: return "validation";
    case ErrorCode::CutoffTooSmall: return "cutoff_too_small";
    case ErrorCode::SeriesNotConverged: return "series_not_converged";
    case ErrorCode::NumericOverflow: return "numeric_overflow";
    case ErrorCode::CutoffBudgetExceeded: return "cutoff_budget_exceeded";
    case ErrorCode::DimensionTooLarge: return "dimension_too_large";
    case ErrorCode::UnknownAxis: return "unknown_axis";
    case ErrorCode::EmptySlice: return "empty_slice";
    case ErrorCode::Io: return "io";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

namespace {

constexpr int kLogFactorialTableSize = 4096;

std::vector<double> build_log_factorial_table() {
  std::vector<double> table(kLogFactorialTableSize);
  table[0] = 0.0;
  // n <= 20: 20! = 2432902008176640000 fits in a uint64, so ln of the exact
  // integer product is correctly rounded.
  std::uint64_t fact = 1;
  for (int n = 1; n <= 20; ++n) {
    fact *= static_cast<std::uint64_t>(n);
    table[n] = std::log(static_cast<double>(fact));
  }
  for (int n = 21; n < kLogFactorialTableSize; ++n) {
    table[n] = std::lgamma(static_cast<double>(n) + 1.0);
  }
  return table;
}

}  // namespace

double log_factorial(int n) {
  if (n < 0) {
    throw Error(ErrorCode::InvalidArgument, "log_factorial: negative argument");
  }
  static const std::vector<double> table = build_log_factorial_table();
  if (n < kLogFactorialTableSize) return table[n];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

Complex pow_int(Complex z, long k) {
  if (k == 0) return Complex(1.0, 0.0);
  bool invert = k < 0;
  unsigned long e = invert ? static_cast<unsigned long>(-k) : static_cast<unsigned long>(k);
  Complex base = z;
  Complex acc(1.0, 0.0);
  while (e != 0) {
    if (e & 1UL) acc *= base;
    base *= base;
    e >>= 1;
  }
  if (invert) {
    if (acc == Complex(0.0, 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "pow_int: negative power of zero");
    }
    return Complex(1.0, 0.0) / acc;
  }
  return acc;
}

Complex unit_pow(Complex z, long k) {
  double mag = std::abs(z);
  if (mag == 0.0) {
    throw Error(ErrorCode::InvalidArgument, "unit_pow: zero argument");
  }
  return std::polar(1.0, std::arg(z) * static_cast<double>(k));
}

}  // namespace qpinem
