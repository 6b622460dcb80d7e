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

#include "core/smatrix.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "core/bigrational.hpp"
#include "core/error.hpp"

namespace qpinem {

void CouplingSet::validate() const {
  if (g.empty()) {
    throw Error(ErrorCode::InvalidArgument, "CouplingSet: at least one electron required");
  }
  for (const Complex& z : g) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw Error(ErrorCode::InvalidArgument, "CouplingSet: non-finite coupling");
    }
  }
}

namespace {

constexpr double kLogOverflow = 690.0;  // exp() beyond this leaves double range

// The series terms are products of integer powers of a few fixed real
// multipliers divided (and once multiplied) by factorials. The two arithmetic
// backends share that per-term shape: floats run a log-magnitude anchor per
// inner block and a cheap ratio recurrence inside it; rationals do the same
// walk exactly.

struct FloatSeries {
  using Term = double;
  // multiplier slot: linear value plus log magnitude of |value|
  struct Mult {
    double value = 0.0;
    double log_abs = 0.0;
    double sign = 1.0;
    void set(double v) {
      value = v;
      log_abs = v == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::abs(v));
      sign = v < 0.0 ? -1.0 : 1.0;
    }
  };
  std::array<Mult, 4> mult;
  double log_prefactor = 0.0;  // folded into every anchor
  KahanSum acc;

  Term anchor(const std::array<int, 4>& pow, int num_fact,
              std::initializer_list<int> den_facts) const {
    double lm = log_prefactor;
    double sg = 1.0;
    for (int i = 0; i < 4; ++i) {
      if (pow[i] != 0) {
        lm += pow[i] * mult[static_cast<std::size_t>(i)].log_abs;
        if (mult[static_cast<std::size_t>(i)].sign < 0.0 && (pow[i] & 1)) sg = -sg;
      }
    }
    if (num_fact >= 0) lm += log_factorial(num_fact);
    for (int d : den_facts) lm -= log_factorial(d);
    if (lm > kLogOverflow) {
      throw Error(ErrorCode::NumericOverflow,
                  "series term exceeds double range; use ExactRational or reduce scope");
    }
    return sg * std::exp(lm);
  }

  // t *= mult[mi] * a / (b * c)
  void step(Term& t, int mi, long a, long b, long c) const {
    t *= mult[static_cast<std::size_t>(mi)].value * static_cast<double>(a) /
         (static_cast<double>(b) * static_cast<double>(c));
  }

  static double magnitude(const Term& t) {
    double m = std::abs(t);
    if (!std::isfinite(m)) {
      throw Error(ErrorCode::NumericOverflow,
                  "series term exceeds double range; use ExactRational or reduce scope");
    }
    return m;
  }
  void add(const Term& t) { acc.add(t); }
  double total() const { return acc.value(); }
};

struct RationalSeries {
  using Term = BigRational;
  std::array<BigRational, 4> mult;
  double log_prefactor = 0.0;  // applied by the caller at the very end
  BigRational acc;

  static BigRational pow_nonneg(const BigRational& base, int k) {
    BigRational out(1);
    for (int i = 0; i < k; ++i) out = out * base;
    return out;
  }

  Term anchor(const std::array<int, 4>& pow, int num_fact,
              std::initializer_list<int> den_facts) const {
    BigRational t(1);
    for (int i = 0; i < 4; ++i) {
      if (pow[i] != 0) t = t * pow_nonneg(mult[static_cast<std::size_t>(i)], pow[i]);
    }
    if (num_fact >= 0) t = t * BigRational(BigInt::factorial(num_fact), BigInt(1));
    for (int d : den_facts) t = t / BigRational(BigInt::factorial(d), BigInt(1));
    return t;
  }

  void step(Term& t, int mi, long a, long b, long c) const {
    t = t * mult[static_cast<std::size_t>(mi)] * BigRational(a) /
        BigRational(static_cast<std::int64_t>(b) * c);
  }

  double magnitude(const Term& t) const {
    if (t.is_zero()) return 0.0;
    return std::exp(t.log_abs() + log_prefactor);
  }
  void add(const Term& t) { acc = acc + t; }
  double total() const { return acc.to_double() * std::exp(log_prefactor); }
};

// Tail cutoff bookkeeping for one unbounded index: stop once two consecutive
// blocks fall below term_tol relative to the largest term seen anywhere.
// Exactly-zero blocks (a zero coupling kills a multiplier) always count as
// negligible.
struct TailGuard {
  double tol;
  int consecutive_small = 0;
  bool should_stop(double block_max, double global_max) {
    if (block_max == 0.0 || (global_max > 0.0 && block_max < tol * global_max)) {
      ++consecutive_small;
    } else {
      consecutive_small = 0;
    }
    return consecutive_small >= 2;
  }
};

struct ElementContext {
  int n_i, n_f, dj, dk, dn;
  double x1, x2;
  Complex phase;        // prefactor phase
  double log_prefactor; // prefactor log magnitude
};

// Emit-left ordering: three indices bounded, r truncated by tolerance.
template <typename Series>
double sum_two_electron_bounded(Series& series, const ElementContext& e,
                                const SeriesControl& ctl) {
  double global_max = 0.0;
  for (int m = 0; m <= e.n_f; ++m) {
    for (int p = 0; p + m <= e.n_f; ++p) {
      if (m + p < e.dn) continue;  // s-window is empty for every r
      int r_start = std::max(0, -(e.dk + p));
      TailGuard guard{ctl.term_tol};
      for (int r = r_start;; ++r) {
        if (r - r_start > ctl.max_index) {
          throw Error(ErrorCode::SeriesNotConverged,
                      "element_two_electron: r-tail not below term_tol by max_index");
        }
        int s_lo = std::max(0, r - e.dj - m);
        int s_hi = e.dk + p + r;
        typename Series::Term t =
            series.anchor({m, p, s_lo, r}, -1,
                          {m, p, r, s_lo, e.n_f - m - p, e.dj + m + s_lo - r,
                           e.dk + p + r - s_lo});
        double block_max = 0.0;
        for (int s = s_lo;; ++s) {
          double mag = series.magnitude(t);
          block_max = std::max(block_max, mag);
          series.add(t);
          if (s == s_hi) break;
          // ratio between consecutive s terms
          series.step(t, 2, e.dk + p + r - s, s + 1, e.dj + m + s + 1 - r);
        }
        global_max = std::max(global_max, block_max);
        if (guard.should_stop(block_max, global_max)) break;
      }
    }
  }
  return series.total();
}

// Absorb-left ordering: only the s-window is bounded given (m, p, r); the
// other three indices are truncated by tolerance.
template <typename Series>
double sum_two_electron_altorder(Series& series, const ElementContext& e,
                                 const SeriesControl& ctl) {
  double global_max = 0.0;
  TailGuard m_guard{ctl.term_tol};
  for (int m = 0;; ++m) {
    if (m > ctl.max_index) {
      throw Error(ErrorCode::SeriesNotConverged,
                  "element_two_electron_altorder: m-tail not below term_tol by max_index");
    }
    double m_max = 0.0;
    int p_start = std::max(0, -e.dn - m);
    TailGuard p_guard{ctl.term_tol};
    for (int p = p_start;; ++p) {
      if (p - p_start > ctl.max_index) {
        throw Error(ErrorCode::SeriesNotConverged,
                    "element_two_electron_altorder: p-tail not below term_tol by max_index");
      }
      double p_max = 0.0;
      int r_start = std::max(0, e.dk - p);
      TailGuard r_guard{ctl.term_tol};
      for (int r = r_start;; ++r) {
        if (r - r_start > ctl.max_index) {
          throw Error(ErrorCode::SeriesNotConverged,
                      "element_two_electron_altorder: r-tail not below term_tol by max_index");
        }
        int s_lo = std::max(0, r + e.dj - m);
        int s_hi = p + r - e.dk;
        typename Series::Term t =
            series.anchor({m, p, s_lo, r}, e.n_f + m + p,
                          {m, p, r, s_lo, s_lo - r + m - e.dj, p - e.dk - s_lo + r});
        double block_max = 0.0;
        for (int s = s_lo;; ++s) {
          double mag = series.magnitude(t);
          block_max = std::max(block_max, mag);
          series.add(t);
          if (s == s_hi) break;
          series.step(t, 2, p - e.dk - s + r, s + 1, s + 1 - r + m - e.dj);
        }
        global_max = std::max(global_max, block_max);
        p_max = std::max(p_max, block_max);
        if (r_guard.should_stop(block_max, global_max)) break;
      }
      m_max = std::max(m_max, p_max);
      if (p_guard.should_stop(p_max, global_max)) break;
    }
    if (m_guard.should_stop(m_max, global_max)) break;
  }
  return series.total();
}

template <typename Series>
double sum_single_electron(Series& series, int n_f, int dn, const SeriesControl& ctl) {
  int m_lo = std::max(0, -dn);
  typename Series::Term t = series.anchor({m_lo, 0, 0, 0}, n_f + m_lo, {m_lo, m_lo + dn});
  double global_max = 0.0;
  for (int m = m_lo;; ++m) {
    if (m - m_lo > ctl.max_index) {
      throw Error(ErrorCode::SeriesNotConverged,
                  "element_single_electron: tail not below term_tol by max_index");
    }
    double mag = series.magnitude(t);
    global_max = std::max(global_max, mag);
    series.add(t);
    if (m > m_lo && mag < ctl.term_tol * global_max) break;
    series.step(t, 0, n_f + m + 1, m + 1, m + 1 + dn);
  }
  return series.total();
}

ElementContext make_context_emit_left(const CouplingSet& c, const TransitionLabel& t) {
  const Complex g1 = c.g[0], g2 = c.g[1];
  ElementContext e;
  e.n_i = t.n_i;
  e.n_f = t.n_f;
  e.dj = t.dj;
  e.dk = t.dk;
  e.dn = t.dn();
  e.x1 = std::norm(g1);
  e.x2 = std::norm(g2);
  e.log_prefactor = -0.5 * (e.x1 + e.x2) + 0.5 * (log_factorial(e.n_i) + log_factorial(e.n_f));
  e.phase = Complex(1.0, 0.0);
  if (e.dj != 0) {
    e.log_prefactor += e.dj * std::log(std::abs(g1));
    e.phase *= unit_pow(-std::conj(g1), e.dj);
  }
  if (e.dk != 0) {
    e.log_prefactor += e.dk * std::log(std::abs(g2));
    e.phase *= unit_pow(-std::conj(g2), e.dk);
  }
  return e;
}

ElementContext make_context_absorb_left(const CouplingSet& c, const TransitionLabel& t) {
  const Complex g1 = c.g[0], g2 = c.g[1];
  ElementContext e;
  e.n_i = t.n_i;
  e.n_f = t.n_f;
  e.dj = t.dj;
  e.dk = t.dk;
  e.dn = t.dn();
  e.x1 = std::norm(g1);
  e.x2 = std::norm(g2);
  e.log_prefactor = 0.5 * (e.x1 + e.x2) - 0.5 * (log_factorial(e.n_i) + log_factorial(e.n_f));
  e.phase = Complex(1.0, 0.0);
  if (e.dj != 0) {
    e.log_prefactor -= e.dj * std::log(std::abs(g1));
    e.phase *= unit_pow(g1, -e.dj);
  }
  if (e.dk != 0) {
    e.log_prefactor -= e.dk * std::log(std::abs(g2));
    e.phase *= unit_pow(g2, -e.dk);
  }
  return e;
}

// Shared trivial cases; returns true when *out is final.
bool two_electron_trivial(const CouplingSet& c, const TransitionLabel& t, Complex* out) {
  c.validate();
  if (c.n_electrons() != 2) {
    throw Error(ErrorCode::InvalidArgument, "element_two_electron: exactly two couplings required");
  }
  if (t.n_i < 0 || t.n_f < 0) {
    throw Error(ErrorCode::InvalidArgument, "element_two_electron: photon numbers must be >= 0");
  }
  // Selection rule checked before any series work.
  if (!t.conserves_energy()) {
    *out = Complex(0.0, 0.0);
    return true;
  }
  double x1 = std::norm(c.g[0]);
  double x2 = std::norm(c.g[1]);
  if (x1 == 0.0 && t.dj != 0) {
    *out = Complex(0.0, 0.0);
    return true;
  }
  if (x2 == 0.0 && t.dk != 0) {
    *out = Complex(0.0, 0.0);
    return true;
  }
  if (x1 == 0.0 && x2 == 0.0) {
    *out = (t.dj == 0 && t.dk == 0 && t.n_f == t.n_i) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
    return true;
  }
  return false;
}

}  // namespace

Complex element_two_electron(const CouplingSet& c, const TransitionLabel& t,
                             const SeriesControl& ctl) {
  Complex out;
  if (two_electron_trivial(c, t, &out)) return out;
  ElementContext e = make_context_emit_left(c, t);
  double sum;
  if (ctl.arithmetic == Arithmetic::LogGammaFloat) {
    FloatSeries series;
    series.log_prefactor = e.log_prefactor;
    series.mult[0].set(-e.x1);
    series.mult[1].set(-e.x2);
    series.mult[2].set(-0.5 * e.x1);
    series.mult[3].set(-0.5 * e.x2);
    sum = sum_two_electron_bounded(series, e, ctl);
  } else {
    RationalSeries series;
    series.log_prefactor = e.log_prefactor;
    series.mult[0] = -BigRational::from_double(e.x1);
    series.mult[1] = -BigRational::from_double(e.x2);
    series.mult[2] = -(BigRational::from_double(e.x1) / BigRational(2));
    series.mult[3] = -(BigRational::from_double(e.x2) / BigRational(2));
    sum = sum_two_electron_bounded(series, e, ctl);
  }
  return e.phase * sum;
}

Complex element_two_electron_altorder(const CouplingSet& c, const TransitionLabel& t,
                                      const SeriesControl& ctl) {
  Complex out;
  if (two_electron_trivial(c, t, &out)) return out;
  ElementContext e = make_context_absorb_left(c, t);
  double sum;
  if (ctl.arithmetic == Arithmetic::LogGammaFloat) {
    FloatSeries series;
    series.log_prefactor = e.log_prefactor;
    series.mult[0].set(-e.x1);
    series.mult[1].set(-e.x2);
    series.mult[2].set(0.5 * e.x1);
    series.mult[3].set(0.5 * e.x2);
    sum = sum_two_electron_altorder(series, e, ctl);
  } else {
    RationalSeries series;
    series.log_prefactor = e.log_prefactor;
    series.mult[0] = -BigRational::from_double(e.x1);
    series.mult[1] = -BigRational::from_double(e.x2);
    series.mult[2] = BigRational::from_double(e.x1) / BigRational(2);
    series.mult[3] = BigRational::from_double(e.x2) / BigRational(2);
    sum = sum_two_electron_altorder(series, e, ctl);
  }
  return e.phase * sum;
}

Complex element_single_electron(Complex g, int n_i, int n_f, const SeriesControl& ctl) {
  if (n_i < 0 || n_f < 0) {
    throw Error(ErrorCode::InvalidArgument, "element_single_electron: photon numbers must be >= 0");
  }
  if (!std::isfinite(g.real()) || !std::isfinite(g.imag())) {
    throw Error(ErrorCode::InvalidArgument, "element_single_electron: non-finite coupling");
  }
  int dn = n_f - n_i;
  double x = std::norm(g);
  if (x == 0.0) return n_f == n_i ? Complex(1.0, 0.0) : Complex(0.0, 0.0);

  double log_pref = 0.5 * x - 0.5 * (log_factorial(n_i) + log_factorial(n_f));
  Complex phase(1.0, 0.0);
  if (dn != 0) {
    log_pref += dn * std::log(std::abs(g));
    phase = unit_pow(g, dn);
  }
  double sum;
  if (ctl.arithmetic == Arithmetic::LogGammaFloat) {
    FloatSeries series;
    series.log_prefactor = log_pref;
    series.mult[0].set(-x);
    sum = sum_single_electron(series, n_f, dn, ctl);
  } else {
    RationalSeries series;
    series.log_prefactor = log_pref;
    series.mult[0] = -BigRational::from_double(x);
    sum = sum_single_electron(series, n_f, dn, ctl);
  }
  return phase * sum;
}

}  // namespace qpinem
