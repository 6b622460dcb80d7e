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

#include "core/states.hpp"

#include <cmath>

#include "core/error.hpp"

namespace qpinem {

double PhotonState::prob(int n) const {
  if (n < 0 || n > n_cutoff) return 0.0;
  if (mixed()) return probabilities[static_cast<std::size_t>(n)];
  return std::norm(amplitudes[static_cast<std::size_t>(n)]);
}

double PhotonState::retained_mass() const {
  KahanSum s;
  for (int n = 0; n <= n_cutoff; ++n) s.add(prob(n));
  return s.value();
}

double PhotonState::mean() const {
  KahanSum s;
  for (int n = 0; n <= n_cutoff; ++n) s.add(n * prob(n));
  return s.value();
}

double PhotonState::variance() const {
  double mu = mean();
  KahanSum s;
  for (int n = 0; n <= n_cutoff; ++n) {
    double d = n - mu;
    s.add(d * d * prob(n));
  }
  return s.value();
}

PhotonState make_fock(int n_i, int n_cutoff) {
  if (n_i < 0) throw Error(ErrorCode::InvalidArgument, "make_fock: n_i must be >= 0");
  if (n_cutoff < 0) n_cutoff = n_i;
  if (n_cutoff < n_i) {
    throw Error(ErrorCode::CutoffTooSmall, "make_fock: n_cutoff below n_i");
  }
  PhotonState st;
  st.kind = StateKind::Fock;
  st.n_cutoff = n_cutoff;
  st.n_avg_requested = static_cast<double>(n_i);
  st.amplitudes.assign(static_cast<std::size_t>(n_cutoff) + 1, Complex(0.0, 0.0));
  st.amplitudes[static_cast<std::size_t>(n_i)] = Complex(1.0, 0.0);
  st.truncation_deficit = 0.0;
  return st;
}

namespace {

// Default coherent cutoff: mean plus a wide Gaussian-tail margin. C = 12
// standard deviations plus a floor of 15 keeps the Poisson tail below 1e-10
// for any n_avg.
int default_coherent_cutoff(double n_avg) {
  return static_cast<int>(std::ceil(n_avg + 12.0 * std::sqrt(n_avg) + 15.0));
}

}  // namespace

PhotonState make_coherent(double n_avg, int n_cutoff, double truncation_tol) {
  if (n_avg < 0.0 || !std::isfinite(n_avg)) {
    throw Error(ErrorCode::InvalidArgument, "make_coherent: n_avg must be finite and >= 0");
  }
  if (n_cutoff < 0) n_cutoff = default_coherent_cutoff(n_avg);
  PhotonState st;
  st.kind = StateKind::Coherent;
  st.n_cutoff = n_cutoff;
  st.n_avg_requested = n_avg;
  st.amplitudes.assign(static_cast<std::size_t>(n_cutoff) + 1, Complex(0.0, 0.0));
  if (n_avg == 0.0) {
    st.amplitudes[0] = Complex(1.0, 0.0);
    st.truncation_deficit = 0.0;
    return st;
  }
  double log_alpha = 0.5 * std::log(n_avg);
  KahanSum mass;
  for (int n = 0; n <= n_cutoff; ++n) {
    double lg = -0.5 * n_avg + n * log_alpha - 0.5 * log_factorial(n);
    double a = std::exp(lg);
    st.amplitudes[static_cast<std::size_t>(n)] = Complex(a, 0.0);
    mass.add(a * a);
  }
  st.truncation_deficit = 1.0 - mass.value();
  if (st.truncation_deficit < 0.0) st.truncation_deficit = 0.0;
  if (st.truncation_deficit > truncation_tol) {
    throw Error(ErrorCode::CutoffTooSmall,
                "make_coherent: cutoff retains less than 1 - truncation_tol of the mass");
  }
  return st;
}

PhotonState make_thermal(double n_avg, int n_cutoff, double truncation_tol) {
  if (n_avg < 0.0 || !std::isfinite(n_avg)) {
    throw Error(ErrorCode::InvalidArgument, "make_thermal: n_avg must be finite and >= 0");
  }
  if (n_cutoff < 0) {
    if (n_avg == 0.0) {
      n_cutoff = 0;
    } else {
      // Geometric tail: (n_avg/(n_avg+1))^(cutoff+1) < truncation_tol.
      double ratio = n_avg / (n_avg + 1.0);
      n_cutoff = static_cast<int>(std::ceil(std::log(truncation_tol) / std::log(ratio))) + 2;
    }
  }
  PhotonState st;
  st.kind = StateKind::Thermal;
  st.n_cutoff = n_cutoff;
  st.n_avg_requested = n_avg;
  st.probabilities.assign(static_cast<std::size_t>(n_cutoff) + 1, 0.0);
  if (n_avg == 0.0) {
    st.probabilities[0] = 1.0;
    st.truncation_deficit = 0.0;
    return st;
  }
  double ratio = n_avg / (n_avg + 1.0);
  double p = 1.0 / (n_avg + 1.0);
  KahanSum mass;
  for (int n = 0; n <= n_cutoff; ++n) {
    st.probabilities[static_cast<std::size_t>(n)] = p;
    mass.add(p);
    p *= ratio;
  }
  st.truncation_deficit = 1.0 - mass.value();
  if (st.truncation_deficit < 0.0) st.truncation_deficit = 0.0;
  if (st.truncation_deficit > truncation_tol) {
    throw Error(ErrorCode::CutoffTooSmall,
                "make_thermal: cutoff retains less than 1 - truncation_tol of the mass");
  }
  return st;
}

}  // namespace qpinem
