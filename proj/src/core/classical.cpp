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

#include "core/classical.hpp"

#include <cmath>

#include "core/error.hpp"

namespace qpinem {

void ClassicalCoupling::validate() const {
  if (script_g.empty()) {
    throw Error(ErrorCode::InvalidArgument, "ClassicalCoupling: at least one electron required");
  }
  for (const Complex& z : script_g) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw Error(ErrorCode::InvalidArgument, "ClassicalCoupling: non-finite entry");
    }
  }
}

double bessel_jn(int order, double x) {
  // Reflections first: J_{-n}(x) = (-1)^n J_n(x), J_n(-x) = (-1)^n J_n(x).
  double sign = 1.0;
  if (order < 0) {
    order = -order;
    if (order & 1) sign = -sign;
  }
  if (x < 0.0) {
    x = -x;
    if (order & 1) sign = -sign;
  }
  if (x == 0.0) return order == 0 ? sign : 0.0;

  // Downward recurrence start well above both order and argument, then
  // normalize with J_0 + 2 J_2 + 2 J_4 + ... = 1.
  int top = std::max(order, static_cast<int>(x) + 2);
  int start = top + 16 + static_cast<int>(std::sqrt(42.0 * top));
  if (start & 1) ++start;

  constexpr double kRescale = 1e250;
  double jp = 0.0;   // J_{k+1}
  double jc = 1e-30; // J_k, seeded at k = start
  double result = 0.0;
  double norm = 2.0 * jc;  // accumulates J_0 + 2 sum_{m>=1} J_{2m}; start is even
  for (int k = start - 1; k >= 0; --k) {
    double jm = (2.0 * (k + 1)) / x * jc - jp;  // J_k
    jp = jc;
    jc = jm;
    if (std::abs(jc) > kRescale) {
      jc /= kRescale;
      jp /= kRescale;
      result /= kRescale;
      norm /= kRescale;
    }
    if (k == order) result = jc;
    if ((k & 1) == 0) norm += (k == 0) ? jc : 2.0 * jc;
  }
  return sign * result / norm;
}

Complex classical_amplitude(const ClassicalCoupling& cc, int j_f, int k_f) {
  cc.validate();
  if (cc.script_g.size() != 2) {
    throw Error(ErrorCode::InvalidArgument, "classical_amplitude: exactly two electrons");
  }
  auto one = [](Complex sg, int order) -> Complex {
    double mag = std::abs(sg);
    double j = bessel_jn(order, 2.0 * mag);
    if (mag == 0.0 || order == 0) return Complex(j, 0.0);
    return std::polar(1.0, std::arg(sg) * order) * j;
  };
  return one(cc.script_g[0], j_f) * one(cc.script_g[1], k_f);
}

JointDistribution classical_joint(const ClassicalCoupling& cc, int j_lo, int j_hi, int k_lo,
                                  int k_hi) {
  cc.validate();
  if (cc.script_g.size() != 2) {
    throw Error(ErrorCode::InvalidArgument, "classical_joint: exactly two electrons");
  }
  if (j_lo > j_hi || k_lo > k_hi) {
    throw Error(ErrorCode::InvalidArgument, "classical_joint: empty window");
  }
  std::vector<double> pj(static_cast<std::size_t>(j_hi - j_lo + 1));
  std::vector<double> pk(static_cast<std::size_t>(k_hi - k_lo + 1));
  double a1 = 2.0 * std::abs(cc.script_g[0]);
  double a2 = 2.0 * std::abs(cc.script_g[1]);
  for (int j = j_lo; j <= j_hi; ++j) {
    double b = bessel_jn(j, a1);
    pj[static_cast<std::size_t>(j - j_lo)] = b * b;
  }
  for (int k = k_lo; k <= k_hi; ++k) {
    double b = bessel_jn(k, a2);
    pk[static_cast<std::size_t>(k - k_lo)] = b * b;
  }
  JointDistribution d;
  d.axes = {{"e1", j_lo, j_hi}, {"e2", k_lo, k_hi}};
  d.table.resize(pj.size() * pk.size());
  for (std::size_t a = 0; a < pj.size(); ++a) {
    for (std::size_t b = 0; b < pk.size(); ++b) {
      d.table[a * pk.size() + b] = pj[a] * pk[b];
    }
  }
  d.total_mass = d.recompute_mass();
  return d;
}

double classical_limit_distance(const JointDistribution& quantum_e1e2,
                                const ClassicalCoupling& cc) {
  if (quantum_e1e2.axes.size() != 2) {
    throw Error(ErrorCode::InvalidArgument,
                "classical_limit_distance: expected a two-axis electron distribution");
  }
  const Axis& aj = quantum_e1e2.axes[0];
  const Axis& ak = quantum_e1e2.axes[1];
  JointDistribution cl = classical_joint(cc, aj.lo, aj.hi, ak.lo, ak.hi);
  double within = tv_distance(quantum_e1e2, cl);
  double tail_q = 1.0 - quantum_e1e2.recompute_mass();
  double tail_c = 1.0 - cl.recompute_mass();
  return within + 0.5 * std::abs(tail_q - tail_c);
}

}  // namespace qpinem
