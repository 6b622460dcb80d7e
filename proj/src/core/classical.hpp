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

#ifndef QPINEM_CORE_CLASSICAL_HPP
#define QPINEM_CORE_CLASSICAL_HPP

#include <vector>

#include "core/numeric.hpp"
#include "core/stats.hpp"

namespace qpinem {

// Classical dimensionless couplings, one per electron. In the classical limit
// of a coherent drive these relate to the quantum couplings via
// |script_g| = |G alpha|.
struct ClassicalCoupling {
  std::vector<Complex> script_g;
  void validate() const;
};

/// Integer-order Bessel function of the first kind, Miller downward
/// recurrence with sum normalization. Good to ~1e-12 for |order| <= 100 in
/// the argument range this module sees.
double bessel_jn(int order, double x);

// Two-electron classical-field amplitude: a product of Bessel functions, so
// the electrons' final momentum states are independent.
Complex classical_amplitude(const ClassicalCoupling& cc, int j_f, int k_f);

// Product probability table over axes "e1","e2" on the given windows.
JointDistribution classical_joint(const ClassicalCoupling& cc, int j_lo, int j_hi, int k_lo, int k_hi);

// Total-variation distance between the quantum electron-electron joint
// distribution (axes "e1","e2") and the classical Bessel product on the same
// windows; off-window mass on both sides enters as one extra bucket.
double classical_limit_distance(const JointDistribution& quantum_e1e2, const ClassicalCoupling& cc);

}  // namespace qpinem

#endif
