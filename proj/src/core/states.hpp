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

#ifndef QPINEM_CORE_STATES_HPP
#define QPINEM_CORE_STATES_HPP

#include <vector>

#include "core/numeric.hpp"

namespace qpinem {

enum class StateKind { Fock, Coherent, Thermal };

// Initial photon-mode state truncated to the number basis [0, n_cutoff].
// Fock and coherent states are pure and carry amplitudes; thermal states are
// mixed and carry number-basis probabilities only. The mass lost to the
// cutoff is recorded in truncation_deficit, never silently dropped.
struct PhotonState {
  StateKind kind = StateKind::Fock;
  std::vector<Complex> amplitudes;     // pure states, index = n
  std::vector<double> probabilities;   // mixed (thermal)
  int n_cutoff = 0;
  double n_avg_requested = 0.0;
  double truncation_deficit = 0.0;

  bool mixed() const { return kind == StateKind::Thermal; }
  double prob(int n) const;
  double retained_mass() const;
  double mean() const;
  double variance() const;
};

/// Photon number eigenstate |n_i>.
PhotonState make_fock(int n_i, int n_cutoff = -1);

/// Coherent state with Poissonian number statistics, alpha = sqrt(n_avg)
/// real-positive by convention. n_cutoff = -1 picks a cutoff that retains at
/// least 1 - truncation_tol of the mass; an explicit cutoff that retains less
/// raises CutoffTooSmall.
PhotonState make_coherent(double n_avg, int n_cutoff = -1, double truncation_tol = 1e-10);

/// Thermal (mixed) state with geometric number statistics.
PhotonState make_thermal(double n_avg, int n_cutoff = -1, double truncation_tol = 1e-10);

}  // namespace qpinem

#endif
