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

#ifndef QPINEM_CORE_EVOLUTION_HPP
#define QPINEM_CORE_EVOLUTION_HPP

#include <cstddef>
#include <vector>

#include "core/numeric.hpp"
#include "core/smatrix.hpp"
#include "core/states.hpp"

namespace qpinem {

// Truncated joint basis: photon number n in [0, n_cutoff] and one energy
// index j_mu per electron in [j_min[mu], j_max[mu]]. Cells are addressed
// row-major with the photon index slowest.
struct Box {
  int n_cutoff = 0;
  std::vector<int> j_min;
  std::vector<int> j_max;

  int n_electrons() const { return static_cast<int>(j_min.size()); }
  int width(int mu) const { return j_max[static_cast<std::size_t>(mu)] - j_min[static_cast<std::size_t>(mu)] + 1; }
  std::size_t size() const;
  std::size_t index(int n, const int* j) const;
  void decode(std::size_t idx, int* n, int* j) const;
  void validate() const;
};

// Joint photon-electron amplitude on a Box, with the probability lost to the
// cutoffs accumulated in dropped_mass rather than silently discarded.
struct JointAmplitude {
  Box box;
  std::vector<Complex> amp;
  double dropped_mass = 0.0;

  double norm_sq() const;
};

// Electrons start at j = 0; the photon amplitudes come from a pure state.
JointAmplitude make_initial_state(const std::vector<Complex>& photon_amplitudes, const Box& box);
JointAmplitude make_initial_fock(int n_i, const Box& box);

enum class FactorKind {
  Emit,      // e^{g b_mu a^dag}: electron mu down, photon up
  Absorb,    // e^{g b_mu^dag a}: electron mu up, photon down
  Exchange,  // e^{g b_nu^dag b_mu}: electron mu down, electron nu up
};

struct EvolveControl {
  SeriesControl series;
  double dropped_budget = 1e-6;
  // When false, series terms that leave the box are not tallied into
  // dropped_mass and the walk stops at the box edge; scatter uses this and
  // measures the loss as its norm deficit instead.
  bool account_out_of_box = true;
};

// Applies one exponential factor by its Taylor series. `nu` is ignored except
// for Exchange. The coefficient g is the full exponent coefficient, signs and
// halves included.
JointAmplitude apply_exponential(const JointAmplitude& state, FactorKind kind, int mu, int nu,
                                 Complex g, const EvolveControl& ctl);

enum class InteractionMode { Simultaneous, Successive };

// Factor ordering used to expand the simultaneous scattering operator. The
// emit-left ordering is the production path; absorb-left is the equivalent
// ordering kept for cross-checks.
enum class FactorOrdering { EmitLeft, AbsorbLeft };

JointAmplitude scatter(const JointAmplitude& state0, const CouplingSet& c, InteractionMode mode,
                       const EvolveControl& ctl, FactorOrdering ordering = FactorOrdering::EmitLeft);

// Successive interaction with a projective energy measurement of each
// electron right after its own interaction. Returns the mixture as
// probabilities over the box (the coherent and measured protocols give the
// same final energy statistics; this exists as a sensitivity check).
std::vector<double> scatter_successive_measured(const JointAmplitude& state0, const CouplingSet& c,
                                                const EvolveControl& ctl, double* dropped_mass);

// Brute-force validation path: exponentiates the anti-Hermitian generator
//   K = sum_mu (G_mu b_mu^dag a - G_mu^* b_mu a^dag)
// on the truncated basis with an error-controlled Taylor sub-stepping scheme,
// bypassing the factorized ordering entirely. Note the generator fixes a
// different coupling-phase convention than the factorized path; probability
// tables agree, amplitudes agree up to a per-electron phase.
JointAmplitude dense_oracle(const CouplingSet& c, const Box& box, InteractionMode mode,
                            int n_i, std::size_t max_dimension = 400000);

}  // namespace qpinem

#endif
