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

#ifndef QPINEM_CORE_SMATRIX_HPP
#define QPINEM_CORE_SMATRIX_HPP

#include <vector>

#include "core/numeric.hpp"

namespace qpinem {

// Per-electron dimensionless couplings G_mu, one entry per electron.
struct CouplingSet {
  std::vector<Complex> g;

  int n_electrons() const { return static_cast<int>(g.size()); }
  void validate() const;  // finite entries, at least one electron
};

// One scattering transition: photon numbers n_i -> n_f and per-electron
// energy gains in photon-energy units. Nonzero elements require
// dn + dj + dk = 0.
struct TransitionLabel {
  int n_i = 0;
  int n_f = 0;
  int dj = 0;
  int dk = 0;

  int dn() const { return n_f - n_i; }
  bool conserves_energy() const { return dn() + dj + dk == 0; }
};

enum class Arithmetic { LogGammaFloat, ExactRational };

struct SeriesControl {
  double term_tol = 1e-14;  // relative magnitude at which series tails are cut
  int max_index = 200;      // hard cap per unbounded summation index
  Arithmetic arithmetic = Arithmetic::LogGammaFloat;
};

// Two-electron S-matrix element, emit-left operator ordering. All summation
// indices except one are bounded, which makes this the production evaluator.
Complex element_two_electron(const CouplingSet& c, const TransitionLabel& t,
                             const SeriesControl& ctl = {});

// Same element evaluated from the absorb-left ordering, where three indices
// are unbounded. Kept as an independent cross-check of the production form.
Complex element_two_electron_altorder(const CouplingSet& c, const TransitionLabel& t,
                                      const SeriesControl& ctl = {});

// Single-electron element; the electron energy change is fixed by
// dj = -(n_f - n_i).
Complex element_single_electron(Complex g, int n_i, int n_f,
                                const SeriesControl& ctl = {});

}  // namespace qpinem

#endif
