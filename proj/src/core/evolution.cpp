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

#include "core/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace qpinem {

std::size_t Box::size() const {
  std::size_t s = static_cast<std::size_t>(n_cutoff) + 1;
  for (int mu = 0; mu < n_electrons(); ++mu) s *= static_cast<std::size_t>(width(mu));
  return s;
}

std::size_t Box::index(int n, const int* j) const {
  std::size_t idx = static_cast<std::size_t>(n);
  for (int mu = 0; mu < n_electrons(); ++mu) {
    idx = idx * static_cast<std::size_t>(width(mu)) +
          static_cast<std::size_t>(j[mu] - j_min[static_cast<std::size_t>(mu)]);
  }
  return idx;
}

void Box::decode(std::size_t idx, int* n, int* j) const {
  for (int mu = n_electrons() - 1; mu >= 0; --mu) {
    std::size_t w = static_cast<std::size_t>(width(mu));
    j[mu] = static_cast<int>(idx % w) + j_min[static_cast<std::size_t>(mu)];
    idx /= w;
  }
  *n = static_cast<int>(idx);
}

void Box::validate() const {
  if (n_cutoff < 0) throw Error(ErrorCode::InvalidArgument, "Box: n_cutoff must be >= 0");
  if (j_min.size() != j_max.size() || j_min.empty()) {
    throw Error(ErrorCode::InvalidArgument, "Box: inconsistent electron windows");
  }
  for (int mu = 0; mu < n_electrons(); ++mu) {
    if (j_min[static_cast<std::size_t>(mu)] > 0 || j_max[static_cast<std::size_t>(mu)] < 0) {
      throw Error(ErrorCode::InvalidArgument, "Box: electron window must contain j = 0");
    }
  }
}

double JointAmplitude::norm_sq() const {
  KahanSum s;
  for (const Complex& a : amp) s.add(std::norm(a));
  return s.value();
}

JointAmplitude make_initial_state(const std::vector<Complex>& photon_amplitudes, const Box& box) {
  box.validate();
  if (static_cast<int>(photon_amplitudes.size()) > box.n_cutoff + 1) {
    throw Error(ErrorCode::CutoffTooSmall, "make_initial_state: photon state exceeds box cutoff");
  }
  JointAmplitude st;
  st.box = box;
  st.amp.assign(box.size(), Complex(0.0, 0.0));
  std::vector<int> j(static_cast<std::size_t>(box.n_electrons()), 0);
  for (std::size_t n = 0; n < photon_amplitudes.size(); ++n) {
    st.amp[box.index(static_cast<int>(n), j.data())] = photon_amplitudes[n];
  }
  return st;
}

JointAmplitude make_initial_fock(int n_i, const Box& box) {
  if (n_i < 0 || n_i > box.n_cutoff) {
    throw Error(ErrorCode::InvalidArgument, "make_initial_fock: n_i outside box");
  }
  std::vector<Complex> photon(static_cast<std::size_t>(n_i) + 1, Complex(0.0, 0.0));
  photon[static_cast<std::size_t>(n_i)] = Complex(1.0, 0.0);
  return make_initial_state(photon, box);
}

namespace {

struct Strides {
  std::size_t n_stride;
  std::vector<std::size_t> j_stride;
};

Strides make_strides(const Box& box) {
  Strides s;
  s.j_stride.assign(static_cast<std::size_t>(box.n_electrons()), 1);
  std::size_t acc = 1;
  for (int mu = box.n_electrons() - 1; mu >= 0; --mu) {
    s.j_stride[static_cast<std::size_t>(mu)] = acc;
    acc *= static_cast<std::size_t>(box.width(mu));
  }
  s.n_stride = acc;
  return s;
}

}  // namespace

JointAmplitude apply_exponential(const JointAmplitude& state, FactorKind kind, int mu, int nu,
                                 Complex g, const EvolveControl& ctl) {
  const Box& box = state.box;
  const int n_el = box.n_electrons();
  if (mu < 0 || mu >= n_el || (kind == FactorKind::Exchange && (nu < 0 || nu >= n_el || nu == mu))) {
    throw Error(ErrorCode::InvalidArgument, "apply_exponential: bad electron index");
  }

  JointAmplitude out;
  out.box = box;
  out.dropped_mass = state.dropped_mass;
  if (g == Complex(0.0, 0.0)) {
    out.amp = state.amp;
    return out;
  }
  out.amp.assign(box.size(), Complex(0.0, 0.0));

  Strides st = make_strides(box);
  const std::size_t mu_stride = st.j_stride[static_cast<std::size_t>(mu)];
  const std::size_t nu_stride = kind == FactorKind::Exchange
                                    ? st.j_stride[static_cast<std::size_t>(nu)]
                                    : 0;
  // Per series step the flat index moves by a constant signed offset.
  std::ptrdiff_t delta = 0;
  switch (kind) {
    case FactorKind::Emit:
      delta = static_cast<std::ptrdiff_t>(st.n_stride) - static_cast<std::ptrdiff_t>(mu_stride);
      break;
    case FactorKind::Absorb:
      delta = -static_cast<std::ptrdiff_t>(st.n_stride) + static_cast<std::ptrdiff_t>(mu_stride);
      break;
    case FactorKind::Exchange:
      delta = -static_cast<std::ptrdiff_t>(mu_stride) + static_cast<std::ptrdiff_t>(nu_stride);
      break;
  }

  const double tol = ctl.series.term_tol;
  const int max_index = ctl.series.max_index;
  const std::size_t w_mu = static_cast<std::size_t>(box.width(mu));
  const std::size_t w_nu = kind == FactorKind::Exchange ? static_cast<std::size_t>(box.width(nu)) : 1;
  KahanSum dropped;

  const std::size_t total = box.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    const Complex c = state.amp[idx];
    if (c == Complex(0.0, 0.0)) continue;
    const int n = static_cast<int>(idx / st.n_stride);
    // offsets of j_mu (and j_nu) from the window lower edge
    const std::size_t mu_off = (idx / mu_stride) % w_mu;
    const std::size_t nu_off = kind == FactorKind::Exchange ? (idx / nu_stride) % w_nu : 0;

    out.amp[idx] += c;  // q = 0 term
    const double c_mag = std::abs(c);
    Complex factor(1.0, 0.0);
    double prev = 1.0;
    for (int q = 1;; ++q) {
      bool in_box = true;
      switch (kind) {
        case FactorKind::Emit:
          factor *= g * std::sqrt(static_cast<double>(n + q)) / static_cast<double>(q);
          in_box = (n + q <= box.n_cutoff) && (mu_off >= static_cast<std::size_t>(q));
          break;
        case FactorKind::Absorb:
          if (q > n) { factor = Complex(0.0, 0.0); break; }
          factor *= g * std::sqrt(static_cast<double>(n - q + 1)) / static_cast<double>(q);
          in_box = (mu_off + static_cast<std::size_t>(q) < w_mu);
          break;
        case FactorKind::Exchange:
          factor *= g / static_cast<double>(q);
          in_box = (mu_off >= static_cast<std::size_t>(q)) &&
                   (nu_off + static_cast<std::size_t>(q) < w_nu);
          break;
      }
      double mag = std::abs(factor);
      if (mag == 0.0) break;
      // absolute cut: the term's contribution, not its size relative to the
      // factor peak, is what a normalized state can afford to lose
      if (c_mag * mag < tol && mag < prev) break;
      if (q > max_index) {
        throw Error(ErrorCode::SeriesNotConverged,
                    "apply_exponential: factor series not below term_tol by max_index");
      }
      prev = mag;
      if (in_box) {
        out.amp[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) + q * delta)] +=
            c * factor;
      } else if (ctl.account_out_of_box) {
        dropped.add(std::norm(c * factor));
      } else {
        break;  // targets move monotonically; once outside, always outside
      }
    }
  }

  out.dropped_mass += dropped.value();
  if (out.dropped_mass > ctl.dropped_budget) {
    throw Error(ErrorCode::CutoffBudgetExceeded,
                "apply_exponential: dropped mass " + std::to_string(out.dropped_mass) +
                    " exceeds budget " + std::to_string(ctl.dropped_budget));
  }
  return out;
}

namespace {

void scale_state(JointAmplitude& st, double factor) {
  for (Complex& a : st.amp) a *= factor;
}

// Inside a unitary composition the per-factor dropped-term bookkeeping is
// meaningless (the factors are individually non-unitary), so the factors run
// with an unlimited budget and the composition measures what was actually
// lost as its norm deficit.
EvolveControl unlimited(const EvolveControl& ctl) {
  EvolveControl relaxed = ctl;
  relaxed.dropped_budget = std::numeric_limits<double>::infinity();
  relaxed.account_out_of_box = false;
  return relaxed;
}

void enforce_budget(const JointAmplitude& st, const EvolveControl& ctl, const char* where) {
  if (st.dropped_mass > ctl.dropped_budget) {
    throw Error(ErrorCode::CutoffBudgetExceeded,
                std::string(where) + ": dropped mass " + std::to_string(st.dropped_mass) +
                    " exceeds budget " + std::to_string(ctl.dropped_budget));
  }
}

JointAmplitude scatter_simultaneous(const JointAmplitude& state0, const CouplingSet& c,
                                    const EvolveControl& ctl_in, FactorOrdering ordering) {
  const int n_el = c.n_electrons();
  double sum_x = 0.0;
  for (const Complex& g : c.g) sum_x += std::norm(g);
  const EvolveControl ctl = unlimited(ctl_in);
  const double norm_before = state0.norm_sq();

  JointAmplitude st = state0;
  if (ordering == FactorOrdering::EmitLeft) {
    // S = e^{-sum|G|^2/2} [emit] [exchange, minus-sign coefficients] [absorb]
    scale_state(st, std::exp(-0.5 * sum_x));
    for (int mu = n_el - 1; mu >= 0; --mu) {
      st = apply_exponential(st, FactorKind::Absorb, mu, -1,
                             -std::conj(c.g[static_cast<std::size_t>(mu)]), ctl);
    }
    for (int a = 0; a < n_el; ++a) {
      for (int b = a + 1; b < n_el; ++b) {
        Complex ga = c.g[static_cast<std::size_t>(a)];
        Complex gb = c.g[static_cast<std::size_t>(b)];
        st = apply_exponential(st, FactorKind::Exchange, b, a, -0.5 * std::conj(ga) * gb, ctl);
        st = apply_exponential(st, FactorKind::Exchange, a, b, -0.5 * ga * std::conj(gb), ctl);
      }
    }
    for (int mu = n_el - 1; mu >= 0; --mu) {
      st = apply_exponential(st, FactorKind::Emit, mu, -1, c.g[static_cast<std::size_t>(mu)], ctl);
    }
  } else {
    // S = e^{+sum|G|^2/2} [absorb] [emit] [exchange, plus-sign coefficients]
    for (int a = 0; a < n_el; ++a) {
      for (int b = a + 1; b < n_el; ++b) {
        Complex ga = c.g[static_cast<std::size_t>(a)];
        Complex gb = c.g[static_cast<std::size_t>(b)];
        st = apply_exponential(st, FactorKind::Exchange, b, a, 0.5 * std::conj(ga) * gb, ctl);
        st = apply_exponential(st, FactorKind::Exchange, a, b, 0.5 * ga * std::conj(gb), ctl);
      }
    }
    for (int mu = n_el - 1; mu >= 0; --mu) {
      st = apply_exponential(st, FactorKind::Emit, mu, -1, c.g[static_cast<std::size_t>(mu)], ctl);
    }
    for (int mu = 0; mu < n_el; ++mu) {
      st = apply_exponential(st, FactorKind::Absorb, mu, -1,
                             -std::conj(c.g[static_cast<std::size_t>(mu)]), ctl);
    }
    scale_state(st, std::exp(0.5 * sum_x));
  }
  st.dropped_mass = state0.dropped_mass + std::abs(norm_before - st.norm_sq());
  enforce_budget(st, ctl_in, "scatter");
  return st;
}

JointAmplitude single_electron_pass(const JointAmplitude& state, int mu, Complex g,
                                    const EvolveControl& ctl_in) {
  const EvolveControl ctl = unlimited(ctl_in);
  const double norm_before = state.norm_sq();
  JointAmplitude st = state;
  scale_state(st, std::exp(-0.5 * std::norm(g)));
  st = apply_exponential(st, FactorKind::Absorb, mu, -1, -std::conj(g), ctl);
  st = apply_exponential(st, FactorKind::Emit, mu, -1, g, ctl);
  st.dropped_mass = state.dropped_mass + std::abs(norm_before - st.norm_sq());
  return st;
}

}  // namespace

JointAmplitude scatter(const JointAmplitude& state0, const CouplingSet& c, InteractionMode mode,
                       const EvolveControl& ctl, FactorOrdering ordering) {
  c.validate();
  if (c.n_electrons() != state0.box.n_electrons()) {
    throw Error(ErrorCode::InvalidArgument, "scatter: coupling count != electron count");
  }
  if (mode == InteractionMode::Simultaneous) {
    return scatter_simultaneous(state0, c, ctl, ordering);
  }
  JointAmplitude st = state0;
  for (int mu = 0; mu < c.n_electrons(); ++mu) {
    st = single_electron_pass(st, mu, c.g[static_cast<std::size_t>(mu)], ctl);
  }
  enforce_budget(st, ctl, "scatter");
  return st;
}

std::vector<double> scatter_successive_measured(const JointAmplitude& state0, const CouplingSet& c,
                                                const EvolveControl& ctl, double* dropped_mass) {
  c.validate();
  const Box& box = state0.box;
  const int n_el = c.n_electrons();
  if (n_el != box.n_electrons()) {
    throw Error(ErrorCode::InvalidArgument, "scatter_successive_measured: coupling count mismatch");
  }
  Strides st = make_strides(box);

  std::vector<JointAmplitude> branches{state0};
  double dropped = state0.dropped_mass;
  constexpr std::size_t kMaxBranches = 20000;

  for (int mu = 0; mu < n_el; ++mu) {
    std::vector<JointAmplitude> next;
    for (JointAmplitude& br : branches) {
      double before = br.dropped_mass;
      JointAmplitude evolved = single_electron_pass(br, mu, c.g[static_cast<std::size_t>(mu)], ctl);
      dropped += evolved.dropped_mass - before;
      if (mu == n_el - 1) {
        next.push_back(std::move(evolved));
        continue;
      }
      // Project onto each measured j_mu outcome; zero-probability branches die.
      const std::size_t w_mu = static_cast<std::size_t>(box.width(mu));
      const std::size_t mu_stride = st.j_stride[static_cast<std::size_t>(mu)];
      for (std::size_t off = 0; off < w_mu; ++off) {
        JointAmplitude proj;
        proj.box = box;
        proj.dropped_mass = 0.0;
        proj.amp.assign(box.size(), Complex(0.0, 0.0));
        bool any = false;
        for (std::size_t idx = 0; idx < evolved.amp.size(); ++idx) {
          if ((idx / mu_stride) % w_mu != off) continue;
          if (evolved.amp[idx] != Complex(0.0, 0.0)) {
            proj.amp[idx] = evolved.amp[idx];
            any = true;
          }
        }
        if (any) next.push_back(std::move(proj));
        if (next.size() > kMaxBranches) {
          throw Error(ErrorCode::DimensionTooLarge,
                      "scatter_successive_measured: too many measurement branches");
        }
      }
    }
    branches = std::move(next);
  }

  std::vector<double> probs(box.size(), 0.0);
  for (const JointAmplitude& br : branches) {
    for (std::size_t idx = 0; idx < br.amp.size(); ++idx) {
      probs[idx] += std::norm(br.amp[idx]);
    }
  }
  if (dropped > ctl.dropped_budget) {
    throw Error(ErrorCode::CutoffBudgetExceeded,
                "scatter_successive_measured: dropped mass " + std::to_string(dropped) +
                    " exceeds budget " + std::to_string(ctl.dropped_budget));
  }
  if (dropped_mass != nullptr) *dropped_mass = dropped;
  return probs;
}

namespace {

// y += K x for K = sum over the given electrons of
// g_mu b_mu^dag a - g_mu^* b_mu a^dag, truncated to the box (which keeps K
// anti-Hermitian, so the sub-stepped exponential is unitary on the box).
void apply_generator(const Box& box, const Strides& st,
                     const std::vector<std::pair<int, Complex>>& electrons, double inv_steps,
                     const std::vector<Complex>& x, std::vector<Complex>& y) {
  std::fill(y.begin(), y.end(), Complex(0.0, 0.0));
  const std::size_t total = x.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    const Complex v = x[idx];
    if (v == Complex(0.0, 0.0)) continue;
    const int n = static_cast<int>(idx / st.n_stride);
    for (const auto& [mu, g] : electrons) {
      const std::size_t mu_stride = st.j_stride[static_cast<std::size_t>(mu)];
      const std::size_t w_mu = static_cast<std::size_t>(box.width(mu));
      const std::size_t mu_off = (idx / mu_stride) % w_mu;
      // b_mu^dag a: photon down, electron up
      if (n >= 1 && mu_off + 1 < w_mu) {
        y[idx - st.n_stride + mu_stride] +=
            g * (std::sqrt(static_cast<double>(n)) * inv_steps) * v;
      }
      // -g^* b_mu a^dag: photon up, electron down
      if (n + 1 <= box.n_cutoff && mu_off >= 1) {
        y[idx + st.n_stride - mu_stride] -=
            std::conj(g) * (std::sqrt(static_cast<double>(n + 1)) * inv_steps) * v;
      }
    }
  }
}

double norm_sq_of(const std::vector<Complex>& v) {
  KahanSum s;
  for (const Complex& a : v) s.add(std::norm(a));
  return s.value();
}

void expm_apply(const Box& box, const std::vector<std::pair<int, Complex>>& electrons,
                std::vector<Complex>& v) {
  Strides st = make_strides(box);
  double coupling_sum = 0.0;
  for (const auto& [mu, g] : electrons) coupling_sum += std::abs(g);
  double norm_bound = 2.0 * coupling_sum * std::sqrt(static_cast<double>(box.n_cutoff) + 1.0);
  int steps = std::max(1, static_cast<int>(std::ceil(norm_bound / 4.0)));
  double inv_steps = 1.0 / static_cast<double>(steps);

  std::vector<Complex> term(v.size());
  std::vector<Complex> scratch(v.size());
  constexpr int kMaxTaylor = 120;
  for (int step = 0; step < steps; ++step) {
    term = v;
    double target = 1e-30 * norm_sq_of(v);
    for (int k = 1;; ++k) {
      if (k > kMaxTaylor) {
        throw Error(ErrorCode::SeriesNotConverged, "dense_oracle: Taylor series stalled");
      }
      apply_generator(box, st, electrons, inv_steps, term, scratch);
      const double inv_k = 1.0 / static_cast<double>(k);
      for (std::size_t i = 0; i < term.size(); ++i) {
        term[i] = scratch[i] * inv_k;
        v[i] += term[i];
      }
      if (norm_sq_of(term) < target) break;
    }
  }
}

}  // namespace

JointAmplitude dense_oracle(const CouplingSet& c, const Box& box, InteractionMode mode,
                            int n_i, std::size_t max_dimension) {
  c.validate();
  box.validate();
  if (c.n_electrons() != box.n_electrons()) {
    throw Error(ErrorCode::InvalidArgument, "dense_oracle: coupling count != electron count");
  }
  if (box.size() > max_dimension) {
    throw Error(ErrorCode::DimensionTooLarge,
                "dense_oracle: basis has " + std::to_string(box.size()) +
                    " states, above the limit of " + std::to_string(max_dimension));
  }
  JointAmplitude st = make_initial_fock(n_i, box);
  if (mode == InteractionMode::Simultaneous) {
    std::vector<std::pair<int, Complex>> electrons;
    for (int mu = 0; mu < c.n_electrons(); ++mu) {
      electrons.emplace_back(mu, c.g[static_cast<std::size_t>(mu)]);
    }
    expm_apply(box, electrons, st.amp);
  } else {
    for (int mu = 0; mu < c.n_electrons(); ++mu) {
      std::vector<std::pair<int, Complex>> one{{mu, c.g[static_cast<std::size_t>(mu)]}};
      expm_apply(box, one, st.amp);
    }
  }
  return st;
}

}  // namespace qpinem
