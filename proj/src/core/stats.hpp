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

#ifndef QPINEM_CORE_STATS_HPP
#define QPINEM_CORE_STATS_HPP

#include <map>
#include <string>
#include <vector>

#include "core/evolution.hpp"
#include "core/numeric.hpp"

namespace qpinem {

struct Axis {
  std::string name;
  int lo = 0;
  int hi = 0;
  int size() const { return hi - lo + 1; }
};

// Dense probability table over named integer axes, row-major in axis order.
struct JointDistribution {
  std::vector<Axis> axes;
  std::vector<double> table;
  double total_mass = 0.0;

  std::size_t size() const;
  std::size_t flat_index(const std::vector<int>& values) const;  // axis values, not offsets
  double& at(const std::vector<int>& values);
  double value_or_zero(const std::vector<int>& values) const;
  int axis_index(const std::string& name) const;  // throws UnknownAxis
  double recompute_mass() const;
};

// Born rule: entry = |amplitude|^2. Axes are "photon" (final photon number)
// followed by "e1".."eN" (energy gain relative to the initial index, which is
// 0 by construction).
JointDistribution to_distribution(const JointAmplitude& state);
JointDistribution distribution_from_probabilities(const std::vector<double>& probs, const Box& box);

/// Sums out every axis not named in `keep`; kept axes stay in table order.
JointDistribution marginalize(const JointDistribution& d, const std::vector<std::string>& keep);

struct PccResult {
  double value = 0.0;  // meaningful only when defined
  bool defined = false;
  double variance_a = 0.0;
  double variance_b = 0.0;
};

// Pearson correlation of the two integer axis variables under d. Degenerate
// (near-zero variance) axes yield defined = false rather than a fake 0.
PccResult pcc(const JointDistribution& d, const std::string& axis_a, const std::string& axis_b,
              double degenerate_tol = 1e-18);

struct PostSelectResult {
  JointDistribution dist;          // conditional over the remaining axes
  double success_probability = 0;  // mass of the selected slice before renormalizing
};

PostSelectResult post_select(const JointDistribution& d, const std::map<std::string, int>& constraints);

void normalize(JointDistribution& d);

/// 0.5 * sum |p - q| over identical axes (no tail handling).
double tv_distance(const JointDistribution& a, const JointDistribution& b);

// File formats; field names documented in the README and kept stable.
void write_csv(const JointDistribution& d, const std::string& path);
std::string distribution_to_json_text(const JointDistribution& d, const std::string& metadata_json);
void write_json(const JointDistribution& d, const std::string& path, const std::string& metadata_json);
JointDistribution read_json(const std::string& path);

}  // namespace qpinem

#endif
