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

#include "core/stats.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "core/error.hpp"

namespace qpinem {

using nlohmann::json;

std::size_t JointDistribution::size() const {
  std::size_t s = 1;
  for (const Axis& a : axes) s *= static_cast<std::size_t>(a.size());
  return s;
}

std::size_t JointDistribution::flat_index(const std::vector<int>& values) const {
  if (values.size() != axes.size()) {
    throw Error(ErrorCode::InvalidArgument, "JointDistribution: coordinate arity mismatch");
  }
  std::size_t idx = 0;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (values[i] < axes[i].lo || values[i] > axes[i].hi) {
      throw Error(ErrorCode::InvalidArgument, "JointDistribution: coordinate out of range");
    }
    idx = idx * static_cast<std::size_t>(axes[i].size()) +
          static_cast<std::size_t>(values[i] - axes[i].lo);
  }
  return idx;
}

double& JointDistribution::at(const std::vector<int>& values) { return table[flat_index(values)]; }

double JointDistribution::value_or_zero(const std::vector<int>& values) const {
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (values[i] < axes[i].lo || values[i] > axes[i].hi) return 0.0;
  }
  return table[flat_index(values)];
}

int JointDistribution::axis_index(const std::string& name) const {
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (axes[i].name == name) return static_cast<int>(i);
  }
  throw Error(ErrorCode::UnknownAxis, "unknown axis: " + name);
}

double JointDistribution::recompute_mass() const {
  KahanSum s;
  for (double p : table) s.add(p);
  return s.value();
}

namespace {

std::vector<Axis> axes_from_box(const Box& box) {
  std::vector<Axis> axes;
  axes.push_back({"photon", 0, box.n_cutoff});
  for (int mu = 0; mu < box.n_electrons(); ++mu) {
    axes.push_back({"e" + std::to_string(mu + 1), box.j_min[static_cast<std::size_t>(mu)],
                    box.j_max[static_cast<std::size_t>(mu)]});
  }
  return axes;
}

}  // namespace

JointDistribution to_distribution(const JointAmplitude& state) {
  JointDistribution d;
  d.axes = axes_from_box(state.box);
  d.table.resize(state.amp.size());
  KahanSum mass;
  for (std::size_t i = 0; i < state.amp.size(); ++i) {
    d.table[i] = std::norm(state.amp[i]);
    mass.add(d.table[i]);
  }
  d.total_mass = mass.value();
  return d;
}

JointDistribution distribution_from_probabilities(const std::vector<double>& probs, const Box& box) {
  if (probs.size() != box.size()) {
    throw Error(ErrorCode::InvalidArgument, "distribution_from_probabilities: size mismatch");
  }
  JointDistribution d;
  d.axes = axes_from_box(box);
  d.table = probs;
  d.total_mass = d.recompute_mass();
  return d;
}

JointDistribution marginalize(const JointDistribution& d, const std::vector<std::string>& keep) {
  std::vector<bool> keep_mask(d.axes.size(), false);
  for (const std::string& name : keep) {
    keep_mask[static_cast<std::size_t>(d.axis_index(name))] = true;
  }
  JointDistribution out;
  for (std::size_t i = 0; i < d.axes.size(); ++i) {
    if (keep_mask[i]) out.axes.push_back(d.axes[i]);
  }
  out.table.assign(out.size(), 0.0);

  std::vector<int> coord(d.axes.size(), 0);
  const std::size_t total = d.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    // decode idx into per-axis offsets
    std::size_t rest = idx;
    for (std::size_t i = d.axes.size(); i-- > 0;) {
      coord[i] = static_cast<int>(rest % static_cast<std::size_t>(d.axes[i].size()));
      rest /= static_cast<std::size_t>(d.axes[i].size());
    }
    std::size_t out_idx = 0;
    for (std::size_t i = 0; i < d.axes.size(); ++i) {
      if (keep_mask[i]) {
        out_idx = out_idx * static_cast<std::size_t>(d.axes[i].size()) +
                  static_cast<std::size_t>(coord[i]);
      }
    }
    out.table[out_idx] += d.table[idx];
  }
  out.total_mass = out.recompute_mass();
  return out;
}

PccResult pcc(const JointDistribution& d, const std::string& axis_a, const std::string& axis_b,
              double degenerate_tol) {
  const std::size_t ia = static_cast<std::size_t>(d.axis_index(axis_a));
  const std::size_t ib = static_cast<std::size_t>(d.axis_index(axis_b));
  const std::size_t total = d.size();

  double mass = d.recompute_mass();
  if (mass <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "pcc: empty distribution");
  }

  std::vector<int> coord(d.axes.size(), 0);
  auto decode = [&](std::size_t idx) {
    std::size_t rest = idx;
    for (std::size_t i = d.axes.size(); i-- > 0;) {
      coord[i] = d.axes[i].lo + static_cast<int>(rest % static_cast<std::size_t>(d.axes[i].size()));
      rest /= static_cast<std::size_t>(d.axes[i].size());
    }
  };

  KahanSum mean_a_acc, mean_b_acc;
  for (std::size_t idx = 0; idx < total; ++idx) {
    double p = d.table[idx];
    if (p == 0.0) continue;
    decode(idx);
    mean_a_acc.add(p * coord[ia]);
    mean_b_acc.add(p * coord[ib]);
  }
  const double mean_a = mean_a_acc.value() / mass;
  const double mean_b = mean_b_acc.value() / mass;

  KahanSum var_a_acc, var_b_acc, cov_acc;
  for (std::size_t idx = 0; idx < total; ++idx) {
    double p = d.table[idx];
    if (p == 0.0) continue;
    decode(idx);
    const double da = coord[ia] - mean_a;
    const double db = coord[ib] - mean_b;
    var_a_acc.add(p * da * da);
    var_b_acc.add(p * db * db);
    cov_acc.add(p * da * db);
  }
  PccResult res;
  res.variance_a = var_a_acc.value() / mass;
  res.variance_b = var_b_acc.value() / mass;
  if (res.variance_a < degenerate_tol || res.variance_b < degenerate_tol) {
    res.defined = false;
    res.value = std::numeric_limits<double>::quiet_NaN();
    return res;
  }
  res.defined = true;
  res.value = (cov_acc.value() / mass) / std::sqrt(res.variance_a * res.variance_b);
  return res;
}

PostSelectResult post_select(const JointDistribution& d,
                             const std::map<std::string, int>& constraints) {
  std::vector<int> fixed(d.axes.size(), INT32_MIN);
  for (const auto& [name, value] : constraints) {
    int i = d.axis_index(name);
    if (value < d.axes[static_cast<std::size_t>(i)].lo ||
        value > d.axes[static_cast<std::size_t>(i)].hi) {
      throw Error(ErrorCode::EmptySlice,
                  "post_select: value " + std::to_string(value) + " outside axis " + name);
    }
    fixed[static_cast<std::size_t>(i)] = value;
  }

  PostSelectResult res;
  for (std::size_t i = 0; i < d.axes.size(); ++i) {
    if (fixed[i] == INT32_MIN) res.dist.axes.push_back(d.axes[i]);
  }
  if (res.dist.axes.size() == d.axes.size()) {
    throw Error(ErrorCode::InvalidArgument, "post_select: no constraints given");
  }
  res.dist.table.assign(res.dist.size(), 0.0);

  std::vector<int> coord(d.axes.size(), 0);
  const std::size_t total = d.size();
  KahanSum slice_mass;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    bool match = true;
    std::size_t out_idx = 0;
    for (std::size_t i = d.axes.size(); i-- > 0;) {
      coord[i] = d.axes[i].lo + static_cast<int>(rest % static_cast<std::size_t>(d.axes[i].size()));
      rest /= static_cast<std::size_t>(d.axes[i].size());
    }
    for (std::size_t i = 0; i < d.axes.size(); ++i) {
      if (fixed[i] != INT32_MIN && coord[i] != fixed[i]) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    for (std::size_t i = 0; i < d.axes.size(); ++i) {
      if (fixed[i] == INT32_MIN) {
        out_idx = out_idx * static_cast<std::size_t>(d.axes[i].size()) +
                  static_cast<std::size_t>(coord[i] - d.axes[i].lo);
      }
    }
    res.dist.table[out_idx] += d.table[idx];
    slice_mass.add(d.table[idx]);
  }

  res.success_probability = slice_mass.value();
  if (res.success_probability <= 0.0) {
    throw Error(ErrorCode::EmptySlice, "post_select: selected slice has zero probability");
  }
  const double inv = 1.0 / res.success_probability;
  for (double& p : res.dist.table) p *= inv;
  res.dist.total_mass = res.dist.recompute_mass();
  return res;
}

void normalize(JointDistribution& d) {
  double mass = d.recompute_mass();
  if (mass <= 0.0) throw Error(ErrorCode::InvalidArgument, "normalize: empty distribution");
  for (double& p : d.table) p /= mass;
  d.total_mass = d.recompute_mass();
}

double tv_distance(const JointDistribution& a, const JointDistribution& b) {
  if (a.axes.size() != b.axes.size() || a.size() != b.size()) {
    throw Error(ErrorCode::InvalidArgument, "tv_distance: incompatible axes");
  }
  for (std::size_t i = 0; i < a.axes.size(); ++i) {
    if (a.axes[i].lo != b.axes[i].lo || a.axes[i].hi != b.axes[i].hi) {
      throw Error(ErrorCode::InvalidArgument, "tv_distance: incompatible axis ranges");
    }
  }
  KahanSum s;
  for (std::size_t i = 0; i < a.table.size(); ++i) {
    s.add(std::abs(a.table[i] - b.table[i]));
  }
  return 0.5 * s.value();
}

void write_csv(const JointDistribution& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot open for writing: " + path);
  for (std::size_t i = 0; i < d.axes.size(); ++i) {
    out << d.axes[i].name << ",";
  }
  out << "probability\n";
  std::vector<int> coord(d.axes.size(), 0);
  char buf[64];
  const std::size_t total = d.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (d.table[idx] == 0.0) continue;
    std::size_t rest = idx;
    for (std::size_t i = d.axes.size(); i-- > 0;) {
      coord[i] = d.axes[i].lo + static_cast<int>(rest % static_cast<std::size_t>(d.axes[i].size()));
      rest /= static_cast<std::size_t>(d.axes[i].size());
    }
    for (std::size_t i = 0; i < d.axes.size(); ++i) {
      out << coord[i] << ",";
    }
    std::snprintf(buf, sizeof buf, "%.12g", d.table[idx]);
    out << buf << "\n";
  }
}

std::string distribution_to_json_text(const JointDistribution& d, const std::string& metadata_json) {
  json j;
  j["axes"] = json::array();
  for (const Axis& a : d.axes) {
    j["axes"].push_back({{"name", a.name}, {"min", a.lo}, {"max", a.hi}});
  }
  j["table"] = d.table;  // flattened row-major
  j["total_mass"] = d.total_mass;
  j["metadata"] = metadata_json.empty() ? json::object() : json::parse(metadata_json);
  return j.dump();
}

void write_json(const JointDistribution& d, const std::string& path, const std::string& metadata_json) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot open for writing: " + path);
  out << distribution_to_json_text(d, metadata_json) << "\n";
}

JointDistribution read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open for reading: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("distribution JSON: ") + e.what());
  }
  JointDistribution d;
  try {
    for (const auto& a : j.at("axes")) {
      d.axes.push_back({a.at("name").get<std::string>(), a.at("min").get<int>(),
                        a.at("max").get<int>()});
    }
    d.table = j.at("table").get<std::vector<double>>();
    d.total_mass = j.at("total_mass").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("distribution JSON: ") + e.what());
  }
  if (d.table.size() != d.size()) {
    throw Error(ErrorCode::Parse, "distribution JSON: table length does not match axes");
  }
  return d;
}

}  // namespace qpinem
