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

#include "qpinem/qpinem.h"

#include <string>

#include "core/classical.hpp"
#include "core/error.hpp"
#include "core/runner.hpp"
#include "core/smatrix.hpp"
#include "core/version.hpp"

using namespace qpinem;

struct qpn_scenario {
  ScenarioConfig cfg;
  std::string json;
};

struct qpn_result {
  RunResult run;
};

struct qpn_sweep_result {
  SweepResult sweep;
};

namespace {

thread_local std::string t_last_error;

qpn_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return QPN_ERR_INVALID_ARGUMENT;
    case ErrorCode::Parse: return QPN_ERR_PARSE;
    case ErrorCode::Validation: return QPN_ERR_VALIDATION;
    case ErrorCode::CutoffTooSmall: return QPN_ERR_CUTOFF_TOO_SMALL;
    case ErrorCode::SeriesNotConverged: return QPN_ERR_SERIES_NOT_CONVERGED;
    case ErrorCode::NumericOverflow: return QPN_ERR_NUMERIC_OVERFLOW;
    case ErrorCode::CutoffBudgetExceeded: return QPN_ERR_CUTOFF_BUDGET_EXCEEDED;
    case ErrorCode::DimensionTooLarge: return QPN_ERR_DIMENSION_TOO_LARGE;
    case ErrorCode::UnknownAxis: return QPN_ERR_UNKNOWN_AXIS;
    case ErrorCode::EmptySlice: return QPN_ERR_EMPTY_SLICE;
    case ErrorCode::Io: return QPN_ERR_IO;
    case ErrorCode::Internal: return QPN_ERR_INTERNAL;
  }
  return QPN_ERR_INTERNAL;
}

template <typename Fn>
qpn_status guarded(Fn&& fn) {
  try {
    fn();
    return QPN_OK;
  } catch (const Error& e) {
    t_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return QPN_ERR_INTERNAL;
  } catch (...) {
    t_last_error = "unknown error";
    return QPN_ERR_INTERNAL;
  }
}

}  // namespace

extern "C" {

const char* qpn_version(void) { return QPINEM_VERSION; }

const char* qpn_status_name(qpn_status status) {
  switch (status) {
    case QPN_OK: return "ok";
    case QPN_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case QPN_ERR_PARSE: return "parse";
    case QPN_ERR_VALIDATION: return "validation";
    case QPN_ERR_CUTOFF_TOO_SMALL: return "cutoff_too_small";
    case QPN_ERR_SERIES_NOT_CONVERGED: return "series_not_converged";
    case QPN_ERR_NUMERIC_OVERFLOW: return "numeric_overflow";
    case QPN_ERR_CUTOFF_BUDGET_EXCEEDED: return "cutoff_budget_exceeded";
    case QPN_ERR_DIMENSION_TOO_LARGE: return "dimension_too_large";
    case QPN_ERR_UNKNOWN_AXIS: return "unknown_axis";
    case QPN_ERR_EMPTY_SLICE: return "empty_slice";
    case QPN_ERR_IO: return "io";
    case QPN_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* qpn_last_error(void) { return t_last_error.c_str(); }

qpn_status qpn_scenario_from_json(const char* json_text, qpn_scenario** out) {
  if (json_text == nullptr || out == nullptr) {
    t_last_error = "null argument";
    return QPN_ERR_INVALID_ARGUMENT;
  }
  *out = nullptr;
  return guarded([&]() {
    auto* handle = new qpn_scenario;
    handle->cfg = parse_scenario_text(json_text);
    handle->json = scenario_to_json(handle->cfg);
    *out = handle;
  });
}

qpn_status qpn_scenario_from_file(const char* path, qpn_scenario** out) {
  if (path == nullptr || out == nullptr) {
    t_last_error = "null argument";
    return QPN_ERR_INVALID_ARGUMENT;
  }
  *out = nullptr;
  return guarded([&]() {
    auto* handle = new qpn_scenario;
    handle->cfg = parse_scenario_file(path);
    handle->json = scenario_to_json(handle->cfg);
    *out = handle;
  });
}

qpn_status qpn_scenario_validate(const qpn_scenario* scenario) {
  if (scenario == nullptr) {
    t_last_error = "null scenario";
    return QPN_ERR_INVALID_ARGUMENT;
  }
  return guarded([&]() { validate_scenario(scenario->cfg); });
}

const char* qpn_scenario_json(const qpn_scenario* scenario) {
  return scenario == nullptr ? "" : scenario->json.c_str();
}

void qpn_scenario_free(qpn_scenario* scenario) { delete scenario; }

qpn_status qpn_run(const qpn_scenario* scenario, const char* out_dir, qpn_result** out) {
  if (scenario == nullptr || out == nullptr) {
    t_last_error = "null argument";
    return QPN_ERR_INVALID_ARGUMENT;
  }
  *out = nullptr;
  return guarded([&]() {
    auto* handle = new qpn_result;
    handle->run = run_scenario(scenario->cfg, out_dir == nullptr ? "" : out_dir);
    *out = handle;
  });
}

qpn_status qpn_sweep(const qpn_scenario* scenario, const char* out_dir, qpn_sweep_result** out) {
  if (scenario == nullptr || out == nullptr) {
    t_last_error = "null argument";
    return QPN_ERR_INVALID_ARGUMENT;
  }
  *out = nullptr;
  return guarded([&]() {
    auto* handle = new qpn_sweep_result;
    handle->sweep = run_sweep(scenario->cfg, out_dir == nullptr ? "" : out_dir);
    *out = handle;
  });
}

qpn_status qpn_oracle_check(const qpn_scenario* scenario, double* max_abs_deviation) {
  if (scenario == nullptr || max_abs_deviation == nullptr) {
    t_last_error = "null argument";
    return QPN_ERR_INVALID_ARGUMENT;
  }
  return guarded([&]() { *max_abs_deviation = oracle_check(scenario->cfg); });
}

qpn_status qpn_result_pcc(const qpn_result* result, double* value, int* defined) {
  if (result == nullptr || value == nullptr || defined == nullptr) {
    t_last_error = "null argument";
    return QPN_ERR_INVALID_ARGUMENT;
  }
  *value = result->run.electron_pcc.value;
  *defined = result->run.electron_pcc.defined ? 1 : 0;
  return QPN_OK;
}

qpn_status qpn_result_success_probability(const qpn_result* result, double* value) {
  if (result == nullptr || value == nullptr) {
    t_last_error = "null argument";
    return QPN_ERR_INVALID_ARGUMENT;
  }
  *value = result->run.success_probability;
  return QPN_OK;
}

qpn_status qpn_result_dropped_mass(const qpn_result* result, double* value) {
  if (result == nullptr || value == nullptr) {
    t_last_error = "null argument";
    return QPN_ERR_INVALID_ARGUMENT;
  }
  *value = result->run.truncation.dropped_mass;
  return QPN_OK;
}

const char* qpn_result_manifest_json(const qpn_result* result) {
  return result == nullptr ? "" : result->run.manifest_json.c_str();
}

int qpn_result_file_count(const qpn_result* result) {
  return result == nullptr ? 0 : static_cast<int>(result->run.files.size());
}

const char* qpn_result_file_path(const qpn_result* result, int index) {
  if (result == nullptr || index < 0 ||
      index >= static_cast<int>(result->run.files.size())) {
    return nullptr;
  }
  return result->run.files[static_cast<std::size_t>(index)].c_str();
}

void qpn_result_free(qpn_result* result) { delete result; }

int qpn_sweep_result_point_count(const qpn_sweep_result* result) {
  return result == nullptr ? 0 : static_cast<int>(result->sweep.points.size());
}

qpn_status qpn_sweep_result_point(const qpn_sweep_result* result, int index, const char** mode,
                                  double* coupling_abs, double* photon, double* pcc, int* defined,
                                  const char** error) {
  if (result == nullptr || index < 0 ||
      index >= static_cast<int>(result->sweep.points.size())) {
    t_last_error = "sweep point index out of range";
    return QPN_ERR_INVALID_ARGUMENT;
  }
  const SweepPoint& pt = result->sweep.points[static_cast<std::size_t>(index)];
  if (mode != nullptr) *mode = pt.mode.c_str();
  if (coupling_abs != nullptr) *coupling_abs = pt.coupling;
  if (photon != nullptr) *photon = pt.photon;
  if (pcc != nullptr) *pcc = pt.pcc.value;
  if (defined != nullptr) *defined = pt.pcc.defined ? 1 : 0;
  if (error != nullptr) *error = pt.error.c_str();
  return QPN_OK;
}

const char* qpn_sweep_result_manifest_json(const qpn_sweep_result* result) {
  return result == nullptr ? "" : result->sweep.manifest_json.c_str();
}

void qpn_sweep_result_free(qpn_sweep_result* result) { delete result; }

qpn_status qpn_element_two_electron(double g1_re, double g1_im, double g2_re, double g2_im,
                                    int n_i, int n_f, int dj, int dk, double* out_re,
                                    double* out_im) {
  if (out_re == nullptr || out_im == nullptr) {
    t_last_error = "null output";
    return QPN_ERR_INVALID_ARGUMENT;
  }
  return guarded([&]() {
    CouplingSet c{{Complex(g1_re, g1_im), Complex(g2_re, g2_im)}};
    Complex s = element_two_electron(c, {n_i, n_f, dj, dk});
    *out_re = s.real();
    *out_im = s.imag();
  });
}

qpn_status qpn_element_single_electron(double g_re, double g_im, int n_i, int n_f,
                                       double* out_re, double* out_im) {
  if (out_re == nullptr || out_im == nullptr) {
    t_last_error = "null output";
    return QPN_ERR_INVALID_ARGUMENT;
  }
  return guarded([&]() {
    Complex s = element_single_electron(Complex(g_re, g_im), n_i, n_f);
    *out_re = s.real();
    *out_im = s.imag();
  });
}

qpn_status qpn_bessel_jn(int order, double x, double* out) {
  if (out == nullptr) {
    t_last_error = "null output";
    return QPN_ERR_INVALID_ARGUMENT;
  }
  return guarded([&]() { *out = bessel_jn(order, x); });
}

qpn_status qpn_log_factorial(int n, double* out) {
  if (out == nullptr) {
    t_last_error = "null output";
    return QPN_ERR_INVALID_ARGUMENT;
  }
  return guarded([&]() { *out = log_factorial(n); });
}

}  // extern "C"
