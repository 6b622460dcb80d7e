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

// Command-line front end. Talks to the simulator exclusively through the
// C API in qpinem/qpinem.h.

#include <cmath>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "qpinem/qpinem.h"

namespace {

std::string json_quote(const char* text) {
  std::string out = "\"";
  for (const char* p = text; *p != '\0'; ++p) {
    switch (*p) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(*p) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", *p);
          out += buf;
        } else {
          out += *p;
        }
    }
  }
  out += "\"";
  return out;
}

void print_error_json(qpn_status status) {
  std::fprintf(stderr, "{\"error\":{\"code\":\"%s\",\"status\":%d,\"message\":%s}}\n",
               qpn_status_name(status), static_cast<int>(status),
               json_quote(qpn_last_error()).c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qpinem: joint photon-electron statistics for free electrons "
               "scattering off one quantized light mode"};
  app.set_version_flag("--version", std::string(qpn_version()));

  std::string config_path;
  std::string out_dir = "out";
  long seed = 0;

  auto add_common = [&](CLI::App* cmd, bool with_out) {
    cmd->add_option("config", config_path, "scenario config (JSON)")->required();
    if (with_out) cmd->add_option("-o,--out", out_dir, "output directory");
    cmd->add_option("--seed", seed,
                    "reserved; the core is deterministic, recorded for future sampling");
  };

  CLI::App* cmd_run = app.add_subcommand("run", "run one scenario and write its outputs");
  add_common(cmd_run, true);
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "run a parameter sweep grid");
  add_common(cmd_sweep, true);
  CLI::App* cmd_validate = app.add_subcommand("validate", "check a config without running it");
  add_common(cmd_validate, false);
  CLI::App* cmd_oracle =
      app.add_subcommand("oracle-check", "compare all evaluation paths on one scenario");
  add_common(cmd_oracle, false);
  app.require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  qpn_scenario* scenario = nullptr;
  qpn_status st = qpn_scenario_from_file(config_path.c_str(), &scenario);
  if (st != QPN_OK) {
    print_error_json(st);
    return static_cast<int>(st);
  }
  std::unique_ptr<qpn_scenario, decltype(&qpn_scenario_free)> scenario_guard(
      scenario, &qpn_scenario_free);

  if (cmd_validate->parsed()) {
    st = qpn_scenario_validate(scenario);
    if (st != QPN_OK) {
      print_error_json(st);
      return static_cast<int>(st);
    }
    std::printf("ok: %s\n", qpn_scenario_json(scenario));
    return 0;
  }

  if (cmd_oracle->parsed()) {
    double dev = 0.0;
    st = qpn_oracle_check(scenario, &dev);
    if (st != QPN_OK) {
      print_error_json(st);
      return static_cast<int>(st);
    }
    std::printf("oracle-check max |probability deviation| = %.3e\n", dev);
    return 0;
  }

  if (cmd_sweep->parsed()) {
    qpn_sweep_result* result = nullptr;
    st = qpn_sweep(scenario, out_dir.c_str(), &result);
    if (st != QPN_OK) {
      print_error_json(st);
      return static_cast<int>(st);
    }
    int n = qpn_sweep_result_point_count(result);
    int failed = 0;
    for (int i = 0; i < n; ++i) {
      const char* error = nullptr;
      qpn_sweep_result_point(result, i, nullptr, nullptr, nullptr, nullptr, nullptr, &error);
      if (error != nullptr && error[0] != '\0') ++failed;
    }
    std::printf("sweep: %d points (%d failed), outputs in %s\n", n, failed, out_dir.c_str());
    qpn_sweep_result_free(result);
    return 0;
  }

  qpn_result* result = nullptr;
  st = qpn_run(scenario, out_dir.c_str(), &result);
  if (st != QPN_OK) {
    print_error_json(st);
    return static_cast<int>(st);
  }
  double pcc = 0.0;
  int defined = 0;
  qpn_result_pcc(result, &pcc, &defined);
  double dropped = 0.0;
  qpn_result_dropped_mass(result, &dropped);
  if (defined) {
    std::printf("pcc = %.9g (|pcc| = %.9g), dropped mass = %.3e\n", pcc, std::fabs(pcc), dropped);
  } else {
    std::printf("pcc undefined (degenerate distribution), dropped mass = %.3e\n", dropped);
  }
  int files = qpn_result_file_count(result);
  for (int i = 0; i < files; ++i) {
    std::printf("wrote %s/%s\n", out_dir.c_str(), qpn_result_file_path(result, i));
  }
  qpn_result_free(result);
  return 0;
}
