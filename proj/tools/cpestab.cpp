// Copyright 2026 The cpestab Authors
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


// cpestab: batch runs of the stabilisation schemes.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cpe/cli.hpp"

namespace fs = std::filesystem;
using namespace cpe;
using namespace cpe::cli;

namespace {

std::ofstream open_out(const fs::path& dir, const std::string& file) {
  fs::create_directories(dir);
  const fs::path p = dir / file;
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot write " + p.string());
  std::cout << "wrote " << p.string() << "\n";
  return os;
}

std::vector<int> parse_dims(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("--dims: '" + tok + "' is not an integer");
    }
  }
  return out;
}

int write_cut(const WignerCutSpec& spec, const fs::path& out) {
  const WignerCut cut = emit_wigner_cut(spec);
  auto os = open_out(out, spec.csv);
  write_wigner_csv(os, cut);
  std::cout << spec.name << ": " << cut.u.size() << "x" << cut.v.size() << " grid, min "
            << format_number(cut.values.minCoeff()) << ", max " << format_number(cut.values.maxCoeff()) << "\n";
  return 0;
}

int simulate(const std::string& config, const fs::path& out, int threads, const Overrides& ov, bool stamp) {
  Config cfg = load_config(config);
  if (auto* cut = std::get_if<WignerCutSpec>(&cfg)) return write_cut(*cut, out);
  auto& spec = std::get<SweepSpec>(cfg);
  apply_overrides(spec, ov);
  const Estimate e = estimate(spec);
  std::cout << spec.name << ": " << e.points << " points, " << to_string(spec.scheme) << ", dims "
            << spec.cfg.target.dims[0] << "x" << spec.cfg.target.dims[1] << ", " << threads << " thread(s)\n";
  const SweepResult r = run_sweep(spec, threads);
  {
    auto os = open_out(out, spec.csv);
    write_csv(os, r, stamp);
  }
  {
    auto os = open_out(out, spec.sidecar);
    write_sidecar(os, r);
  }
  if (!spec.trajectory_csv.empty()) {
    auto os = open_out(out, spec.trajectory_csv);
    write_trajectory_csv(os, r);
  }
  int failed = 0;
  for (const auto& row : r.rows)
    if (!row.error.empty()) {
      ++failed;
      std::cerr << "point gamma=" << format_number(row.point.gamma) << " failed: " << row.error << "\n";
    }
  return failed ? 2 : 0;
}

int validate(const std::string& config, int threads) {
  const ValidationReport rep = validate_config(config, threads);
  for (const auto& e : rep.errors) std::cout << "error: " << e << "\n";
  for (const auto& w : rep.warnings) std::cout << "warning: " << w << "\n";
  if (rep.estimate) {
    const Estimate& e = *rep.estimate;
    std::cout << "points: " << e.points << "\n"
              << "steps per point: " << e.steps_per_point << "\n"
              << "memory per point: " << format_number(std::round(e.memory_mb_per_point)) << " MB\n"
              << "estimated time per point: " << format_number(std::round(e.seconds_per_point)) << " s\n";
  }
  std::cout << (rep.valid ? "valid" : "invalid") << "\n";
  return rep.valid ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reservoir-engineered stabilisation of cubic-phase entangled mechanical states"};
  app.require_subcommand(1);

  std::string config, out_dir = ".", dims;
  int threads = 1;
  bool full_model = false, no_timestamp = false;

  auto* sim = app.add_subcommand("simulate", "Run a sweep (or a Wigner-cut config) and write CSV/JSON");
  sim->add_option("config", config, "Preset name or config file")->required();
  sim->add_option("--out", out_dir, "Output directory");
  sim->add_option("--threads", threads, "Concurrent sweep points")->check(CLI::PositiveNumber);
  sim->add_option("--dims", dims, "Truncation override d1,d2[,dc]");
  sim->add_flag("--full-model", full_model, "Keep the cavities explicit");
  sim->add_flag("--no-timestamp", no_timestamp, "Omit the timestamp comment line");

  auto* wig = app.add_subcommand("wigner", "Write an analytic Wigner cut grid");
  wig->add_option("config", config, "Preset name or config file")->required();
  wig->add_option("--out", out_dir, "Output directory");

  auto* val = app.add_subcommand("validate", "Check a config and estimate its cost");
  val->add_option("config", config, "Preset name or config file")->required();
  val->add_option("--threads", threads, "Concurrent sweep points")->check(CLI::PositiveNumber);

  auto* pre = app.add_subcommand("presets", "Shipped presets");
  auto* pre_list = pre->add_subcommand("list", "List preset names");
  pre->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      Overrides ov;
      if (!dims.empty()) ov.dims = parse_dims(dims);
      ov.full_model = full_model;
      return simulate(config, out_dir, threads, ov, !no_timestamp);
    }
    if (*wig) {
      Config cfg = load_config(config);
      auto* cut = std::get_if<WignerCutSpec>(&cfg);
      if (!cut) throw ConfigError(config + ": not a wigner_cut config");
      return write_cut(*cut, out_dir);
    }
    if (*val) return validate(config, threads);
    if (*pre_list) {
      for (const auto& p : presets()) std::cout << p.name << "  " << p.description << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
