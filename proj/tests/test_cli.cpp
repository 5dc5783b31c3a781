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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "cpe/cli.hpp"

using namespace cpe;
using namespace cpe::cli;
using nlohmann::json;

namespace {

const char* kSmall = R"({
  "kind": "sweep",
  "name": "small",
  "scheme": "two_dissipator",
  "target": {"s": 1.26, "lambda": 0.1, "leak_tol": 0.05},
  "dims": [6, 6],
  "t_step": 2.0,
  "gamma_over_kappa0": [0, 0.01, 0.02, 0.04],
  "n_th": [0, [2, 1]],
  "init_states": ["vacuum", "thermal"],
  "metrics": {"w_min_points": 21}
})";

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "test.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string with(const std::string& key, const std::string& value) {
  json j = json::parse(kSmall);
  j[key] = json::parse(value);
  return j.dump();
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("sweep config parsing") {
  const SweepSpec s = std::get<SweepSpec>(parse_config(kSmall));
  CHECK(s.name == "small");
  CHECK(s.scheme == Scheme::two_dissipator);
  CHECK(s.gammas.size() == 4);
  REQUIRE(s.n_th.size() == 2);
  CHECK(s.n_th[0] == NthPair{0, 0});
  CHECK(s.n_th[1] == NthPair{2, 1});
  CHECK(s.cfg.target.dims == std::array<int, 2>{6, 6});
  CHECK(s.csv == "small.csv");
  CHECK(s.sidecar == "small.json");
  CHECK(s.trajectory_csv.empty());
  CHECK(expand(s).size() == 16);
  CHECK(expand(s)[1].n_th == NthPair{0, 0});
  CHECK(expand(s)[1].gamma == 0.01);
  CHECK(expand(s)[4].n_th == NthPair{2, 1});
  CHECK(expand(s)[8].init == InitKind::thermal);
}

TEST_CASE("config errors name the field") {
  CHECK(contains(error_of(with("gamma_over_kappa0", "[]")), "gamma_over_kappa0"));
  CHECK(contains(error_of(with("n_th", "[-1]")), "n_th"));
  CHECK(contains(error_of(with("dims", "[1, 6]")), "dims"));
  CHECK(contains(error_of(with("colour", "1")), "colour"));
  CHECK(contains(error_of(with("scheme", "\"three\"")), "scheme"));
  const std::string parse = error_of("{\n  \"kind\": \"sweep\",\n  oops\n}");
  CHECK(contains(parse, "test.json"));
  CHECK(contains(parse, "line 3"));
  json pre = json::parse(with("gamma_over_kappa0", "[0.5]"));
  pre["preset"] = true;
  CHECK(contains(error_of(pre.dump()), "gamma_over_kappa0"));
  CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), ConfigError);
}

TEST_CASE("shipped presets") {
  std::vector<std::string> names;
  for (const PresetInfo& p : presets()) {
    names.push_back(p.name);
    CHECK_FALSE(p.description.empty());
    const ValidationReport r = validate_config(p.name);
    CHECK_MESSAGE(r.valid, p.name);
  }
  for (const char* want : {"fig1c", "fig1d", "fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b",
                           "fig6", "fig7"})
    CHECK(std::find(names.begin(), names.end(), want) != names.end());
  CHECK(find_preset("nope") == nullptr);

  const SweepSpec f2 = std::get<SweepSpec>(load_config("fig2a"));
  CHECK(f2.cfg.target.dims == std::array<int, 2>{40, 40});
  CHECK(f2.cfg.target.lambda == 0.175);
  CHECK(f2.cfg.target.s == doctest::Approx(std::pow(10.0, 2.0 / 20)));
  CHECK(f2.gammas.back() == 0.01);
  const SweepSpec f7 = std::get<SweepSpec>(load_config("fig7"));
  CHECK(f7.cfg.checkpoints_per_step == 20);
  CHECK(f7.n_th[0] == NthPair{10, 1});
  CHECK_FALSE(f7.trajectory_csv.empty());
}

TEST_CASE("overrides and estimates") {
  SweepSpec s = std::get<SweepSpec>(load_config("fig3a"));
  const Estimate big = estimate(s);
  apply_overrides(s, {{10, 10}, false});
  CHECK(s.cfg.target.dims == std::array<int, 2>{10, 10});
  CHECK(estimate(s).memory_mb_per_point < big.memory_mb_per_point);
  CHECK(big.points == static_cast<long>(expand(s).size()));
  apply_overrides(s, {{10, 10, 3}, true});
  CHECK(s.cfg.cavity_dim == 3);
  CHECK(s.scheme == Scheme::full_switching);
  CHECK_THROWS_AS(apply_overrides(s, {{1, 10}, false}), ConfigError);
}

TEST_CASE("sweep output is deterministic and thread-independent") {
  const SweepSpec s = std::get<SweepSpec>(parse_config(kSmall));
  const SweepResult one = run_sweep(s, 1);
  const SweepResult four = run_sweep(s, 4);
  std::ostringstream a, b;
  write_csv(a, one, false);
  write_csv(b, four, false);
  CHECK(a.str() == b.str());

  std::istringstream in(a.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == kCsvColumns);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.rfind("two_dissipator,", 0) == 0);
  }
  CHECK(rows == 16);
  CHECK(contains(a.str(), ",2;1,"));
  for (const PointResult& r : one.rows) {
    CHECK(r.error.empty());
    CHECK(r.metrics.fidelity > 0.5);
  }
  // Noise lowers the fidelity along each gamma series.
  CHECK(one.rows[3].metrics.fidelity < one.rows[0].metrics.fidelity);

  std::ostringstream ts;
  write_csv(ts, one, true);
  CHECK(ts.str().rfind("# small", 0) == 0);

  std::ostringstream side;
  write_sidecar(side, one);
  const json j = json::parse(side.str());
  CHECK(j["points"].size() == 16);
  CHECK(contains(j["trend_model"].get<std::string>(), "A*exp(-B*x)+C"));
  CHECK(j.contains("trends"));
}

TEST_CASE("failed points are reported, not fatal") {
  json j = json::parse(kSmall);
  j["dt"] = 5.0;
  j["gamma_over_kappa0"] = {0.0};
  j["n_th"] = {0};
  j["init_states"] = {"vacuum"};
  const SweepResult r = run_sweep(std::get<SweepSpec>(parse_config(j.dump())), 1);
  REQUIRE(r.rows.size() == 1);
  CHECK_FALSE(r.rows[0].error.empty());
  std::ostringstream os;
  write_csv(os, r, false);
  CHECK(contains(os.str(), ",vacuum,,,,,,," + r.rows[0].error.substr(0, 10)));
}

TEST_CASE("trajectory output") {
  json j = json::parse(kSmall);
  j["checkpoints_per_step"] = 4;
  j["scheme"] = "switching";
  j["gamma_over_kappa0"] = {0.0};
  j["n_th"] = {0};
  j["init_states"] = {"vacuum", "precooled"};
  const SweepSpec s = std::get<SweepSpec>(parse_config(j.dump()));
  CHECK(s.trajectory_csv == "small_trajectory.csv");
  const SweepResult r = run_sweep(s, 2);
  // Precooling prepares the start and is not part of the record.
  CHECK(r.rows[0].times.size() == 8);
  CHECK(r.rows[1].times.size() == 8);
  CHECK(r.rows[0].times.back() == doctest::Approx(4.0));
  CHECK(r.rows[0].fidelity_trace.back() == doctest::Approx(r.rows[0].metrics.fidelity));
  std::ostringstream os;
  write_trajectory_csv(os, r);
  const std::string text = os.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 8 + 8);
}

TEST_CASE("Wigner cut") {
  const WignerCutSpec spec = std::get<WignerCutSpec>(load_config("fig1c"));
  CHECK(spec.u_points == 121);
  WignerCutSpec one = spec;
  one.u_lo = one.u_hi = 0.4;
  one.v_lo = one.v_hi = -0.7;
  one.u_points = one.v_points = 1;
  const WignerCut c = emit_wigner_cut(one);
  REQUIRE(c.values.size() == 1);
  CHECK(c.values(0, 0) == analytic_wigner(spec.params, epr_point(0.4, -0.7, spec.fixed_q, spec.fixed_p)));

  const WignerCut full = emit_wigner_cut(spec);
  CHECK(full.values.minCoeff() < 0);
  std::ostringstream os;
  write_wigner_csv(os, full);
  std::istringstream in(os.str());
  std::string line;
  int data = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#' && line.rfind("u\\v", 0) != 0) ++data;
  CHECK(data == 121);

  const WignerCutSpec d = std::get<WignerCutSpec>(load_config("fig1d"));
  CHECK(d.fixed_p == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1.0 / 3) == "0.333333333333");
  CHECK(format_number(std::nan("")) == "nan");
}
