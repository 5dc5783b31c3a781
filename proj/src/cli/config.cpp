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


#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cpe/cli.hpp"

namespace cpe::cli {
namespace {

using json = nlohmann::json;

// Walks a JSON document, recording problems with their field paths.
class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& msg) { errors.push_back("field '" + path + "': " + msg); }

  void allow_keys(const json& obj, const std::string& path, std::set<std::string> keys) {
    if (!obj.is_object()) return fail(path.empty() ? "<root>" : path, "expected an object");
    for (const auto& [k, v] : obj.items())
      if (!keys.count(k)) fail(join(path, k), "unknown field");
  }

  const json* child(const json& obj, const std::string& key) const {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }

  double number(const json& obj, const std::string& path, const std::string& key, double fallback) {
    const json* v = child(obj, key);
    if (!v) return fallback;
    if (!v->is_number()) {
      fail(join(path, key), "expected a number");
      return fallback;
    }
    return v->get<double>();
  }

  int integer(const json& obj, const std::string& path, const std::string& key, int fallback) {
    const json* v = child(obj, key);
    if (!v) return fallback;
    if (!v->is_number_integer()) {
      fail(join(path, key), "expected an integer");
      return fallback;
    }
    return v->get<int>();
  }

  bool boolean(const json& obj, const std::string& path, const std::string& key, bool fallback) {
    const json* v = child(obj, key);
    if (!v) return fallback;
    if (!v->is_boolean()) {
      fail(join(path, key), "expected true or false");
      return fallback;
    }
    return v->get<bool>();
  }

  std::string string(const json& obj, const std::string& path, const std::string& key, std::string fallback) {
    const json* v = child(obj, key);
    if (!v) return fallback;
    if (!v->is_string()) {
      fail(join(path, key), "expected a string");
      return fallback;
    }
    return v->get<std::string>();
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
  static std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }
};

// `s` directly, or `squeezing_db` converted with s = 10^(dB/20).
double read_squeezing(Reader& r, const json& t, const std::string& path, const std::string& key, double fallback) {
  const bool has_s = r.child(t, key) != nullptr, has_db = r.child(t, "squeezing_db") != nullptr;
  if (has_s && has_db) r.fail(path, "give either '" + key + "' or 'squeezing_db', not both");
  if (has_db) return squeezing_from_db(r.number(t, path, "squeezing_db", 0));
  const double s = r.number(t, path, key, fallback);
  if (!(s > 0)) r.fail(Reader::join(path, key), "must be > 0");
  return s;
}

NthPair read_nth(Reader& r, const json& v, const std::string& path) {
  NthPair out{0, 0};
  if (v.is_number()) {
    out = {v.get<double>(), v.get<double>()};
  } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    out = {v[0].get<double>(), v[1].get<double>()};
  } else {
    r.fail(path, "expected a number or a pair [n1, n2]");
    return out;
  }
  if (!(out[0] >= 0) || !(out[1] >= 0)) r.fail(path, "thermal occupation must be >= 0");
  return out;
}

void read_output(Reader& r, const json& root, std::string& csv, std::string* sidecar, std::string* traj) {
  const json* o = r.child(root, "output");
  if (!o) return;
  std::set<std::string> keys{"csv"};
  if (sidecar) keys.insert("sidecar");
  if (traj) keys.insert("trajectory_csv");
  r.allow_keys(*o, "output", keys);
  csv = r.string(*o, "output", "csv", csv);
  if (sidecar) *sidecar = r.string(*o, "output", "sidecar", *sidecar);
  if (traj) *traj = r.string(*o, "output", "trajectory_csv", *traj);
}

SweepSpec read_sweep(Reader& r, const json& root) {
  SweepSpec s;
  r.allow_keys(root, "",
               {"kind", "name", "description", "preset", "plot_metric", "scheme", "target", "dims", "t_step", "dt",
                "dt_cap", "checkpoints_per_step", "gamma_over_kappa0", "n_th", "init_states", "init_n_th", "metrics",
                "full_model", "memory_cap_mb", "output"});
  s.name = r.string(root, "", "name", "sweep");
  s.description = r.string(root, "", "description", "");
  s.preset = r.boolean(root, "", "preset", false);
  s.plot_metric = r.string(root, "", "plot_metric", "fidelity");
  static const std::set<std::string> metrics{"fidelity", "purity", "log_neg", "w_min", "epr_sum"};
  if (!metrics.count(s.plot_metric)) r.fail("plot_metric", "unknown metric '" + s.plot_metric + "'");
  s.csv = s.name + ".csv";
  s.sidecar = s.name + ".json";

  const std::string scheme = r.string(root, "", "scheme", "");
  if (scheme.empty()) {
    r.fail("scheme", "required");
  } else {
    try {
      s.scheme = scheme_from_string(scheme);
    } catch (const Error& e) {
      r.fail("scheme", e.what());
    }
  }

  CpeParams& t = s.cfg.target;
  if (const json* tj = r.child(root, "target")) {
    r.allow_keys(*tj, "target", {"s", "squeezing_db", "lambda", "theta", "leak_tol"});
    t.s = read_squeezing(r, *tj, "target", "s", t.s);
    t.lambda = r.number(*tj, "target", "lambda", t.lambda);
    t.theta = r.number(*tj, "target", "theta", t.theta);
    t.leak_tol = r.number(*tj, "target", "leak_tol", t.leak_tol);
  } else {
    r.fail("target", "required");
  }
  if (const json* d = r.child(root, "dims")) {
    if (!d->is_array() || d->size() != 2) {
      r.fail("dims", "expected [d1, d2]");
    } else {
      for (std::size_t i = 0; i < 2; ++i) {
        if (!(*d)[i].is_number_integer()) {
          r.fail(Reader::at("dims", i), "expected an integer");
          continue;
        }
        const int v = (*d)[i].get<int>();
        if (v < 2) r.fail(Reader::at("dims", i), "mechanical dimensions must be each >= 2");
        t.dims[i] = v;
      }
    }
  }

  s.cfg.t_step = r.number(root, "", "t_step", s.cfg.t_step);
  if (!(s.cfg.t_step > 0)) r.fail("t_step", "must be > 0");
  s.cfg.dt = r.number(root, "", "dt", s.cfg.dt);
  if (s.cfg.dt < 0) r.fail("dt", "must be >= 0");
  s.cfg.dt_cap = r.number(root, "", "dt_cap", s.cfg.dt_cap);
  if (!(s.cfg.dt_cap > 0)) r.fail("dt_cap", "must be > 0");
  s.cfg.checkpoints_per_step = r.integer(root, "", "checkpoints_per_step", 0);
  if (s.cfg.checkpoints_per_step < 0) r.fail("checkpoints_per_step", "must be >= 0");

  if (const json* fm = r.child(root, "full_model")) {
    r.allow_keys(*fm, "full_model", {"g_over_kappa", "cavity_dim"});
    s.cfg.g_over_kappa = r.number(*fm, "full_model", "g_over_kappa", s.cfg.g_over_kappa);
    if (!(s.cfg.g_over_kappa > 0)) r.fail("full_model.g_over_kappa", "must be > 0");
    s.cfg.cavity_dim = r.integer(*fm, "full_model", "cavity_dim", s.cfg.cavity_dim);
    if (s.cfg.cavity_dim < 2) r.fail("full_model.cavity_dim", "must be >= 2");
  }

  if (const json* g = r.child(root, "gamma_over_kappa0"); g && g->is_array()) {
    for (std::size_t i = 0; i < g->size(); ++i) {
      if (!(*g)[i].is_number()) {
        r.fail(Reader::at("gamma_over_kappa0", i), "expected a number");
        continue;
      }
      const double v = (*g)[i].get<double>();
      if (!(v >= 0)) r.fail(Reader::at("gamma_over_kappa0", i), "must be >= 0");
      if (s.preset && v > 0.01) r.fail(Reader::at("gamma_over_kappa0", i), "preset range is [0, 0.01]");
      s.gammas.push_back(v);
    }
    if (g->empty()) r.fail("gamma_over_kappa0", "grid must not be empty");
  } else {
    r.fail("gamma_over_kappa0", "required list of numbers");
  }

  if (const json* n = r.child(root, "n_th"); n && n->is_array()) {
    for (std::size_t i = 0; i < n->size(); ++i) s.n_th.push_back(read_nth(r, (*n)[i], Reader::at("n_th", i)));
    if (n->empty()) r.fail("n_th", "grid must not be empty");
  } else {
    r.fail("n_th", "required list of numbers or pairs");
  }

  if (const json* in = r.child(root, "init_states")) {
    s.inits.clear();
    if (!in->is_array() || in->empty()) r.fail("init_states", "expected a nonempty list");
    for (std::size_t i = 0; in->is_array() && i < in->size(); ++i) {
      try {
        s.inits.push_back(init_from_string((*in)[i].is_string() ? (*in)[i].get<std::string>() : ""));
      } catch (const Error& e) {
        r.fail(Reader::at("init_states", i), e.what());
      }
    }
  }
  if (const json* in = r.child(root, "init_n_th")) s.init_n_th = read_nth(r, *in, "init_n_th");

  if (const json* m = r.child(root, "metrics")) {
    r.allow_keys(*m, "metrics", {"log_neg", "w_min", "w_min_points", "w_min_range", "w_min_full"});
    s.metrics.log_neg = r.boolean(*m, "metrics", "log_neg", true);
    s.metrics.w_min = r.boolean(*m, "metrics", "w_min", true);
    s.metrics.w_min_full = r.boolean(*m, "metrics", "w_min_full", false);
    s.metrics.wmin.points = r.integer(*m, "metrics", "w_min_points", s.metrics.wmin.points);
    if (s.metrics.wmin.points < 3) r.fail("metrics.w_min_points", "must be >= 3");
    if (const json* rg = r.child(*m, "w_min_range")) {
      if (!rg->is_array() || rg->size() != 2 || !(*rg)[0].is_number() || !(*rg)[1].is_number() ||
          !((*rg)[0].get<double>() < (*rg)[1].get<double>()))
        r.fail("metrics.w_min_range", "expected [lo, hi] with lo < hi");
      else
        s.metrics.wmin.lo = (*rg)[0].get<double>(), s.metrics.wmin.hi = (*rg)[1].get<double>();
    }
  }
  s.memory_cap_mb = r.number(root, "", "memory_cap_mb", s.memory_cap_mb);
  if (!(s.memory_cap_mb > 0)) r.fail("memory_cap_mb", "must be > 0");
  read_output(r, root, s.csv, &s.sidecar, &s.trajectory_csv);
  if (s.cfg.checkpoints_per_step > 0 && s.trajectory_csv.empty()) s.trajectory_csv = s.name + "_trajectory.csv";

  if (r.errors.empty()) {
    try {
      s.cfg.validate();
    } catch (const Error& e) {
      r.fail("target", e.what());
    }
  }
  return s;
}

void read_grid_axis(Reader& r, const json& g, const std::string& key, double& lo, double& hi, int& n) {
  const json* a = r.child(g, key);
  if (!a) return;
  const std::string path = "grid." + key;
  if (!a->is_array() || a->size() != 3 || !(*a)[0].is_number() || !(*a)[1].is_number() ||
      !(*a)[2].is_number_integer())
    return r.fail(path, "expected [lo, hi, points]");
  lo = (*a)[0].get<double>();
  hi = (*a)[1].get<double>();
  n = (*a)[2].get<int>();
  if (n < 1) r.fail(path, "points must be >= 1");
  if (n > 1 && !(lo < hi)) r.fail(path, "lo must be < hi");
}

WignerCutSpec read_cut(Reader& r, const json& root) {
  WignerCutSpec s;
  r.allow_keys(root, "", {"kind", "name", "description", "preset", "target", "grid", "fixed", "output"});
  s.name = r.string(root, "", "name", "wigner");
  s.description = r.string(root, "", "description", "");
  s.preset = r.boolean(root, "", "preset", false);
  s.csv = s.name + ".csv";
  if (const json* t = r.child(root, "target")) {
    r.allow_keys(*t, "target", {"s", "s2", "squeezing_db", "lambda", "theta"});
    s.params.s1 = read_squeezing(r, *t, "target", "s", s.params.s1);
    s.params.s2 = r.number(*t, "target", "s2", 1.0 / s.params.s1);
    if (!(s.params.s2 > 0)) r.fail("target.s2", "must be > 0");
    s.params.lambda = r.number(*t, "target", "lambda", s.params.lambda);
    s.params.theta = r.number(*t, "target", "theta", s.params.theta);
    if (s.params.lambda == 0.0) r.fail("target.lambda", "analytic cut needs a nonzero cubicity");
  } else {
    r.fail("target", "required");
  }
  if (const json* g = r.child(root, "grid")) {
    r.allow_keys(*g, "grid", {"u", "v"});
    read_grid_axis(r, *g, "u", s.u_lo, s.u_hi, s.u_points);
    read_grid_axis(r, *g, "v", s.v_lo, s.v_hi, s.v_points);
  }
  if (const json* f = r.child(root, "fixed")) {
    r.allow_keys(*f, "fixed", {"q1_plus_q2", "p1_minus_p2"});
    s.fixed_q = r.number(*f, "fixed", "q1_plus_q2", 0);
    s.fixed_p = r.number(*f, "fixed", "p1_minus_p2", 0);
  }
  read_output(r, root, s.csv, nullptr, nullptr);
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Config parse_config(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    if (auto p = what.find("parse error"); p != std::string::npos) what = what.substr(p);
    throw ConfigError(source + ": " + what);
  }
  if (!root.is_object()) throw ConfigError(source + ": top level must be an object");

  Reader r;
  const std::string kind = r.string(root, "", "kind", "sweep");
  Config out;
  if (kind == "sweep")
    out = read_sweep(r, root);
  else if (kind == "wigner_cut")
    out = read_cut(r, root);
  else
    r.fail("kind", "expected 'sweep' or 'wigner_cut'");
  if (!r.errors.empty()) {
    std::string msg;
    for (const auto& e : r.errors) msg += (msg.empty() ? "" : "\n") + source + ": " + e;
    throw ConfigError(msg);
  }
  return out;
}

Config load_config(const std::string& name_or_path) {
  if (const PresetInfo* p = find_preset(name_or_path)) return parse_config(p->text, "preset " + p->name);
  return parse_config(read_file(name_or_path), name_or_path);
}

void apply_overrides(SweepSpec& spec, const Overrides& o) {
  if (!o.dims.empty()) {
    if (o.dims.size() < 2 || o.dims.size() > 3) throw ConfigError("--dims expects d1,d2[,dc]");
    for (int d : o.dims)
      if (d < 2) throw ConfigError("--dims: each dimension must be >= 2");
    spec.cfg.target.dims = {o.dims[0], o.dims[1]};
    if (o.dims.size() == 3) spec.cfg.cavity_dim = o.dims[2];
  }
  if (o.full_model) {
    if (spec.scheme == Scheme::switching) spec.scheme = Scheme::full_switching;
    if (spec.scheme == Scheme::two_dissipator) spec.scheme = Scheme::full_two_dissipator;
  }
}

std::vector<SweepPoint> expand(const SweepSpec& spec) {
  std::vector<SweepPoint> out;
  for (InitKind init : spec.inits)
    for (const NthPair& n : spec.n_th)
      for (double g : spec.gammas) out.push_back({init, n, g});
  return out;
}

Estimate estimate(const SweepSpec& spec) {
  Estimate e;
  e.points = static_cast<long>(expand(spec).size());
  const bool full = spec.scheme == Scheme::full_switching || spec.scheme == Scheme::full_two_dissipator;
  const bool two_step = spec.scheme == Scheme::switching || spec.scheme == Scheme::full_switching;
  const double d1 = spec.cfg.target.dims[0], d2 = spec.cfg.target.dims[1];
  const int ncav = spec.scheme == Scheme::full_two_dissipator ? 2 : (full ? 1 : 0);
  const double D = d1 * d2 * std::pow(double(spec.cfg.cavity_dim), ncav);
  // Automatic steps sit at the RK4 bound; the generator norm grows roughly
  // like d^2 / 2 for the engineered dissipators.
  const double dmax = std::max(d1, d2);
  const double dt = spec.cfg.dt > 0 ? spec.cfg.dt : std::min(spec.cfg.dt_cap, 0.8 * 2.78 / (0.5 * dmax * dmax));
  e.steps_per_point = static_cast<long>(std::ceil(spec.cfg.t_step / dt)) * (two_step ? 2 : 1);
  // Four split planes for the integrator, generator scratch, and the dense
  // complex copies used by the metrics.
  e.memory_mb_per_point = (6.0 * 2 * 8 + 4 * 16) * D * D / 1e6;
  // About 20 multiply-adds per density-matrix entry and stage on the
  // effective model at about 1e9 per second.
  const double per_entry = full ? 60.0 : 20.0;
  e.seconds_per_point = 4.0 * per_entry * D * D * e.steps_per_point / 1e9;
  return e;
}

ValidationReport validate_config(const std::string& name_or_path, int threads) {
  ValidationReport rep;
  Config cfg;
  try {
    cfg = load_config(name_or_path);
  } catch (const ConfigError& e) {
    rep.valid = false;
    std::istringstream lines(e.what());
    for (std::string l; std::getline(lines, l);) rep.errors.push_back(l);
    return rep;
  }
  if (auto* s = std::get_if<SweepSpec>(&cfg)) {
    for (double g : s->gammas)
      if (!s->preset && g > 0.01) {
        rep.warnings.push_back("gamma_over_kappa0 above 0.01 lies outside the preset range");
        break;
      }
    if (std::count(s->inits.begin(), s->inits.end(), InitKind::thermal)) {
      std::vector<NthPair> starts = s->init_n_th ? std::vector<NthPair>{*s->init_n_th} : s->n_th;
      double worst = 0;
      for (const auto& n : starts)
        for (int j = 0; j < 2; ++j) {
          double discarded = 0;
          thermal_populations<double>(s->cfg.target.dims[j], n[j], &discarded);
          worst = std::max(worst, discarded);
        }
      if (worst > 1e-6)
        rep.warnings.push_back("thermal start loses weight " + format_number(worst) + " to the truncation");
    }
    rep.estimate = estimate(*s);
    const double mem = rep.estimate->memory_mb_per_point * std::max(1, threads);
    if (mem > s->memory_cap_mb) {
      rep.valid = false;
      rep.errors.push_back("estimated memory " + format_number(mem) + " MB exceeds memory_cap_mb " +
                           format_number(s->memory_cap_mb));
    }
  }
  return rep;
}

}  // namespace cpe::cli
