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


#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <map>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "cpe/cli.hpp"

namespace cpe::cli {
namespace {

using json = nlohmann::json;

PointResult run_point(const SweepSpec& spec, const SweepPoint& pt, const StateVector& target) {
  PointResult out;
  out.point = pt;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    NoiseConfig noise;
    noise.gamma = pt.gamma;
    noise.n_th = pt.n_th;
    InitialState init;
    init.kind = pt.init;
    init.n_th = spec.init_n_th.value_or(pt.n_th);
    const RunResult res = run_scheme(spec.scheme, spec.cfg, noise, init);
    out.diag = res.diag;
    out.metrics = evaluate(res.final_state, target, spec.metrics);
    out.times = res.times;
    for (const auto& rho : res.trajectory) out.fidelity_trace.push_back(fidelity(rho, target));
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::string nth_label(const NthPair& n) {
  return n[0] == n[1] ? format_number(n[0]) : format_number(n[0]) + ";" + format_number(n[1]);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return q + "\"";
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double metric_value(const PointResult& r, const std::string& m) {
  if (m == "fidelity") return r.metrics.fidelity;
  if (m == "purity") return r.metrics.purity;
  if (m == "log_neg") return r.metrics.log_neg;
  if (m == "w_min") return r.metrics.w_min;
  return r.metrics.epr_sum;
}

bool metric_enabled(const SweepSpec& s, const std::string& m) {
  if (m == "log_neg") return s.metrics.log_neg;
  if (m == "w_min") return s.metrics.w_min;
  return true;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

SweepResult run_sweep(const SweepSpec& spec, int threads) {
  SweepResult out;
  out.spec = spec;
  const std::vector<SweepPoint> points = expand(spec);
  out.rows.resize(points.size());
  const StateVector target = cpe_state(spec.cfg.target);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) out.rows[i] = run_point(spec, points[i], target);
  };
  const int n = std::clamp<int>(threads, 1, static_cast<int>(std::max<std::size_t>(1, points.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

void write_csv(std::ostream& os, const SweepResult& r, bool timestamp) {
  const SweepSpec& s = r.spec;
  if (timestamp) os << "# " << s.name << " generated " << utc_now() << "\n";
  os << kCsvColumns << "\n";
  for (const PointResult& row : r.rows) {
    os << to_string(s.scheme) << ',' << format_number(s.cfg.target.s) << ',' << format_number(s.cfg.target.lambda)
       << ',' << format_number(row.point.gamma) << ',' << nth_label(row.point.n_th) << ','
       << to_string(row.point.init) << ',';
    if (row.error.empty()) {
      const MetricsRecord& m = row.metrics;
      os << format_number(m.fidelity) << ',' << format_number(m.purity) << ','
         << (s.metrics.log_neg ? format_number(m.log_neg) : "") << ','
         << (s.metrics.w_min ? format_number(m.w_min) : "") << ',' << format_number(m.epr_sum) << ','
         << format_number(row.diag.max_trace_drift) << ',';
    } else {
      os << ",,,,,," << csv_field(row.error);
    }
    os << "\n";
  }
}

void write_trajectory_csv(std::ostream& os, const SweepResult& r) {
  os << "scheme,init_state,gamma_over_kappa0,n_th,time,fidelity\n";
  for (const PointResult& row : r.rows)
    for (std::size_t k = 0; k < row.times.size() && k < row.fidelity_trace.size(); ++k)
      os << to_string(r.spec.scheme) << ',' << to_string(row.point.init) << ',' << format_number(row.point.gamma)
         << ',' << nth_label(row.point.n_th) << ',' << format_number(row.times[k]) << ','
         << format_number(row.fidelity_trace[k]) << "\n";
}

void write_sidecar(std::ostream& os, const SweepResult& r) {
  const SweepSpec& s = r.spec;
  json j;
  j["name"] = s.name;
  j["description"] = s.description;
  j["plot_metric"] = s.plot_metric;
  j["scheme"] = to_string(s.scheme);
  j["target"] = {{"s", s.cfg.target.s},
                 {"squeezing_db", squeezing_to_db(s.cfg.target.s)},
                 {"lambda", s.cfg.target.lambda},
                 {"theta", s.cfg.target.theta}};
  j["dims"] = s.cfg.target.dims;
  j["t_step"] = s.cfg.t_step;
  j["csv"] = s.csv;
  if (!s.trajectory_csv.empty()) j["trajectory_csv"] = s.trajectory_csv;
  j["columns"] = json::array();
  {
    std::string cols = kCsvColumns;
    for (std::size_t p = 0, q; p <= cols.size(); p = q + 1) {
      q = cols.find(',', p);
      if (q == std::string::npos) q = cols.size();
      j["columns"].push_back(cols.substr(p, q - p));
    }
  }
  j["trend_model"] = "A*exp(-B*x)+C, x = gamma_over_kappa0";

  // One trend per (init, n_th) series and metric, over the gamma grid.
  json trends = json::array();
  std::map<std::pair<int, std::string>, std::vector<const PointResult*>> series;
  std::vector<std::pair<int, std::string>> order;
  for (const PointResult& row : r.rows) {
    auto key = std::make_pair(static_cast<int>(row.point.init), nth_label(row.point.n_th));
    if (!series.count(key)) order.push_back(key);
    series[key].push_back(&row);
  }
  for (const auto& key : order) {
    const auto& rows = series[key];
    for (const std::string m : {"fidelity", "purity", "log_neg", "w_min", "epr_sum"}) {
      if (!metric_enabled(s, m)) continue;
      json t = {{"init_state", to_string(static_cast<InitKind>(key.first))}, {"n_th", key.second}, {"metric", m}};
      std::vector<double> xs, ys;
      for (const PointResult* p : rows)
        if (p->error.empty()) xs.push_back(p->point.gamma), ys.push_back(metric_value(*p, m));
      try {
        const TrendFit f = fit_trend(xs, ys);
        t["A"] = f.A;
        t["B"] = f.B;
        t["C"] = f.C;
        t["residual"] = f.residual;
        t["degenerate"] = f.degenerate;
      } catch (const Error& e) {
        t["skipped"] = e.what();
      }
      trends.push_back(t);
    }
  }
  j["trends"] = trends;

  json rows = json::array();
  double total = 0;
  for (const PointResult& row : r.rows) {
    json d = {{"gamma_over_kappa0", row.point.gamma},
              {"n_th", row.point.n_th},
              {"init_state", to_string(row.point.init)}};
    if (row.error.empty()) {
      d["discarded_weight"] = row.diag.discarded_weight;
      d["max_trace_drift"] = row.diag.max_trace_drift;
      d["rhs_norm_final"] = row.diag.rhs_norm_final;
      d["min_eigenvalue"] = row.diag.min_eigenvalue;
      d["log_neg_raw"] = row.metrics.log_neg_raw;
      d["w_min_p1"] = row.metrics.w_min_p1;
      d["epr_q"] = row.metrics.epr_q;
      d["epr_p"] = row.metrics.epr_p;
      if (r.spec.metrics.w_min_full) {
        const PhasePoint& x = row.metrics.w_min_full_at;
        d["w_min_full"] = row.metrics.w_min_full;
        d["w_min_full_at"] = {x.q1, x.p1, x.q2, x.p2};
      }
      if (!row.metrics.diagnostic.empty()) d["diagnostic"] = row.metrics.diagnostic;
    } else {
      d["error"] = row.error;
    }
    d["seconds"] = row.seconds;
    total += row.seconds;
    rows.push_back(d);
  }
  j["points"] = rows;
  j["seconds_total"] = total;
  os << j.dump(2) << "\n";
}

WignerCut emit_wigner_cut(const WignerCutSpec& spec) {
  spec.params.validate();
  auto axis = [](double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
  };
  WignerCut c;
  c.spec = spec;
  c.u = axis(spec.u_lo, spec.u_hi, spec.u_points);
  c.v = axis(spec.v_lo, spec.v_hi, spec.v_points);
  c.values = epr_cut(spec.params, c.u, c.v, spec.fixed_q, spec.fixed_p);
  return c;
}

void write_wigner_csv(std::ostream& os, const WignerCut& c) {
  const auto& p = c.spec.params;
  os << "# name=" << c.spec.name << "\n";
  os << "# s1=" << format_number(p.s1) << " s2=" << format_number(p.s2) << " lambda=" << format_number(p.lambda)
     << " theta=" << format_number(p.theta) << "\n";
  os << "# u=(q1-q2)/sqrt2 rows, v=(p1+p2)/sqrt2 columns, q1+q2=" << format_number(c.spec.fixed_q)
     << " p1-p2=" << format_number(c.spec.fixed_p) << "\n";
  // One vacuum standard deviation in each EPR quadrature.
  os << "# vacuum_radius=" << format_number(std::sqrt(0.5)) << "\n";
  os << "u\\v";
  for (double v : c.v) os << ',' << format_number(v);
  os << "\n";
  for (Index i = 0; i < c.values.rows(); ++i) {
    os << format_number(c.u[i]);
    for (Index k = 0; k < c.values.cols(); ++k) os << ',' << format_number(c.values(i, k));
    os << "\n";
  }
}

}  // namespace cpe::cli
