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

#include "cpe/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cpe {

namespace {

constexpr double kRk4RealAxis = 2.78;
constexpr double kStabilityMargin = 0.8;

DensityMatrix to_density(const ModeLayout& layout, SplitMatrix m) {
  mirror_full(m);
  CMatrix<double> c = m.to_complex();
  c /= c.trace().real();
  return DensityMatrix(layout, std::move(c));
}

void scale(SplitMatrix& m, double s) {
  m.re *= s;
  m.im *= s;
}

std::vector<double> step_checkpoints(double t_final, int per_step) {
  std::vector<double> out;
  for (int k = 1; k <= per_step; ++k) out.push_back(t_final * k / per_step);
  return out;
}

void merge(RunResult& into, const Trajectory& tr, double t_offset, const std::vector<int>& keep) {
  for (size_t k = 0; k < tr.times.size(); ++k) {
    into.times.push_back(t_offset + tr.times[k]);
    into.trajectory.push_back(keep.empty() ? tr.states[k] : partial_trace(tr.states[k], keep));
  }
  into.diag.stages.push_back(tr.stats);
  into.diag.max_trace_drift = std::max(into.diag.max_trace_drift, tr.stats.max_trace_drift);
  into.diag.rhs_norm_final = tr.stats.rhs_norm_final;
  into.diag.min_eigenvalue = tr.stats.min_eigenvalue;
}

EvolveOptions options_for(const SchemeConfig& cfg) {
  EvolveOptions o;
  o.dt = cfg.dt / cfg.kappa0;
  o.dt_cap = cfg.dt_cap / cfg.kappa0;
  o.renorm_interval = cfg.renorm_interval;
  o.check_positivity = cfg.check_positivity;
  if (cfg.checkpoints_per_step > 0) o.checkpoints = step_checkpoints(cfg.t_step / cfg.kappa0, cfg.checkpoints_per_step);
  return o;
}

FockOperator zero_operator(const ModeLayout& layout) {
  return FockOperator(layout, CMatrix<double>::Zero(layout.size(), layout.size()));
}

}  // namespace

Trajectory evolve(const DensityMatrix& rho0, const FockOperator& h, const std::vector<Dissipator>& jumps,
                  double t_final, const EvolveOptions& opts) {
  if (!(t_final >= 0) || !std::isfinite(t_final)) throw InvalidArgument("evolution time must be >= 0");
  if (opts.renorm_interval < 1) throw InvalidArgument("renormalisation interval must be >= 1");
  require_same_layout<double>(rho0.layout, h.layout);
  const Index D = rho0.dim();

  LindbladGenerator gen(h, jumps);
  Trajectory out;
  out.stats.spectral_radius = gen.spectral_radius(60);
  const double bound = kStabilityMargin * kRk4RealAxis / std::max(out.stats.spectral_radius, 1e-300);
  double dt = opts.dt > 0 ? opts.dt : std::min(opts.dt_cap, bound);
  if (opts.dt > bound / kStabilityMargin) {
    std::ostringstream os;
    os << "time step " << opts.dt << " exceeds the RK4 stability bound " << bound / kStabilityMargin;
    throw InvalidArgument(os.str());
  }
  const long n = t_final == 0 ? 0 : static_cast<long>(std::ceil(t_final / dt - 1e-9));
  dt = n ? t_final / n : 0.0;
  out.stats.dt = dt;
  out.stats.steps = n;

  std::vector<long> marks;
  for (double t : opts.checkpoints) {
    if (t < 0 || t > t_final * (1 + 1e-12)) throw InvalidArgument("checkpoint outside [0, t_final]");
    marks.push_back(dt > 0 ? std::lround(t / dt) : 0);
  }
  std::sort(marks.begin(), marks.end());

  SplitMatrix x(rho0.matrix), ya(D), yb(D), acc(D);
  const Index band = gen.input_band();
  size_t next_mark = 0;
  auto record = [&](long step) {
    while (next_mark < marks.size() && marks[next_mark] == step) {
      out.times.push_back(step * dt);
      out.states.push_back(to_density(rho0.layout, x));
      ++next_mark;
    }
  };
  record(0);

  for (long step = 1; step <= n; ++step) {
    const StageTarget s1[] = {{&ya, &x, dt / 2}, {&acc, nullptr, 1.0}};
    gen.apply_combine(x, s1);
    mirror_band(ya, band);
    const StageTarget s2[] = {{&yb, &x, dt / 2}, {&acc, &acc, 2.0}};
    gen.apply_combine(ya, s2);
    mirror_band(yb, band);
    const StageTarget s3[] = {{&ya, &x, dt}, {&acc, &acc, 2.0}};
    gen.apply_combine(yb, s3);
    mirror_band(ya, band);
    const StageTarget s4[] = {{&x, &x, dt / 6, &acc, dt / 6}};
    gen.apply_combine(ya, s4);
    mirror_band(x, band);

    if (step % opts.renorm_interval == 0 || step == n) {
      const double tr = x.trace_real();
      if (!std::isfinite(tr) || !std::isfinite(x.re(0, 0)))
        throw NumericalError("integration diverged at t = " + std::to_string(step * dt));
      out.stats.max_trace_drift = std::max(out.stats.max_trace_drift, std::abs(tr - 1.0));
      scale(x, 1.0 / tr);
    }
    record(step);
  }

  mirror_full(x);
  out.final_state = to_density(rho0.layout, x);
  SplitMatrix lx(D);
  gen.apply(x, lx);
  out.stats.rhs_norm_final = std::sqrt(lx.re.squaredNorm() + lx.im.squaredNorm());
  if (opts.check_positivity) {
    out.stats.min_eigenvalue = min_eigenvalue(out.final_state);
    if (out.stats.min_eigenvalue < -opts.negativity_tol) {
      std::ostringstream os;
      os << "state lost positivity: minimum eigenvalue " << out.stats.min_eigenvalue << " (dt = " << dt
         << ", spectral radius " << out.stats.spectral_radius << ")";
      throw NumericalError(os.str());
    }
  }
  return out;
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::switching:
      return "switching";
    case Scheme::two_dissipator:
      return "two_dissipator";
    case Scheme::full_switching:
      return "full_switching";
    case Scheme::full_two_dissipator:
      return "full_two_dissipator";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& s) {
  for (Scheme k : {Scheme::switching, Scheme::two_dissipator, Scheme::full_switching, Scheme::full_two_dissipator})
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown scheme '" + s + "'");
}

std::string to_string(InitKind k) {
  switch (k) {
    case InitKind::vacuum:
      return "vacuum";
    case InitKind::thermal:
      return "thermal";
    case InitKind::precooled:
      return "precooled";
  }
  return "?";
}

InitKind init_from_string(const std::string& s) {
  for (InitKind k : {InitKind::vacuum, InitKind::thermal, InitKind::precooled})
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown initial state '" + s + "'");
}

void NoiseConfig::validate() const {
  if (!(gamma >= 0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be >= 0");
  for (double n : n_th)
    if (!(n >= 0) || !std::isfinite(n)) throw InvalidArgument("thermal occupation must be >= 0");
}

void SchemeConfig::validate() const {
  target.validate();
  if (!(kappa0 > 0)) throw InvalidArgument("kappa0 must be > 0");
  if (!(t_step > 0)) throw InvalidArgument("step duration must be > 0");
  if (dt < 0 || !(dt_cap > 0)) throw InvalidArgument("time step must be > 0");
  if (renorm_interval < 1) throw InvalidArgument("renormalisation interval must be >= 1");
  if (checkpoints_per_step < 0) throw InvalidArgument("checkpoints per step must be >= 0");
  if (!(g_over_kappa > 0)) throw InvalidArgument("g/kappa must be > 0");
  if (cavity_dim < 2) throw InvalidArgument("cavity dimension must be >= 2");
}

std::vector<Dissipator> thermal_dissipators(const ModeLayout& layout, const NoiseConfig& noise, double kappa0) {
  noise.validate();
  std::vector<Dissipator> out;
  if (noise.gamma == 0.0) return out;
  const auto mech = layout.modes_of(ModeKind::mechanical);
  if (mech.size() != 2) throw InvalidArgument("bath needs exactly two mechanical modes");
  const double g = noise.gamma * kappa0;
  for (int j = 0; j < 2; ++j) {
    const FockOperator b = annihilation(layout, mech[j]);
    out.push_back({b, g * (noise.n_th[j] + 1.0)});
    if (noise.n_th[j] > 0) out.push_back({adjoint(b), g * noise.n_th[j]});
  }
  return out;
}

DensityMatrix initial_state(const SchemeConfig& cfg, const NoiseConfig& noise, const InitialState& init,
                            double* discarded) {
  const ModeLayout layout = cfg.target.layout();
  if (discarded) *discarded = 0;
  if (init.kind == InitKind::vacuum) return pure_density(vacuum(layout));
  const DensityMatrix th = thermal_density<double>(layout, {init.n_th[0], init.n_th[1]}, discarded);
  if (init.kind == InitKind::thermal) return th;
  return run_precool(cfg, noise, th).final_state;
}

RunResult run_precool(const SchemeConfig& cfg, const NoiseConfig& noise, const DensityMatrix& rho0) {
  cfg.validate();
  const ModeLayout& layout = rho0.layout;
  const auto bath = thermal_dissipators(layout, noise, cfg.kappa0);
  const FockOperator h = zero_operator(layout);
  const EvolveOptions opts = options_for(cfg);
  RunResult res;
  DensityMatrix rho = rho0;
  for (int j = 0; j < 2; ++j) {
    auto jumps = bath;
    jumps.push_back({annihilation(layout, layout.modes_of(ModeKind::mechanical)[j]), cfg.kappa0});
    const Trajectory tr = evolve(rho, h, jumps, cfg.t_step / cfg.kappa0, opts);
    merge(res, tr, j * cfg.t_step / cfg.kappa0, {});
    rho = tr.final_state;
  }
  res.final_state = rho;
  return res;
}

RunResult run_switching(const SchemeConfig& cfg, const NoiseConfig& noise, const InitialState& init) {
  cfg.validate();
  const ModeLayout layout = cfg.target.layout();
  RunResult res;
  DensityMatrix rho = initial_state(cfg, noise, init, &res.diag.discarded_weight);
  const auto bath = thermal_dissipators(layout, noise, cfg.kappa0);
  const FockOperator h = zero_operator(layout);
  const EvolveOptions opts = options_for(cfg);
  for (int j = 1; j <= 2; ++j) {
    auto jumps = bath;
    jumps.push_back({engineered_mode(cfg.target, j, layout), cfg.kappa0});
    const Trajectory tr = evolve(rho, h, jumps, cfg.t_step / cfg.kappa0, opts);
    merge(res, tr, (j - 1) * cfg.t_step / cfg.kappa0, {});
    rho = tr.final_state;
  }
  res.final_state = rho;
  return res;
}

RunResult run_two_dissipator(const SchemeConfig& cfg, const NoiseConfig& noise, const InitialState& init) {
  cfg.validate();
  const ModeLayout layout = cfg.target.layout();
  RunResult res;
  const DensityMatrix rho = initial_state(cfg, noise, init, &res.diag.discarded_weight);
  auto jumps = thermal_dissipators(layout, noise, cfg.kappa0);
  jumps.push_back({engineered_mode(cfg.target, 1, layout), cfg.kappa0});
  jumps.push_back({engineered_mode(cfg.target, 2, layout), cfg.kappa0});
  const Trajectory tr = evolve(rho, zero_operator(layout), jumps, cfg.t_step / cfg.kappa0, options_for(cfg));
  merge(res, tr, 0.0, {});
  res.final_state = tr.final_state;
  return res;
}

RunResult run_full_model(Scheme scheme, const SchemeConfig& cfg, const NoiseConfig& noise, const InitialState& init) {
  cfg.validate();
  const bool two = scheme == Scheme::two_dissipator || scheme == Scheme::full_two_dissipator;
  const int ncav = two ? 2 : 1;
  std::vector<int> dims(ncav, cfg.cavity_dim);
  std::vector<ModeKind> kinds(ncav, ModeKind::cavity);
  dims.push_back(cfg.target.dims[0]);
  dims.push_back(cfg.target.dims[1]);
  kinds.push_back(ModeKind::mechanical);
  kinds.push_back(ModeKind::mechanical);
  const ModeLayout layout(dims, kinds);
  const ModeLayout cav_layout(std::vector<int>(ncav, cfg.cavity_dim), std::vector<ModeKind>(ncav, ModeKind::cavity));
  const std::vector<int> keep = {ncav, ncav + 1};

  // kappa0 = 4 g^2 / kappa with g = r kappa.
  const double r = cfg.g_over_kappa;
  const double g = cfg.kappa0 / (4.0 * r);
  const double kappa = g / r;

  RunResult res;
  const DensityMatrix mech0 = initial_state(cfg, noise, init, &res.diag.discarded_weight);
  const DensityMatrix cav0 = pure_density(vacuum(cav_layout));
  CMatrix<double> m0 = tensor(FockOperator(cav_layout, cav0.matrix), FockOperator(mech0.layout, mech0.matrix)).matrix;
  DensityMatrix rho(layout, std::move(m0));

  auto base = thermal_dissipators(layout, noise, cfg.kappa0);
  for (int l = 0; l < ncav; ++l) base.push_back({annihilation(layout, l), kappa});
  const EvolveOptions opts = options_for(cfg);

  if (two) {
    const FockOperator h =
        scheme_hamiltonian({switching_couplings(cfg.target, 1, g), switching_couplings(cfg.target, 2, g)}, layout);
    const Trajectory tr = evolve(rho, h, base, cfg.t_step / cfg.kappa0, opts);
    merge(res, tr, 0.0, keep);
    rho = tr.final_state;
  } else {
    for (int j = 1; j <= 2; ++j) {
      const FockOperator h = scheme_hamiltonian({switching_couplings(cfg.target, j, g)}, layout);
      const Trajectory tr = evolve(rho, h, base, cfg.t_step / cfg.kappa0, opts);
      merge(res, tr, (j - 1) * cfg.t_step / cfg.kappa0, keep);
      rho = tr.final_state;
    }
  }
  res.final_state = partial_trace(rho, keep);
  return res;
}

RunResult run_scheme(Scheme scheme, const SchemeConfig& cfg, const NoiseConfig& noise, const InitialState& init) {
  switch (scheme) {
    case Scheme::switching:
      return run_switching(cfg, noise, init);
    case Scheme::two_dissipator:
      return run_two_dissipator(cfg, noise, init);
    case Scheme::full_switching:
      return run_full_model(Scheme::switching, cfg, noise, init);
    case Scheme::full_two_dissipator:
      return run_full_model(Scheme::two_dissipator, cfg, noise, init);
  }
  throw InvalidArgument("unknown scheme");
}

}  // namespace cpe
