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

#include "cpe/drive_planner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cpe {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

bool finite(double x) { return std::isfinite(x); }

// Cavity response denominator kappa/2 + i(-Delta + sum_j g_L Q + g_Q Q^2).
cd response(const PhysicalParams& p, int cav, double omega, const std::array<double, 2>& q) {
  double shift = 0;
  for (int j = 0; j < 2; ++j) shift += p.g_lin[cav][j] * q[j] + p.g_quad[cav][j] * q[j] * q[j];
  const double delta = omega - p.cavities[cav].omega_c;
  return {p.cavities[cav].kappa / 2, -delta + shift};
}

std::vector<cd> alphas(const PhysicalParams& p, const std::array<double, 2>& q) {
  std::vector<cd> out;
  for (const auto& d : p.drives) out.push_back(-kI * d.epsilon / response(p, d.cavity, d.omega, q));
  return out;
}

std::array<double, 2> positions(const PhysicalParams& p, const std::vector<int>& cav, const std::vector<cd>& alpha) {
  std::vector<double> n(p.cavities.size(), 0.0);
  for (size_t k = 0; k < alpha.size(); ++k) n[cav[k]] += std::norm(alpha[k]);
  std::array<double, 2> q{};
  for (int j = 0; j < 2; ++j) {
    double num = 0, den = p.mechanics[j].omega;
    for (size_t l = 0; l < n.size(); ++l) {
      num += p.g_lin[l][j] * n[l];
      den += 2 * p.g_quad[l][j] * n[l];
    }
    if (!(den > 0)) throw NumericalError("mechanical mode " + std::to_string(j + 1) + " loses its restoring force");
    q[j] = -num / den;
  }
  return q;
}

std::vector<int> drive_cavities(const PhysicalParams& p) {
  std::vector<int> c;
  for (const auto& d : p.drives) c.push_back(d.cavity);
  return c;
}

double max_diff(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1]));
}

double max_abs(const std::array<double, 2>& a) { return std::max(std::abs(a[0]), std::abs(a[1])); }

}  // namespace

void PhysicalParams::validate() const {
  if (cavities.empty()) throw InvalidArgument("at least one cavity is required");
  for (const auto& c : cavities)
    if (!(c.kappa > 0) || !finite(c.omega_c)) throw InvalidArgument("cavity linewidth must be > 0");
  for (const auto& m : mechanics)
    if (!(m.omega > 0) || !(m.gamma >= 0)) throw InvalidArgument("mechanical frequency must be > 0, damping >= 0");
  if (mechanics[0].omega == mechanics[1].omega) throw InvalidArgument("mechanical frequencies must differ");
  if (g_lin.size() != cavities.size() || g_quad.size() != cavities.size())
    throw InvalidArgument("coupling arrays must have one entry per cavity");
  for (size_t l = 0; l < cavities.size(); ++l)
    for (int j = 0; j < 2; ++j)
      if (!finite(g_lin[l][j]) || !finite(g_quad[l][j])) throw InvalidArgument("non-finite coupling");
  for (const auto& d : drives) {
    if (d.cavity < 0 || d.cavity >= static_cast<int>(cavities.size()))
      throw InvalidArgument("drive addresses a missing cavity");
    if (!finite(d.omega) || !finite(d.epsilon.real()) || !finite(d.epsilon.imag()))
      throw InvalidArgument("non-finite drive");
  }
}

SteadyState classical_steady_state(const PhysicalParams& p, const SolverOptions& opts) {
  p.validate();
  const auto cav = drive_cavities(p);
  SteadyState s;
  double diff = 0;
  bool converged = false;
  for (s.iterations = 1; s.iterations <= opts.max_iterations; ++s.iterations) {
    const auto q = positions(p, cav, alphas(p, s.q0));
    diff = max_diff(q, s.q0);
    s.q0 = q;
    if (diff <= opts.rel_tol * max_abs(q)) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "classical steady state did not converge after " << opts.max_iterations << " iterations (last change "
       << diff << ")";
    throw NumericalError(os.str());
  }
  s.alpha = alphas(p, s.q0);
  s.residual = max_diff(positions(p, cav, s.alpha), s.q0);
  for (size_t k = 0; k < p.drives.size(); ++k) {
    const auto& d = p.drives[k];
    s.residual = std::max(s.residual, std::abs(s.alpha[k] * response(p, d.cavity, d.omega, s.q0) + kI * d.epsilon));
  }
  return s;
}

std::vector<std::array<double, 2>> linear_gain(const PhysicalParams& p, const SteadyState& s) {
  std::vector<std::array<double, 2>> g(p.cavities.size());
  for (size_t l = 0; l < g.size(); ++l)
    for (int j = 0; j < 2; ++j) g[l][j] = (p.g_lin[l][j] + 2 * p.g_quad[l][j] * s.q0[j]) / std::sqrt(2.0);
  return g;
}

std::vector<std::array<double, 2>> quadratic_gain(const PhysicalParams& p) {
  std::vector<std::array<double, 2>> g(p.cavities.size());
  for (size_t l = 0; l < g.size(); ++l)
    for (int j = 0; j < 2; ++j) g[l][j] = p.g_quad[l][j] / 2;
  return g;
}

double slot_detuning(const PhysicalParams& p, int mode, int slot) {
  static constexpr double kFactor[5] = {-1, 1, -2, 2, 0};
  if (mode < 0 || mode > 1 || slot < 0 || slot > 4) throw InvalidArgument("slot index out of range");
  return kFactor[slot] * p.mechanics[mode].omega;
}

std::vector<CouplingTable> effective_couplings(const PhysicalParams& p, const SteadyState& s,
                                               double slot_rel_tol) {
  p.validate();
  if (s.alpha.size() != p.drives.size()) throw InvalidArgument("steady state does not match the drive list");
  const auto gl = linear_gain(p, s);
  const auto gq = quadratic_gain(p);
  std::vector<CouplingTable> out(p.cavities.size());
  for (size_t k = 0; k < p.drives.size(); ++k) {
    const auto& d = p.drives[k];
    const double delta = d.omega - p.cavities[d.cavity].omega_c;
    bool matched = false;
    for (int j = 0; j < 2; ++j)
      for (int slot = 0; slot < 5; ++slot) {
        if (std::abs(delta - slot_detuning(p, j, slot)) > slot_rel_tol * p.mechanics[j].omega) continue;
        out[d.cavity].g[j][slot] += s.alpha[k] * (slot < 2 ? gl[d.cavity][j] : gq[d.cavity][j]);
        matched = true;
      }
    if (!matched) {
      std::ostringstream os;
      os << "drive " << k << " (detuning " << delta << ") matches no sideband slot";
      throw InvalidArgument(os.str());
    }
  }
  return out;
}

std::vector<Drive> invert_for_drives(const PhysicalParams& p, const std::vector<CouplingTable>& target,
                                     const SolverOptions& opts) {
  p.validate();
  if (target.size() != p.cavities.size()) throw InvalidArgument("one coupling table per cavity is required");
  const auto gq = quadratic_gain(p);

  struct Tone {
    int cavity;
    double delta;
    cd alpha;
  };
  const auto tones_for = [&](const SteadyState& s) {
    const auto gl = linear_gain(p, s);
    std::vector<Tone> tones;
    for (size_t l = 0; l < target.size(); ++l) {
      const int cav = static_cast<int>(l);
      for (int j = 0; j < 2; ++j)
        for (int slot = 0; slot < 4; ++slot) {
          const cd t = target[l].g[j][slot];
          if (t == 0.0) continue;
          const double gain = slot < 2 ? gl[l][j] : gq[l][j];
          if (gain == 0.0) {
            std::ostringstream os;
            os << "cavity " << l << ", mode " << j + 1 << ", process " << slot
               << ": target is nonzero but the coupling gain vanishes";
            throw InvalidArgument(os.str());
          }
          tones.push_back({cav, slot_detuning(p, j, slot), t / gain});
        }
      // {b, b^dag} processes of both modes share the resonant tone.
      cd shared = 0;
      int owner = -1;
      for (int j = 0; j < 2; ++j) {
        const cd t = target[l].g[j][4];
        if (t == 0.0) continue;
        if (gq[l][j] == 0.0)
          throw InvalidArgument("cavity " + std::to_string(l) + ", mode " + std::to_string(j + 1) +
                                ": {b, b^dag} target needs a quadratic coupling");
        const cd a = t / gq[l][j];
        if (owner >= 0 && std::abs(a - shared) > 1e-6 * std::abs(shared))
          throw InvalidArgument("cavity " + std::to_string(l) + ": {b, b^dag} targets of the two modes are incompatible");
        shared = a;
        owner = j;
      }
      if (owner >= 0) {
        const int other = 1 - owner;
        if (target[l].g[other][4] == 0.0 && gq[l][other] != 0.0)
          throw InvalidArgument("cavity " + std::to_string(l) + ": the resonant tone also drives mode " +
                                std::to_string(other + 1) + ", whose {b, b^dag} target is zero");
        tones.push_back({cav, 0.0, shared});
      }
    }
    for (size_t a = 0; a < tones.size(); ++a)
      for (size_t b = a + 1; b < tones.size(); ++b)
        if (tones[a].cavity == tones[b].cavity && std::abs(tones[a].delta - tones[b].delta) <=
                                                      1e-6 * std::max(p.mechanics[0].omega, p.mechanics[1].omega))
          throw InvalidArgument("two target processes need the same tone on cavity " +
                                std::to_string(tones[a].cavity));
    return tones;
  };

  SteadyState s;
  std::vector<Tone> tones;
  bool converged = false;
  for (s.iterations = 1; s.iterations <= opts.max_iterations; ++s.iterations) {
    tones = tones_for(s);
    std::vector<int> cav;
    std::vector<cd> alpha;
    for (const auto& t : tones) {
      cav.push_back(t.cavity);
      alpha.push_back(t.alpha);
    }
    const auto q = positions(p, cav, alpha);
    const double diff = max_diff(q, s.q0);
    s.q0 = q;
    if (diff <= opts.rel_tol * max_abs(q)) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NumericalError("drive inversion did not converge");
  tones = tones_for(s);

  std::vector<Drive> drives;
  for (const auto& t : tones) {
    const double omega = p.cavities[t.cavity].omega_c + t.delta;
    drives.push_back({t.cavity, kI * t.alpha * response(p, t.cavity, omega, s.q0), omega});
  }

  PhysicalParams check = p;
  check.drives = drives;
  const auto got = effective_couplings(check, classical_steady_state(check, opts));
  double scale = 0, err = 0;
  for (size_t l = 0; l < target.size(); ++l)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 5; ++k) {
        scale = std::max(scale, std::abs(target[l].g[j][k]));
        err = std::max(err, std::abs(target[l].g[j][k] - got[l].g[j][k]));
      }
  if (err > 1e-6 * scale) {
    std::ostringstream os;
    os << "drive inversion round trip misses the target by " << err << " (scale " << scale << ")";
    throw NumericalError(os.str());
  }
  return drives;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::warn:
      return "warn";
    case Verdict::fail:
      return "fail";
  }
  return "?";
}

WeakCouplingReport weak_coupling_check(const PhysicalParams& p, const SteadyState& s, double warn_at,
                                       double fail_at) {
  p.validate();
  if (s.alpha.size() != p.drives.size()) throw InvalidArgument("steady state does not match the drive list");
  WeakCouplingReport r;
  for (size_t a = 0; a < p.drives.size(); ++a)
    for (size_t b = a + 1; b < p.drives.size(); ++b) {
      const int l = p.drives[a].cavity;
      if (p.drives[b].cavity != l) continue;
      for (int j = 0; j < 2; ++j) {
        const double g = std::max(std::abs(p.g_lin[l][j]), std::abs(p.g_quad[l][j]));
        const double ratio = g * std::abs(s.alpha[a]) * std::abs(s.alpha[b]) / p.mechanics[j].omega;
        if (ratio > r.max_ratio) {
          r.max_ratio = ratio;
          r.cavity = l;
          r.mode = j;
          r.drive_a = static_cast<int>(a);
          r.drive_b = static_cast<int>(b);
        }
      }
    }
  r.verdict = r.max_ratio >= fail_at ? Verdict::fail : r.max_ratio >= warn_at ? Verdict::warn : Verdict::pass;
  return r;
}

FockOperator linearized_hamiltonian(const std::vector<CouplingTable>& tables, const ModeLayout& layout) {
  return scheme_hamiltonian(tables, layout);
}

}  // namespace cpe
