#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "chain.hpp"
#include "errors.hpp"
#include "measures.hpp"
#include "propagator.hpp"
#include "state.hpp"

namespace matryoshka {

inline constexpr double kSweepMaxRatio = 0.1;

struct SweepPoint {
  double b1_ratio;
  double b2_ratio;
  double fidelity;
};

struct SweepResult {
  double b3_ratio = 0.0;
  std::vector<SweepPoint> grid;  // sorted by (b1, b2)
  double min_fidelity = 1.0;
  double mean_fidelity = 1.0;
  double runtime_seconds = 0.0;
};

struct SweepOptions {
  int workers = 1;
  std::optional<double> evolution_time;  // defaults to t_star(lambda)
};

// Field ratios are measured against the first bond's YY coupling.
inline double reference_coupling(const ChainSpec& spec) {
  const auto c = spec.couplings();
  const double j = c.j_y.front();
  if (j == 0.0) throw ValidationError("reference coupling J_Y,1 is zero");
  return j;
}

// Evolves |0..0> under the spec's couplings without fields; the ideal
// reference for all field-perturbation fidelities.
inline StateVector unperturbed_reference(const ChainSpec& spec, double t) {
  ChainSpec clean = spec;
  clean.fields_b.assign(static_cast<std::size_t>(spec.n_sites), 0.0);
  return Propagator(build_hamiltonian(clean)).evolve(StateVector::all_zero(spec.n_sites), t).phase_normalized();
}

// F = |<mu|mu_B>| with B_i = ratio_i * J_Y,1.
inline double perturbed_fidelity(const ChainSpec& base, const std::vector<double>& ratios, const StateVector& reference,
                                 double t) {
  if (ratios.size() != static_cast<std::size_t>(base.n_sites))
    throw DimensionError("need one field ratio per site");
  const double j = reference_coupling(base);
  std::vector<double> b(ratios.size());
  std::transform(ratios.begin(), ratios.end(), b.begin(), [j](double r) { return r * j; });
  const Propagator prop(build_hamiltonian(base.with_fields(std::move(b))));
  return state_fidelity(reference, prop.evolve(StateVector::all_zero(base.n_sites), t));
}

inline std::vector<double> grid_axis(int grid_points) {
  std::vector<double> axis(static_cast<std::size_t>(grid_points));
  for (int k = 0; k < grid_points; ++k) axis[k] = kSweepMaxRatio * k / (grid_points - 1);
  return axis;
}

// Fidelity surfaces over (B1/J, B2/J) in [0, 0.1]^2, one per B3/J slice.
// Results are ordered by (b3, b1, b2) regardless of the worker count.
inline std::vector<SweepResult> field_sweep(const ChainSpec& base, int grid_points, std::vector<double> b3_ratios,
                                            const SweepOptions& opts = {}) {
  base.validate();
  if (base.n_sites != 3) throw ValidationError("field_sweep is defined for the three-site chain");
  if (base.pattern != CouplingPattern::MatryoshkaAlternating)
    throw ValidationError("field_sweep needs the matryoshka coupling pattern");
  if (grid_points < 2) throw ValidationError("grid_points must be >= 2");
  for (double r : b3_ratios)
    if (!(r >= 0.0 && r <= kSweepMaxRatio)) throw ValidationError("b3 ratios must lie in [0, 0.1]");
  std::sort(b3_ratios.begin(), b3_ratios.end());

  const double t = opts.evolution_time.value_or(t_star(base.lambda));
  const StateVector reference = unperturbed_reference(base, t);
  const auto axis = grid_axis(grid_points);
  const std::size_t per_slice = axis.size() * axis.size();

  std::vector<SweepResult> results;
  for (double b3 : b3_ratios) {
    const auto start = std::chrono::steady_clock::now();
    SweepResult r;
    r.b3_ratio = b3;
    r.grid.resize(per_slice);
    auto work = [&](std::size_t begin, std::size_t stride) {
      for (std::size_t k = begin; k < per_slice; k += stride) {
        const double b1 = axis[k / axis.size()];
        const double b2 = axis[k % axis.size()];
        r.grid[k] = {b1, b2, perturbed_fidelity(base, {b1, b2, b3}, reference, t)};
      }
    };
    const auto workers = static_cast<std::size_t>(std::max(1, opts.workers));
    if (workers == 1) {
      work(0, 1);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
      for (auto& th : pool) th.join();
    }
    double sum = 0.0;
    r.min_fidelity = 1.0;
    for (const auto& p : r.grid) {
      r.min_fidelity = std::min(r.min_fidelity, p.fidelity);
      sum += p.fidelity;
    }
    r.mean_fidelity = sum / static_cast<double>(per_slice);
    r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(r));
  }
  return results;
}

// Reported operating point of the three-site device (MHz): J_Y,1 = J_X,2 = 270,
// B = (7.8, 19.6, 12.6).
inline constexpr double kDeviceCouplingMHz = 270.0;
inline constexpr std::array<double, 3> kDeviceFieldsMHz = {7.8, 19.6, 12.6};

// F at the reported field ratios, with the fields multiplied by field_scale.
inline double paper_point_check(double field_scale = 1.0) {
  const ChainSpec base = ChainSpec::matryoshka(3, kDeviceCouplingMHz / std::sqrt(2.0));
  const double t = t_star(base.lambda);
  std::vector<double> ratios;
  for (double b : kDeviceFieldsMHz) ratios.push_back(field_scale * b / kDeviceCouplingMHz);
  return perturbed_fidelity(base, ratios, unperturbed_reference(base, t), t);
}

inline std::string format_sig12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline constexpr const char* kSweepCsvHeader = "b1_ratio,b2_ratio,b3_ratio,fidelity";

// One comment line (if given), the header, then one row per grid point.
inline void write_sweep_csv(std::ostream& out, const SweepResult& r, const std::string& comment = {}) {
  if (!comment.empty()) out << "# " << comment << "\n";
  out << kSweepCsvHeader << "\n";
  for (const auto& p : r.grid)
    out << format_sig12(p.b1_ratio) << ',' << format_sig12(p.b2_ratio) << ',' << format_sig12(r.b3_ratio) << ','
        << format_sig12(p.fidelity) << "\n";
}

}  // namespace matryoshka
