// Copyright 2026 The qchar Authors
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

#include "qchar/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "qchar/errors.hpp"
#include "qchar/seed.hpp"

namespace qchar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::optional<double> reconstruction_error(const ReconstructionResult& r, const CouplingParams& truth) {
  const auto& h = r.hamiltonian ? r.hamiltonian : r.clamped;
  if (!h) return std::nullopt;
  return relative_error(fold_detuning(*h), fold_detuning(truth));
}

}  // namespace

UncertaintyMetrics uncertainty_from_estimate(const Estimate& est) {
  UncertaintyMetrics m;
  m.margin = est.margin;
  const Eigen::Matrix2d k = -est.curvature;
  const bool usable = k.allFinite() && k(0, 0) > 0.0 && k.determinant() > 0.0;
  if (!usable) {
    m.flat = true;
    m.curvature_eigenvalues = {kInf, kInf};
    m.anisotropy = kInf;
    m.sigma_omega = kInf;
    m.sigma_delta_omega = kInf;
    return m;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(k);
  m.curvature_eigenvalues = {solver.eigenvalues()(0), solver.eigenvalues()(1)};
  m.anisotropy = m.curvature_eigenvalues[1] / m.curvature_eigenvalues[0];
  // L is in decades; ln L = L ln 10.
  const Eigen::Matrix2d cov = (std::numbers::ln10 * k).inverse();
  m.sigma_omega = std::sqrt(cov(0, 0));
  m.sigma_delta_omega = std::sqrt(cov(1, 1));
  return m;
}

UncertaintyMetrics uncertainty_from_surface(const LikelihoodSurface& s) {
  return uncertainty_from_estimate(find_peak(s));
}

ModelEnsemble make_ensemble(std::span<const SignalParams> models, std::span<const double> log_likelihoods) {
  if (models.size() != log_likelihoods.size()) {
    throw InvalidParameter("ensemble models and likelihoods differ in length");
  }
  ModelEnsemble e;
  if (models.empty()) return e;
  const double lmax = *std::max_element(log_likelihoods.begin(), log_likelihoods.end());
  double total = 0.0;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const double w = std::pow(10.0, log_likelihoods[i] - lmax);
    e.members.push_back({models[i], log_likelihoods[i], w});
    total += w;
  }
  for (auto& m : e.members) m.weight /= total;
  std::stable_sort(e.members.begin(), e.members.end(),
                   [](const EnsembleMember& a, const EnsembleMember& b) { return a.weight > b.weight; });
  return e;
}

ModelEnsemble ensemble_from_surface(const LikelihoodSurface& s, const DataTrace& d,
                                    const EnsembleOptions& options) {
  struct Cell {
    std::size_t i, j;
    double value;
  };
  std::vector<Cell> cells;
  double lmax = -kInf;
  for (std::size_t i = 0; i < s.omega_axis.size(); ++i) {
    for (std::size_t j = 0; j < s.delta_axis.size(); ++j) {
      const double v = s.at(i, j);
      if (std::isfinite(v)) {
        cells.push_back({i, j, v});
        lmax = std::max(lmax, v);
      }
    }
  }
  std::erase_if(cells, [&](const Cell& c) { return c.value < lmax - options.decades; });
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.value > b.value; });
  if (cells.size() > options.max_members) cells.resize(options.max_members);

  std::vector<SignalParams> models;
  std::vector<double> logliks;
  for (const Cell& c : cells) {
    const double w = s.omega_axis[c.i];
    const double dw = s.delta_axis[c.j];
    try {
      const OrthoProjection p = orthonormal_projection(design_matrix(w, dw, d.times()), d);
      models.push_back({{p.a(0), p.a(1), p.a(2), p.a(3)}, w, dw});
      logliks.push_back(c.value);
    } catch (const DegenerateBasis&) {
    }
  }
  return make_ensemble(models, logliks);
}

TimeSelection ensemble_variance_times(const ModelEnsemble& ensemble, std::span<const double> candidates,
                                      std::size_t k) {
  if (ensemble.members.empty()) throw InvalidParameter("ensemble is empty");
  if (candidates.empty()) throw InvalidParameter("no candidate times");

  std::vector<double> variance(candidates.size(), 0.0);
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    double mean = 0.0;
    for (const auto& m : ensemble.members) mean += m.weight * eval_signal(m.model, candidates[c]);
    double var = 0.0;
    for (const auto& m : ensemble.members) {
      const double dev = eval_signal(m.model, candidates[c]) - mean;
      var += m.weight * dev * dev;
    }
    variance[c] = var;
  }

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (variance[a] != variance[b]) return variance[a] > variance[b];
    return candidates[a] < candidates[b];
  });

  TimeSelection sel;
  sel.truncated = k > candidates.size();
  const std::size_t take = std::min(k, candidates.size());
  for (std::size_t i = 0; i < take; ++i) {
    sel.times.push_back(candidates[order[i]]);
    sel.variances.push_back(variance[order[i]]);
  }
  sel.degenerate = ensemble.members.size() < 2 || variance[order.front()] == 0.0;
  return sel;
}

std::vector<double> halfperiod_times(double omega_est, int count, double t_start) {
  if (!(omega_est > 0.0) || !std::isfinite(omega_est)) {
    throw InvalidParameter("half-period spacing needs a positive frequency");
  }
  if (count < 0) throw InvalidParameter("count must be non-negative");
  const double half = std::numbers::pi / omega_est;
  // Guard against ceil() overshooting by one when t_start is itself a multiple.
  auto j0 = static_cast<long>(std::ceil(t_start / half - 1e-12));
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = static_cast<double>(j0 + i) * half;
  return out;
}

MeasurementSource simulated_source(const Hamiltonian3& h, std::uint64_t seed) {
  return [h, seed](std::span<const double> times, std::int64_t shots, std::uint64_t stream) {
    return simulate_trace(h, times, shots, derive_seed(seed, {stream}));
  };
}

AdaptiveReport adaptive_characterize(const MeasurementSource& source, const AdaptiveConfig& config,
                                     std::optional<CouplingParams> truth) {
  if (config.rounds < 0) throw InvalidParameter("rounds must be non-negative");
  AdaptiveReport report;
  report.truth = truth;

  const auto prelim_times = low_discrepancy_times(config.preliminary_count, config.t_min, config.t_max);
  DataTrace trace = source(prelim_times, config.preliminary_shots, 0);

  SpectralGridOptions grid = config.grid;
  std::optional<SpectralFit> last_fit;

  auto fit_round = [&](RoundRecord& rec) {
    try {
      SpectralFit fit = estimate_spectral(trace, grid);
      rec.estimate = fit.estimate;
      rec.uncertainty = uncertainty_from_estimate(fit.estimate);
      if (config.keep_surfaces) rec.surface = fit.surface;
      // Later rounds stay centred on the preliminary frequency.
      grid.omega_center = fit.omega_center;
      last_fit = std::move(fit);
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    rec.cumulative_points = trace.size();
    rec.cumulative_shots = trace.total_shots();
  };

  RoundRecord prelim;
  prelim.round = 0;
  prelim.chosen_times = prelim_times;
  prelim.round_shots = config.preliminary_shots * static_cast<std::int64_t>(prelim_times.size());
  fit_round(prelim);
  report.rounds.push_back(prelim);
  if (prelim.estimate) {
    report.preliminary_estimate = prelim.estimate;
    report.preliminary_reconstruction = reconstruct_hamiltonian(*prelim.estimate);
  }

  report.stop_reason = "rounds exhausted";
  for (int r = 1; r <= config.rounds; ++r) {
    if (!last_fit) {
      report.stop_reason = "no usable estimate to plan from";
      break;
    }
    const auto& last_unc = report.rounds.back().uncertainty;
    if (config.sigma_delta_omega_target && last_unc && !last_unc->flat &&
        last_unc->sigma_delta_omega <= *config.sigma_delta_omega_target) {
      report.stop_reason = "uncertainty target reached";
      break;
    }

    RoundRecord rec;
    rec.round = r;
    try {
      const Estimate& est = last_fit->estimate;
      if (config.strategy == RefineStrategy::kHalfPeriod) {
        const double half = std::numbers::pi / est.omega;
        const double start = std::max(config.t_min, half);
        int count = config.refine_count;
        if (count == 0) {
          const auto first = static_cast<long>(std::ceil(start / half - 1e-12));
          count = std::max(0, static_cast<int>(std::floor(config.t_max / half) - first + 1));
        }
        rec.chosen_times = halfperiod_times(est.omega, count, start);
      } else {
        const ModelEnsemble ens = ensemble_from_surface(last_fit->surface, trace, config.ensemble);
        const auto candidates = uniform_times(config.candidate_count, config.t_min, config.t_max);
        const std::size_t k = config.refine_count > 0 ? static_cast<std::size_t>(config.refine_count) : 16;
        rec.chosen_times = ensemble_variance_times(ens, candidates, k).times;
      }
      if (!rec.chosen_times.empty()) {
        const DataTrace fresh = source(rec.chosen_times, config.refine_shots, static_cast<std::uint64_t>(r));
        rec.round_shots = fresh.total_shots();
        trace = merge_traces(trace, fresh);
      }
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    if (rec.error.empty()) {
      fit_round(rec);
    } else {
      rec.cumulative_points = trace.size();
      rec.cumulative_shots = trace.total_shots();
    }
    report.rounds.push_back(std::move(rec));
  }

  report.final_trace = trace;
  if (last_fit) {
    report.final_estimate = last_fit->estimate;
    report.final_reconstruction = reconstruct_hamiltonian(last_fit->estimate);
  }
  if (config.direct_mle) {
    report.final_direct = estimate_direct(trace, config.direct).estimate;
  }

  if (truth) {
    if (report.preliminary_reconstruction) {
      report.preliminary_error = reconstruction_error(*report.preliminary_reconstruction, *truth);
    }
    if (report.final_reconstruction) {
      report.final_two_step_error = reconstruction_error(*report.final_reconstruction, *truth);
    }
    if (report.final_direct) {
      report.final_direct_error =
          relative_error(fold_detuning(polar_to_couplings(report.final_direct->polar)), fold_detuning(*truth));
    }
  }
  return report;
}

}  // namespace qchar
