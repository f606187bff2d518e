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

#include "qchar/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "qchar/errors.hpp"
#include "qchar/reconstruct.hpp"
#include "qchar/seed.hpp"
#include "qchar/signal_model.hpp"

namespace qchar {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void fill_reconstruction(RunRecord& rec, const ReconstructionResult& r, const CouplingParams& truth) {
  rec.physical = r.physical();
  rec.unphysical_reason = std::string(to_string(r.reason));
  const auto& h = r.hamiltonian ? r.hamiltonian : r.clamped;
  if (h) {
    rec.estimate = fold_detuning(*h);
    rec.relative_error = relative_error(rec.estimate, fold_detuning(truth));
  }
}

void fill_signal(RunRecord& rec, const Estimate& est) {
  rec.omega = est.omega;
  rec.delta_omega = est.delta_omega;
  rec.a = est.a;
}

}  // namespace

std::string_view to_string(Pipeline p) {
  switch (p) {
    case Pipeline::kTwoStep:
      return "two-step";
    case Pipeline::kDirect:
      return "direct";
    case Pipeline::kAdaptive:
      return "adaptive";
  }
  return "unknown";
}

Pipeline parse_pipeline(std::string_view name) {
  if (name == "two-step") return Pipeline::kTwoStep;
  if (name == "direct") return Pipeline::kDirect;
  if (name == "adaptive") return Pipeline::kAdaptive;
  throw InvalidParameter("unknown pipeline '" + std::string(name) + "' (expected two-step, direct or adaptive)");
}

CouplingParams reference_hamiltonian() { return {1.0, std::numbers::sqrt2, 0.0, 2.0}; }

void validate(const CampaignConfig& cfg) {
  if (cfg.nt_list.empty() || cfg.ne_list.empty()) throw InvalidParameter("Nt and Ne lists must be non-empty");
  if (cfg.repeats < 1) throw InvalidParameter("repeats must be at least 1");
  if (cfg.workers < 1) throw InvalidParameter("workers must be at least 1");
  if (!(cfg.t_max > cfg.t_min)) throw InvalidParameter("sampling window must have t_max > t_min");
  if (cfg.schedule != ScheduleKind::kLowDiscrepancy && cfg.schedule != ScheduleKind::kUniform) {
    throw InvalidParameter("campaign schedule must be low-discrepancy or uniform");
  }
  for (int nt : cfg.nt_list) {
    if (nt < 1) throw InvalidParameter("Nt entries must be positive");
  }
  for (auto ne : cfg.ne_list) {
    if (ne < 1) throw InvalidParameter("Ne entries must be positive");
  }
  build_hamiltonian(cfg.truth);  // throws on an invalid truth
}

std::uint64_t run_seed(std::uint64_t master, std::size_t nt_index, std::size_t ne_index, int repeat) {
  return derive_seed(master, {static_cast<std::uint64_t>(nt_index), static_cast<std::uint64_t>(ne_index),
                              static_cast<std::uint64_t>(repeat)});
}

RunRecord run_single(const CampaignConfig& cfg, std::size_t nt_index, std::size_t ne_index, int repeat) {
  RunRecord rec;
  rec.nt_index = nt_index;
  rec.ne_index = ne_index;
  rec.repeat = repeat;
  rec.seed = run_seed(cfg.seed, nt_index, ne_index, repeat);
  rec.omega = rec.delta_omega = kNaN;
  rec.a.fill(kNaN);
  rec.relative_error = rec.preliminary_error = rec.two_step_error = kNaN;

  const int nt = cfg.nt_list.at(nt_index);
  const std::int64_t ne = cfg.ne_list.at(ne_index);
  try {
    if (cfg.fault_hook) cfg.fault_hook(nt_index, ne_index, repeat);
    const Hamiltonian3 h = build_hamiltonian(cfg.truth);

    if (cfg.pipeline == Pipeline::kAdaptive) {
      AdaptiveConfig ac = cfg.adaptive;
      ac.t_min = cfg.t_min;
      ac.t_max = cfg.t_max;
      ac.preliminary_count = nt;
      ac.preliminary_shots = ne;
      ac.grid = cfg.grid;
      ac.direct = cfg.direct;
      const AdaptiveReport rep = adaptive_characterize(simulated_source(h, rec.seed), ac, cfg.truth);
      if (!rep.final_estimate) throw std::runtime_error("adaptive loop produced no estimate");
      fill_signal(rec, *rep.final_estimate);
      if (rep.final_reconstruction) fill_reconstruction(rec, *rep.final_reconstruction, cfg.truth);
      rec.preliminary_error = rep.preliminary_error.value_or(kNaN);
      rec.two_step_error = rep.final_two_step_error.value_or(kNaN);
      if (rep.final_direct) {
        rec.physical = true;
        rec.unphysical_reason = "none";
        rec.estimate = fold_detuning(polar_to_couplings(rep.final_direct->polar));
        rec.relative_error = rep.final_direct_error.value_or(kNaN);
      }
      rec.ok = true;
      return rec;
    }

    SamplingSchedule sched;
    sched.kind = cfg.schedule;
    sched.t_min = cfg.t_min;
    sched.t_max = cfg.t_max;
    sched.count = nt;
    const DataTrace trace = simulate_trace(h, schedule_times(sched), ne, rec.seed);

    if (cfg.pipeline == Pipeline::kTwoStep) {
      const SpectralFit fit = estimate_spectral(trace, cfg.grid);
      fill_signal(rec, fit.estimate);
      fill_reconstruction(rec, reconstruct_hamiltonian(fit.estimate), cfg.truth);
    } else {
      const DirectEstimate est = estimate_direct(trace, cfg.direct).estimate;
      const CouplingParams c = polar_to_couplings(est.polar);
      const SignalParams sp = canonicalize(signal_from_hamiltonian(build_hamiltonian(c)));
      rec.omega = sp.omega;
      rec.delta_omega = sp.delta_omega;
      rec.a = sp.a;
      rec.physical = true;
      rec.estimate = fold_detuning(c);
      rec.relative_error = relative_error(rec.estimate, fold_detuning(cfg.truth));
    }
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

double sample_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double median_finite(std::span<const double> v) {
  std::vector<double> f;
  for (double x : v) {
    if (std::isfinite(x)) f.push_back(x);
  }
  if (f.empty()) return kNaN;
  std::sort(f.begin(), f.end());
  const std::size_t n = f.size();
  return n % 2 ? f[n / 2] : 0.5 * (f[n / 2 - 1] + f[n / 2]);
}

CellSummary summarize_cell(int nt, std::int64_t ne, std::span<const RunRecord> runs) {
  CellSummary c;
  c.nt = nt;
  c.ne = ne;
  c.runs = static_cast<int>(runs.size());
  std::vector<double> w, dw, err;
  std::array<std::vector<double>, 4> a;
  for (const RunRecord& r : runs) {
    if (!r.ok) {
      ++c.failures;
      continue;
    }
    if (!r.physical) ++c.unphysical;
    if (std::isfinite(r.omega) && std::isfinite(r.delta_omega)) {
      w.push_back(r.omega);
      dw.push_back(r.delta_omega);
      for (int k = 0; k < 4; ++k) a[k].push_back(r.a[k]);
    }
    err.push_back(r.relative_error);
  }
  c.std_omega = sample_std(w);
  c.std_delta_omega = sample_std(dw);
  for (int k = 0; k < 4; ++k) c.std_a[k] = sample_std(a[k]);
  c.median_relative_error = median_finite(err);
  return c;
}

CampaignResult run_campaign(const CampaignConfig& cfg) {
  validate(cfg);
  CampaignResult result;
  result.nt_list = cfg.nt_list;
  result.ne_list = cfg.ne_list;
  result.repeats = cfg.repeats;
  result.seed = cfg.seed;
  result.pipeline = cfg.pipeline;

  const std::size_t n_ne = cfg.ne_list.size();
  const auto reps = static_cast<std::size_t>(cfg.repeats);
  const std::size_t total = cfg.nt_list.size() * n_ne * reps;
  result.runs.resize(total);

  // Each job writes only its own slot, so the result does not depend on scheduling.
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      const std::size_t r = job % reps;
      const std::size_t cell = job / reps;
      result.runs[job] = run_single(cfg, cell / n_ne, cell % n_ne, static_cast<int>(r));
    }
  };
  const unsigned n_threads = std::min<std::size_t>(cfg.workers, total);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < cfg.nt_list.size(); ++i) {
    for (std::size_t j = 0; j < n_ne; ++j) {
      const std::size_t first = (i * n_ne + j) * reps;
      result.cells.push_back(summarize_cell(cfg.nt_list[i], cfg.ne_list[j],
                                            std::span<const RunRecord>(result.runs).subspan(first, reps)));
    }
  }
  return result;
}

}  // namespace qchar
