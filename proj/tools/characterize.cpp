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

// characterize: command-line front end for simulation, estimation and sweeps.
//
//   characterize simulate --seed 7 --nt 100 --ne 100 --out run/
//   characterize estimate-spectral --trace run/trace.csv --out run/
//   characterize campaign --config sweep.json --workers 4 --out sweep/
//
// Log verbosity comes from CHARACTERIZER_LOG (trace, debug, info, warn, error, off).

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "qchar/adaptive.hpp"
#include "qchar/campaign.hpp"
#include "qchar/config.hpp"
#include "qchar/direct_mle.hpp"
#include "qchar/errors.hpp"
#include "qchar/io.hpp"
#include "qchar/measurement.hpp"
#include "qchar/reconstruct.hpp"
#include "qchar/spectral_estimator.hpp"

namespace fs = std::filesystem;
using namespace qchar;

namespace {

struct Flags {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<int> nt;
  std::optional<std::int64_t> ne;
  std::optional<std::string> range;
  std::optional<std::string> pipeline;
  std::optional<std::string> out;
  std::optional<unsigned> workers;
  std::optional<std::string> truth;  // "d1,d2,delta"
  std::optional<std::string> polar;  // "Omega,alpha,epsilon"
  std::optional<int> repeats;
  std::optional<int> rounds;
  std::string trace;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file; flags override its values");
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--nt", f.nt, "number of sample times");
  sub->add_option("--ne", f.ne, "shots per sample time");
  sub->add_option("--range", f.range, "sampling window a:b");
  sub->add_option("--pipeline", f.pipeline, "two-step | direct | adaptive");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--workers", f.workers, "campaign worker threads");
  sub->add_option("--truth", f.truth, "true couplings d1,d2,delta");
  sub->add_option("--polar", f.polar, "true parameters Omega,alpha,epsilon");
  sub->add_option("--repeats", f.repeats, "campaign repeats per cell");
  sub->add_option("--rounds", f.rounds, "adaptive refinement rounds");
}

std::vector<double> parse_triple(const std::string& text, const char* what) {
  std::vector<double> v;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::logic_error&) {
      throw InvalidParameter(std::string(what) + " needs three comma-separated numbers");
    }
  }
  if (v.size() != 3) throw InvalidParameter(std::string(what) + " needs three comma-separated numbers");
  return v;
}

struct Resolved {
  RunConfig cfg;
  bool truth_known = false;
};

Resolved resolve(const Flags& f) {
  Resolved r;
  if (f.config) {
    const nlohmann::json j = read_json(*f.config);
    r.cfg = apply_json(RunConfig{}, j);
    r.truth_known = j.contains("truth");
  }
  RunConfig& c = r.cfg;
  if (f.seed) c.seed = *f.seed;
  if (f.nt) c.nt = *f.nt;
  if (f.ne) c.ne = *f.ne;
  if (f.range) std::tie(c.t_min, c.t_max) = parse_range(*f.range);
  if (f.pipeline) c.pipeline = parse_pipeline(*f.pipeline);
  if (f.out) c.out = *f.out;
  if (f.workers) c.workers = *f.workers;
  if (f.repeats) c.repeats = *f.repeats;
  if (f.rounds) c.adaptive.rounds = *f.rounds;
  if (f.truth) {
    const auto v = parse_triple(*f.truth, "--truth");
    c.truth = {v[0], v[1], 0.0, v[2]};
    r.truth_known = true;
  }
  if (f.polar) {
    const auto v = parse_triple(*f.polar, "--polar");
    c.truth = polar_to_couplings({v[0], v[1], v[2]});
    r.truth_known = true;
  }
  fs::create_directories(c.out);
  return r;
}

std::optional<CouplingParams> known_truth(const Resolved& r) {
  return r.truth_known ? std::optional<CouplingParams>(r.cfg.truth) : std::nullopt;
}

int cmd_simulate(const Flags& f) {
  const Resolved r = resolve(f);
  SamplingSchedule s;
  s.kind = r.cfg.schedule;
  s.t_min = r.cfg.t_min;
  s.t_max = r.cfg.t_max;
  s.count = r.cfg.nt;
  const DataTrace d = simulate_trace(build_hamiltonian(r.cfg.truth), schedule_times(s), r.cfg.ne, r.cfg.seed);
  const fs::path out = fs::path(r.cfg.out) / "trace.csv";
  save_trace(d, out);
  write_json(fs::path(r.cfg.out) / "config.json", to_json(r.cfg));
  spdlog::info("wrote {} points to {}", d.size(), out.string());
  return 0;
}

int cmd_estimate_spectral(const Flags& f) {
  const Resolved r = resolve(f);
  const DataTrace d = load_trace(f.trace);
  const SpectralFit fit = estimate_spectral(d, r.cfg.grid);
  save_surface(fit.surface, fs::path(r.cfg.out) / "surface.csv");
  nlohmann::json j{{"schema_version", kSchemaVersion},
                   {"omega_center", fit.omega_center},
                   {"estimate", to_json(fit.estimate)},
                   {"uncertainty", to_json(uncertainty_from_estimate(fit.estimate))},
                   {"model_compare", model_compare(d, fit.estimate)}};
  write_json(fs::path(r.cfg.out) / "estimate.json", j);
  spdlog::info("omega = {:.6f}, delta_omega = {:.6f}", fit.estimate.omega, fit.estimate.delta_omega);
  return 0;
}

int cmd_reconstruct(const Flags& f) {
  const Resolved r = resolve(f);
  const DataTrace d = load_trace(f.trace);
  const SpectralFit fit = estimate_spectral(d, r.cfg.grid);
  const ReconstructionResult rec = reconstruct_hamiltonian(fit.estimate);
  nlohmann::json j = reconstruction_json(rec, known_truth(r));
  write_json(fs::path(r.cfg.out) / "reconstruction.json", j);
  if (!rec.physical()) spdlog::warn("reconstruction is unphysical ({})", to_string(rec.reason));
  return 0;
}

int cmd_estimate_direct(const Flags& f) {
  const Resolved r = resolve(f);
  const DataTrace d = load_trace(f.trace);
  const DirectFit fit = estimate_direct(d, r.cfg.direct);
  save_grid3(fit.grid, fs::path(r.cfg.out) / "grid.csv");
  nlohmann::json j{{"schema_version", kSchemaVersion}, {"estimate", to_json(fit.estimate)}};
  if (auto t = known_truth(r)) {
    j["relative_error"] = relative_error(fold_detuning(polar_to_couplings(fit.estimate.polar)), fold_detuning(*t));
  }
  write_json(fs::path(r.cfg.out) / "direct.json", j);
  return 0;
}

int cmd_adaptive(const Flags& f) {
  const Resolved r = resolve(f);
  AdaptiveConfig ac = to_adaptive_config(r.cfg);
  ac.keep_surfaces = true;
  const AdaptiveReport rep =
      adaptive_characterize(simulated_source(build_hamiltonian(r.cfg.truth), r.cfg.seed), ac, r.cfg.truth);
  const fs::path out(r.cfg.out);
  write_json(out / "adaptive.json", to_json(rep));
  save_trace(rep.final_trace, out / "trace.csv");
  for (const RoundRecord& rr : rep.rounds) {
    if (rr.surface) save_surface(*rr.surface, out / ("round_" + std::to_string(rr.round) + "_surface.csv"));
    if (!rr.error.empty()) spdlog::warn("round {} failed: {}", rr.round, rr.error);
  }
  spdlog::info("stop: {}", rep.stop_reason);
  return 0;
}

int cmd_campaign(const Flags& f) {
  const Resolved r = resolve(f);
  const CampaignConfig cc = to_campaign_config(r.cfg);
  spdlog::info("campaign: {} cells x {} repeats, pipeline {}", cc.nt_list.size() * cc.ne_list.size(), cc.repeats,
               to_string(cc.pipeline));
  const CampaignResult res = run_campaign(cc);
  const fs::path out(r.cfg.out);
  write_json(out / "campaign.json", to_json(res));
  write_text(out / "campaign_cells.csv", campaign_cells_csv(res));
  write_text(out / "campaign_runs.csv", campaign_runs_csv(res));
  for (const CellSummary& c : res.cells) {
    if (c.failures) spdlog::warn("cell nt={} ne={}: {} failed runs", c.nt, c.ne, c.failures);
  }
  return 0;
}

int cmd_periodogram(const Flags& f) {
  const Resolved r = resolve(f);
  const DataTrace d = load_trace(f.trace);
  const auto freqs = default_frequency_grid(d);
  const auto power = periodogram(d, freqs);
  save_periodogram(freqs, power, fs::path(r.cfg.out) / "periodogram.csv");
  spdlog::info("periodogram peak at omega = {:.6f}", dft_peak_frequency(d));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* lvl = std::getenv("CHARACTERIZER_LOG")) {
    spdlog::set_level(spdlog::level::from_str(lvl));
  }

  CLI::App app{"Characterize a qubit with a leaky third level from ground-state population data"};
  app.require_subcommand(1);
  Flags flags;

  struct Command {
    const char* name;
    const char* help;
    bool needs_trace;
    int (*run)(const Flags&);
  };
  const Command commands[] = {
      {"simulate", "simulate a measurement trace", false, cmd_simulate},
      {"estimate-spectral", "two-frequency likelihood surface and peak", true, cmd_estimate_spectral},
      {"reconstruct", "spectral estimate followed by Hamiltonian reconstruction", true, cmd_reconstruct},
      {"estimate-direct", "direct likelihood over (Omega, alpha, epsilon)", true, cmd_estimate_direct},
      {"adaptive", "adaptive resampling loop on simulated data", false, cmd_adaptive},
      {"campaign", "Monte Carlo sweep over Nt and Ne", false, cmd_campaign},
      {"periodogram", "Fourier power spectrum of a trace", true, cmd_periodogram},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, flags);
    if (c.needs_trace) sub->add_option("--trace", flags.trace, "input trace CSV")->required();
    subs.emplace_back(sub, &c);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [sub, cmd] : subs) {
      if (sub->parsed()) return cmd->run(flags);
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 1;
}
