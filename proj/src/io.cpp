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

#include "qchar/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "qchar/errors.hpp"

namespace qchar {

namespace {

using nlohmann::json;

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  // A trailing newline is not an extra row.
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
T parse_field(std::string_view s, std::size_t line, const char* name) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError("bad " + std::string(name) + " value '" + std::string(s) + "'", line);
  }
  return value;
}

std::vector<std::vector<std::string_view>> parse_table(const std::vector<std::string>& lines, const char* header) {
  if (lines.empty()) throw ParseError(std::string("empty file, expected header '") + header + "'", 1);
  if (lines.front() != header) {
    throw ParseError("header mismatch: expected '" + std::string(header) + "', found '" + lines.front() + "'", 1);
  }
  const std::size_t width = split_fields(header).size();
  std::vector<std::vector<std::string_view>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto f = split_fields(lines[i]);
    if (f.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " fields, found " + std::to_string(f.size()), i + 1);
    }
    rows.push_back(std::move(f));
  }
  return rows;
}

template <class Row>
std::string join(const Row& fields) {
  std::string s;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) s += ',';
    s += fields[i];
  }
  return s;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trace_to_csv(const DataTrace& d) {
  std::string s = std::string(kTraceHeader) + "\n";
  for (std::size_t n = 0; n < d.size(); ++n) {
    s += format_double(d.times()[n]) + "," + std::to_string(d.successes()[n]) + "," +
         std::to_string(d.shots()[n]) + "\n";
  }
  return s;
}

DataTrace trace_from_csv(const std::string& text) {
  const auto lines = split_lines(text);
  const auto rows = parse_table(lines, kTraceHeader);
  std::vector<double> t;
  std::vector<std::int64_t> k, n;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t.push_back(parse_field<double>(rows[i][0], i + 2, "t"));
    k.push_back(parse_field<std::int64_t>(rows[i][1], i + 2, "successes"));
    n.push_back(parse_field<std::int64_t>(rows[i][2], i + 2, "shots"));
  }
  try {
    return DataTrace::from_counts(std::move(t), std::move(k), std::move(n));
  } catch (const InvalidParameter& e) {
    throw ParseError(std::string("invalid trace: ") + e.what(), 0);
  }
}

void save_trace(const DataTrace& d, const std::filesystem::path& path) { write_text(path, trace_to_csv(d)); }

DataTrace load_trace(const std::filesystem::path& path) {
  try {
    return trace_from_csv(read_text(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

std::string surface_to_csv(const LikelihoodSurface& s) {
  std::string out = std::string(kSurfaceHeader) + "\n";
  for (std::size_t i = 0; i < s.omega_axis.size(); ++i) {
    for (std::size_t j = 0; j < s.delta_axis.size(); ++j) {
      out += format_double(s.omega_axis[i]) + "," + format_double(s.delta_axis[j]) + "," +
             format_double(s.at(i, j)) + "\n";
    }
  }
  return out;
}

LikelihoodSurface surface_from_csv(const std::string& text) {
  const auto lines = split_lines(text);
  const auto rows = parse_table(lines, kSurfaceHeader);
  if (rows.empty()) throw ParseError("surface has no rows", 0);
  LikelihoodSurface s;
  std::vector<double> w, dw;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    w.push_back(parse_field<double>(rows[i][0], i + 2, "omega"));
    dw.push_back(parse_field<double>(rows[i][1], i + 2, "delta_omega"));
    s.values.push_back(parse_field<double>(rows[i][2], i + 2, "loglik"));
  }
  // Rows are omega-major: the delta axis is the run before omega first changes.
  std::size_t nd = 1;
  while (nd < w.size() && w[nd] == w[0]) ++nd;
  if (w.size() % nd != 0) throw ParseError("surface rows do not form a rectangular grid", 0);
  s.delta_axis.assign(dw.begin(), dw.begin() + static_cast<std::ptrdiff_t>(nd));
  for (std::size_t i = 0; i < w.size(); i += nd) s.omega_axis.push_back(w[i]);
  for (std::size_t r = 0; r < w.size(); ++r) {
    if (w[r] != s.omega_axis[r / nd] || dw[r] != s.delta_axis[r % nd]) {
      throw ParseError("surface rows do not form a rectangular grid", r + 2);
    }
  }
  return s;
}

void save_surface(const LikelihoodSurface& s, const std::filesystem::path& path) {
  write_text(path, surface_to_csv(s));
}

LikelihoodSurface load_surface(const std::filesystem::path& path) {
  try {
    return surface_from_csv(read_text(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

void save_grid3(const Grid3& g, const std::filesystem::path& path) {
  std::string out = std::string(kGridHeader) + "\n";
  for (std::size_t i = 0; i < g.omega_cap_axis.size(); ++i) {
    for (std::size_t j = 0; j < g.alpha_axis.size(); ++j) {
      for (std::size_t k = 0; k < g.epsilon_axis.size(); ++k) {
        out += format_double(g.omega_cap_axis[i]) + "," + format_double(g.alpha_axis[j]) + "," +
               format_double(g.epsilon_axis[k]) + "," + format_double(g.at(i, j, k)) + "\n";
      }
    }
  }
  write_text(path, out);
}

void save_periodogram(std::span<const double> freqs, std::span<const double> power,
                      const std::filesystem::path& path) {
  if (freqs.size() != power.size()) throw InvalidParameter("periodogram frequencies and powers differ in length");
  std::string out = std::string(kPeriodogramHeader) + "\n";
  for (std::size_t i = 0; i < freqs.size(); ++i) out += format_double(freqs[i]) + "," + format_double(power[i]) + "\n";
  write_text(path, out);
}

std::string campaign_cells_csv(const CampaignResult& r) {
  std::string out = std::string(kCellsHeader) + "\n";
  for (const CellSummary& c : r.cells) {
    std::vector<std::string> f{std::to_string(c.nt),
                               std::to_string(c.ne),
                               std::to_string(c.runs),
                               std::to_string(c.failures),
                               std::to_string(c.unphysical),
                               format_double(c.std_omega),
                               format_double(c.std_delta_omega)};
    for (double s : c.std_a) f.push_back(format_double(s));
    f.push_back(format_double(c.median_relative_error));
    out += join(f) + "\n";
  }
  return out;
}

std::string campaign_runs_csv(const CampaignResult& r) {
  std::string out = std::string(kRunsHeader) + "\n";
  for (const RunRecord& run : r.runs) {
    const std::vector<std::string> f{std::to_string(r.nt_list[run.nt_index]),
                                     std::to_string(r.ne_list[run.ne_index]),
                                     std::to_string(run.repeat),
                                     std::to_string(run.seed),
                                     run.ok ? "1" : "0",
                                     run.physical ? "1" : "0",
                                     run.ok ? run.unphysical_reason : "failed",
                                     format_double(run.omega),
                                     format_double(run.delta_omega),
                                     format_double(run.relative_error),
                                     format_double(run.preliminary_error),
                                     format_double(run.two_step_error)};
    out += join(f) + "\n";
  }
  return out;
}

json to_json(const CouplingParams& c) { return {{"d1", c.d1}, {"d2", c.d2}, {"d3", c.d3}, {"delta", c.delta}}; }

json to_json(const PolarParams& p) {
  return {{"omega_cap", p.omega_cap}, {"alpha", p.alpha}, {"epsilon", p.epsilon}};
}

json to_json(const Estimate& e) {
  json curv = json::array();
  for (int r = 0; r < 2; ++r) curv.push_back({num(e.curvature(r, 0)), num(e.curvature(r, 1))});
  return {{"omega", e.omega},
          {"delta_omega", e.delta_omega},
          {"a", {e.a[0], e.a[1], e.a[2], e.a[3]}},
          {"peak_loglik", num(e.peak_loglik)},
          {"curvature", curv},
          {"margin", num(e.margin)},
          {"omega_index", e.omega_index},
          {"delta_index", e.delta_index}};
}

json to_json(const UncertaintyMetrics& u) {
  return {{"curvature_eigenvalues", {num(u.curvature_eigenvalues[0]), num(u.curvature_eigenvalues[1])}},
          {"anisotropy", num(u.anisotropy)},
          {"margin", num(u.margin)},
          {"sigma_omega", num(u.sigma_omega)},
          {"sigma_delta_omega", num(u.sigma_delta_omega)},
          {"flat", u.flat}};
}

json to_json(const DirectEstimate& e) {
  return {{"polar", to_json(e.polar)},
          {"couplings", to_json(polar_to_couplings(e.polar))},
          {"log_likelihood", num(e.log_likelihood)},
          {"iterations", e.iterations},
          {"evaluations", e.evaluations},
          {"converged", e.converged}};
}

json to_json(const RoundRecord& r) {
  json j{{"round", r.round},
         {"chosen_times", r.chosen_times},
         {"round_shots", r.round_shots},
         {"cumulative_points", r.cumulative_points},
         {"cumulative_shots", r.cumulative_shots}};
  j["estimate"] = r.estimate ? to_json(*r.estimate) : json(nullptr);
  j["uncertainty"] = r.uncertainty ? to_json(*r.uncertainty) : json(nullptr);
  j["error"] = r.error.empty() ? json(nullptr) : json(r.error);
  return j;
}

json reconstruction_json(const ReconstructionResult& r, const std::optional<CouplingParams>& truth) {
  const auto& h = r.hamiltonian ? r.hamiltonian : r.clamped;
  json j;
  j["d1"] = h ? num(h->d1) : json(nullptr);
  j["d2"] = h ? num(h->d2) : json(nullptr);
  j["delta"] = h ? num(h->delta) : json(nullptr);
  j["valid"] = r.physical();
  j["residual"] = num(r.residual);
  j["reason"] = std::string(to_string(r.reason));
  if (truth && h) j["relative_error"] = num(relative_error(fold_detuning(*h), fold_detuning(*truth)));
  return j;
}

json to_json(const AdaptiveReport& r) {
  json rounds = json::array();
  for (const auto& rr : r.rounds) rounds.push_back(to_json(rr));
  json j{{"schema_version", kSchemaVersion}, {"rounds", rounds}, {"stop_reason", r.stop_reason}};
  j["final_points"] = r.final_trace.size();
  j["final_shots"] = r.final_trace.total_shots();
  j["preliminary_estimate"] = r.preliminary_estimate ? to_json(*r.preliminary_estimate) : json(nullptr);
  j["final_estimate"] = r.final_estimate ? to_json(*r.final_estimate) : json(nullptr);
  j["preliminary_reconstruction"] =
      r.preliminary_reconstruction ? reconstruction_json(*r.preliminary_reconstruction, r.truth) : json(nullptr);
  j["final_reconstruction"] =
      r.final_reconstruction ? reconstruction_json(*r.final_reconstruction, r.truth) : json(nullptr);
  j["final_direct"] = r.final_direct ? to_json(*r.final_direct) : json(nullptr);
  j["truth"] = r.truth ? to_json(*r.truth) : json(nullptr);
  j["preliminary_error"] = r.preliminary_error ? num(*r.preliminary_error) : json(nullptr);
  j["final_two_step_error"] = r.final_two_step_error ? num(*r.final_two_step_error) : json(nullptr);
  j["final_direct_error"] = r.final_direct_error ? num(*r.final_direct_error) : json(nullptr);
  return j;
}

json to_json(const CampaignResult& r) {
  json cells = json::array();
  for (const CellSummary& c : r.cells) {
    cells.push_back({{"nt", c.nt},
                     {"ne", c.ne},
                     {"runs", c.runs},
                     {"failures", c.failures},
                     {"unphysical", c.unphysical},
                     {"std_omega", num(c.std_omega)},
                     {"std_delta_omega", num(c.std_delta_omega)},
                     {"std_a", {num(c.std_a[0]), num(c.std_a[1]), num(c.std_a[2]), num(c.std_a[3])}},
                     {"median_relative_error", num(c.median_relative_error)}});
  }
  return {{"schema_version", kSchemaVersion},
          {"pipeline", std::string(to_string(r.pipeline))},
          {"seed", r.seed},
          {"repeats", r.repeats},
          {"nt_list", r.nt_list},
          {"ne_list", r.ne_list},
          {"cells", cells}};
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

}  // namespace qchar
