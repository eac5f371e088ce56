#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "sidewalk/analysis.hpp"
#include "sidewalk/dynamics.hpp"
#include "sidewalk/errors.hpp"
#include "sidewalk/rational.hpp"
#include "sidewalk/solver.hpp"
#include "sidewalk/version.hpp"

namespace sidewalk {

inline std::string fnv1a64_hex(std::string_view data) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

/// Write via a sibling temp file and rename, so readers never observe a
/// partial file.
inline void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ValidationError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string format_min_chain(const std::optional<std::uint64_t>& value) {
  return value ? std::to_string(*value) : "inf";
}

inline std::string trace_to_csv(const DynamicsTrace& trace) {
  std::string out = "stage, color, flips, mu_O, mu_I, flipped_measure, min_chain\n";
  for (const TraceRow& row : trace.rows) {
    out += std::to_string(row.stage) + ", " + std::to_string(row.color) + ", " +
           std::to_string(row.flips) + ", " + to_string(row.mu_O) + ", " + to_string(row.mu_I) +
           ", " + to_string(row.flipped_measure) + ", " + format_min_chain(row.min_chain) + "\n";
  }
  return out;
}

inline nlohmann::json json_bound_check(const BoundCheck& check) {
  return {{"holds", check.holds}, {"lhs", to_string(check.lhs)}, {"rhs", to_string(check.rhs)}};
}

inline nlohmann::json json_density_certificate(const DensityCertificate& cert) {
  nlohmann::json subset = nlohmann::json::array();
  cert.subset.for_each([&](Vertex v) { subset.push_back(v); });
  return {{"subset", std::move(subset)},
          {"edge_count", cert.edge_count},
          {"vertex_mass", to_string(cert.vertex_mass)},
          {"density", to_string(cert.density)}};
}

inline nlohmann::json json_stage(const StageMetrics& stage) {
  return {{"n", stage.n},
          {"mu_O_start", to_string(stage.mu_O_start)},
          {"mu_I_start", to_string(stage.mu_I_start)},
          {"mu_O_end", to_string(stage.mu_O_end)},
          {"mu_I_end", to_string(stage.mu_I_end)},
          {"flipped_measure", to_string(stage.flipped_measure)},
          {"flips", stage.flips},
          {"pool_size", stage.pool_size},
          {"color_count", stage.color_count},
          {"min_chain_end", format_min_chain(stage.min_chain_end)}};
}

inline nlohmann::json json_trace_summary(const DynamicsTrace& trace) {
  nlohmann::json stages = nlohmann::json::array();
  for (const StageMetrics& stage : trace.stages) stages.push_back(json_stage(stage));
  nlohmann::json out = {{"k", trace.k},
                        {"rho", to_string(trace.rho)},
                        {"hypothesis_ok", trace.hypothesis_ok},
                        {"truncated", trace.truncated},
                        {"stages", std::move(stages)}};
  if (trace.alpha) out["alpha"] = to_string(*trace.alpha);
  if (trace.truncated) {
    out["truncated_stage"] = trace.truncated_stage;
    out["truncation_reason"] = trace.truncation_reason;
  }
  return out;
}

/// Common report envelope; schema version 1.
inline nlohmann::json make_report(const std::string& command) {
  return {{"schema", 1}, {"version", kVersion}, {"command", command}};
}

}  // namespace sidewalk
