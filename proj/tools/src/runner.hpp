#pragma once

// Experiment runner shared by the subcommands: a RunContext carries the
// parsed configuration and the CLI overrides, each suite turns it into an
// ordered list of report rows, and run() handles artifact emission and the
// process exit code (0 all pass, 2 any fail, 3 inconclusive-only).

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "hlab/config.hpp"
#include "hlab/geometry.hpp"
#include "hlab/operators.hpp"
#include "hlab/report.hpp"

namespace hlab::cli {

struct RunContext {
  cfg::Config config;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 17;
  int jobs = 4;
  std::string filter;  // keep only rows whose tag contains this substring
};

// subcommand names in `all` execution order
[[nodiscard]] const std::vector<std::string>& subcommands();

// run one suite (no artifact writing); throws on unknown name
[[nodiscard]] std::vector<rep::Row> run_suite(const std::string& name,
                                              const RunContext& ctx);

// run a subcommand (or "all"): per-suite CSV plus one summary JSON under
// ctx.out_dir; returns the process exit code
int run(const std::string& name, const RunContext& ctx);

// --- helpers shared by the suite translation units ---------------------------

// uniform double in [0, 1) from the standardized mt19937_64 stream
[[nodiscard]] inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// splitmix64 step: decorrelated per-instance seeds independent of scheduling
[[nodiscard]] inline std::uint64_t mix_seed(std::uint64_t s, std::uint64_t k) {
  std::uint64_t z = s + 0x9e3779b97f4a7c15ull * (k + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

[[nodiscard]] std::vector<double> p_list(const RunContext& ctx);
[[nodiscard]] std::vector<double> curvature_list(const RunContext& ctx);

// value must stay below bound (margin = bound - value)
[[nodiscard]] rep::Row row_leq(std::string tag, std::string params,
                               double value, double bound,
                               std::string note = "");
// value must stay above bound (margin = value - bound)
[[nodiscard]] rep::Row row_geq(std::string tag, std::string params,
                               double value, double bound,
                               std::string note = "");
// value must land within tol of target (margin = tol - |value - target|)
[[nodiscard]] rep::Row row_near(std::string tag, std::string params,
                                double value, double target, double tol,
                                std::string note = "");
// pre-judged row (margin not applicable)
[[nodiscard]] rep::Row row_status(std::string tag, std::string params,
                                  double value, double tolerance, Status st,
                                  std::string note = "");

// suites (one per translation unit section)
[[nodiscard]] std::vector<rep::Row> suite_geometry(const RunContext& ctx);
[[nodiscard]] std::vector<rep::Row> suite_infconv(const RunContext& ctx);
[[nodiscard]] std::vector<rep::Row> suite_barrier(const RunContext& ctx);
[[nodiscard]] std::vector<rep::Row> suite_abp(const RunContext& ctx);
[[nodiscard]] std::vector<rep::Row> suite_measure(const RunContext& ctx);
[[nodiscard]] std::vector<rep::Row> suite_decay(const RunContext& ctx);
[[nodiscard]] std::vector<rep::Row> suite_harnack(const RunContext& ctx);
[[nodiscard]] std::vector<rep::Row> suite_hoelder(const RunContext& ctx);

}  // namespace hlab::cli
