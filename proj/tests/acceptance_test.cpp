// SPDX-License-Identifier: Apache-2.0
//
// Runs every acceptance criterion from its shipped config and prints one
// PASS/FAIL line per criterion. Outputs are written under
// acceptance_output/<config> in the working directory.

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <sstream>
#include <string>

#include "twoch/experiment.hpp"

namespace {

struct Criterion {
  int number;
  const char* config;
  const char* claim;
};

constexpr Criterion kCriteria[] = {
    {1, "rest_all_models", "rest state is a fixed point of every model"},
    {2, "conservation_plus", "2CH(+) conserves mass, momentum and energy_plus"},
    {3, "conservation_minus", "2CH(-) conserves energy_minus"},
    {4, "formulation_equivalence", "velocity and momentum forms agree"},
    {5, "convergence", "RK4 temporal order 4"},
    {6, "linear_limit", "shallow water tends to the linear right-mover"},
    {7, "stationarity_plus", "2CH(+) flow is stationary for the Lagrangian action"},
    {8, "stationarity_minus", "2CH(-) flow is stationary for the metric action; crossovers fail"},
    {9, "ch_reduction", "H = 0 reduces to the Camassa-Holm equation"},
    {10, "kinematic", "surface vertical velocity satisfies the kinematic condition"},
    {11, "eps_truncation", "kinetic energy truncation is O(eps^3)"},
    {12, "subgroup_invariance", "action invariant under H0-preserving relabeling"},
};

std::string summarize(const nlohmann::json& metrics) {
  std::ostringstream out;
  if (!metrics.contains("checks")) return "";
  bool first = true;
  for (const auto& c : metrics["checks"]) {
    char value[32];
    std::snprintf(value, sizeof value, "%.3g", c["value"].get<double>());
    out << (first ? "" : "; ") << c["name"].get<std::string>() << " = " << value << " ("
        << c["requirement"].get<std::string>() << (c["passed"].get<bool>() ? "" : ", violated")
        << ")";
    first = false;
  }
  return out.str();
}

}  // namespace

int main() {
  const std::filesystem::path configs = TWOCH_CONFIG_DIR;
  int failures = 0;
  for (const Criterion& c : kCriteria) {
    const auto start = std::chrono::steady_clock::now();
    bool passed = false;
    std::string detail;
    try {
      twoch::ExperimentSpec spec = twoch::parse_config(configs / (std::string(c.config) + ".ini"));
      spec.output_dir = std::filesystem::path("acceptance_output") / c.config;
      const twoch::ScenarioResult r = twoch::run_scenario(spec);
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      twoch::write_outputs(spec, r, wall, spec.output_dir);
      passed = r.passed;
      detail = summarize(r.metrics);
      if (!r.passed && !r.reason.empty()) detail += " | " + r.reason;
    } catch (const std::exception& e) {
      detail = std::string("error: ") + e.what();
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d (%s): %s [%.1f s]\n    %s\n", passed ? "PASS" : "FAIL", c.number,
                c.config, c.claim, wall, detail.c_str());
    std::fflush(stdout);
    if (!passed) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(kCriteria)) - failures,
              std::size(kCriteria));
  return failures == 0 ? 0 : 1;
}
