#pragma once

#include "phwc/scenarios.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace phwc {

inline constexpr const char* kReportSchema = "phwc-lab-report/1";

const std::vector<std::string>& all_checks();

struct RunTolerances {
    double phwc = 1e-9;
    double structure = 1e-10;
    double holomorphy = 1e-8;
    double tension = 1e-5;
    double identity = 1e-4;
    double eq7 = 1e-4;
    double z_vertical = 1e-3;
    double semiconformal = 1e-5;
    double weyl = 1e-4;
    double weyl_levi_civita = 1e-2;  // "fails somewhere" threshold
    double energy_rel = 1e-3;
    double energy_identity = 1e-12;  // relative, rounding only
    double hessian_rel = 0.01;
    double nonneg = 1e-3;            // Hess >= -nonneg |v|^2
    double stability = 1e-8;
};

struct RunConfig {
    std::string scenario = "hopf-s3";
    std::vector<std::string> checks;  // empty means all
    int n = 2;                        // hopf-s2n+1 only
    int order = 0;                    // 0 keeps the scenario's node counts
    double fd_step = 1e-5;
    double alpha = 1.0;
    double p = 4.0;
    unsigned long long seed = 0;
    int sample_points = 100;
    int random_fields = 50;
    RunTolerances tol;

    // Throws ConfigError.
    void validate() const;
    std::vector<std::string> effective_checks() const;
};

// Keys as in to_json; anything else is a ConfigError. Values not present keep `base`.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
nlohmann::ordered_json config_to_json(const RunConfig& c);

struct CheckRow {
    std::string check;
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    std::string relation;       // how value is compared to tolerance
    bool measured = false;      // outcome of that comparison
    std::optional<bool> expected;
    std::string label;          // human verdict, e.g. "non-critical: expected"
    Vec point;                  // where value was attained, when pointwise
    std::string note;
    bool match() const { return !expected || measured == *expected; }
};

struct RunReport {
    nlohmann::ordered_json body;  // deterministic for a fixed config
    std::vector<CheckRow> rows;
    double wall_seconds = 0.0;
    bool all_match() const;
    // {"body": ..., "timing": {...}}; only the body is covered by the determinism contract.
    nlohmann::ordered_json document() const;
};

// Throws UnknownScenario, ConfigError, and GeometryError for numerical failures.
RunReport run(const RunConfig& cfg);
// Identity suites only.
RunReport run_identities(const RunConfig& cfg);

std::string report_csv(const RunReport& r);
std::string report_table(const RunReport& r);

}  // namespace phwc
