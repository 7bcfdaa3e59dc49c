#pragma once

#include "phwc/variational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace phwc {

struct ExpectedProperties {
    bool is_phwc = true;
    bool is_semiconformal = true;
    bool is_critical_eq7 = true;
    bool minimal_fibres = true;
    // "stable", "unstable", "stable-cond-a", "stable-cond-b" or "n/a"
    std::string stability_class = "n/a";
};

// Values measured at registration on sample points; compared to ExpectedProperties.
struct RegistrationCheck {
    double phwc = 0.0;
    double dilation = 0.0;
    double eq7 = 0.0;
    double mean_curvature = 0.0;
    double structure = 0.0;  // J (and contact) algebraic invariants
    int sample_points = 0;
};

struct ScenarioOptions {
    int n = 2;                  // complex dimension of the target for the hopf-s2n+1 family
    int order = 0;              // > 0 overrides every axis node count
    DifferentiationConfig diff;
    bool validate = true;
    std::size_t validation_points = 6;
};

struct Scenario {
    std::string id;
    std::string description;
    ManifoldPtr domain;
    ManifoldPtr codomain;
    MapPtr map;
    AlmostHermitianStructure J;
    std::optional<ContactMetricStructure> contact;  // Sasakian domains only
    int sphere_n = 0;                               // domain is S^{2n+1} when > 0
    std::optional<SmoothFunction> embedding;        // S^{2n+1} -> R^{2n+2}
    ExpectedProperties expected;
    RegistrationCheck registration;
};

std::vector<std::string> scenario_ids();
std::string scenario_description(const std::string& id);

// Throws UnknownScenario, and InvalidArgument when a declared property fails its check.
Scenario build_scenario(const std::string& id, const ScenarioOptions& opts = {});

// Round S^{2n+1} in multi-Hopf coordinates (eta_1..eta_n, theta_0..theta_n).
ManifoldPtr make_sphere_odd(int n, int eta_nodes, int theta_nodes, AxisRule theta_rule);
SmoothFunction sphere_embedding(int n);
// Sasakian structure xi = -i p, phi = tangential part of i.
ContactMetricStructure sphere_contact_structure(const ManifoldPtr& sphere, int n);

// CP^n affine chart with the Fubini-Study metric of holomorphic sectional curvature 4.
ManifoldPtr make_cpn_affine(int n);
// S^2(1/2) in spherical coordinates (theta, phi).
ManifoldPtr make_s2_half();
MatrixField standard_complex_structure(int complex_dim);
MatrixField s2_half_complex_structure();

}  // namespace phwc
