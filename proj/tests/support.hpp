#pragma once

#include "phwc/errors.hpp"
#include "phwc/geometry.hpp"
#include "phwc/scenarios.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <random>
#include <type_traits>

namespace phwc_test {

using namespace phwc;

inline constexpr double kPi = 3.14159265358979323846;

template <class V>
using elem = typename std::decay_t<V>::value_type;

inline Vec vec(std::initializer_list<double> v) { return to_vec(std::vector<double>(v)); }

// Euclidean chart on a box; optionally flagged as a complex chart.
inline ManifoldPtr flat_chart(int dim, double lo = -1.0, double hi = 1.0, int nodes = 4, bool complex = false) {
    std::vector<ChartAxis> axes(static_cast<std::size_t>(dim), ChartAxis{lo, hi, AxisRule::GaussLegendre, nodes});
    SmoothFunction metric(dim, dim * dim, [dim](const auto& x) {
        using T = elem<decltype(x)>;
        std::vector<T> out(static_cast<std::size_t>(dim * dim), T(0.0));
        for (int k = 0; k < dim; ++k) out[static_cast<std::size_t>(k * dim + k)] = T(1.0);
        return out;
    });
    auto M = std::make_shared<ChartManifold>("R" + std::to_string(dim), axes, metric);
    M->set_complex_chart(complex);
    return M;
}

// Unit S^2 in (theta, phi).
inline ManifoldPtr unit_s2(int nodes = 24) {
    std::vector<ChartAxis> axes{{0.0, kPi, AxisRule::GaussLegendre, nodes}, {0.0, 2.0 * kPi, AxisRule::Periodic, nodes}};
    SmoothFunction metric(2, 4, [](const auto& x) {
        using T = elem<decltype(x)>;
        using std::sin;
        T s = sin(x[0]);
        return std::vector<T>{T(1.0), T(0.0), T(0.0), s * s};
    });
    return std::make_shared<ChartManifold>("S2", axes, metric);
}

// Plane with metric e^{2x} (dx^2 + dy^2).
inline ManifoldPtr conformal_plane() {
    std::vector<ChartAxis> axes(2, ChartAxis{-1.0, 1.0, AxisRule::GaussLegendre, 6});
    SmoothFunction metric(2, 4, [](const auto& x) {
        using T = elem<decltype(x)>;
        using std::exp;
        T e = exp(2.0 * x[0]);
        return std::vector<T>{e, T(0.0), T(0.0), e};
    });
    return std::make_shared<ChartManifold>("conformal-plane", axes, metric);
}

template <class F>
MapPtr make_map(const std::string& id, ManifoldPtr M, ManifoldPtr N, F f, DifferentiationConfig cfg = {}) {
    SmoothFunction expr(M->dim(), N->dim(), f);
    return std::make_shared<SmoothMap>(id, M, N, expr, cfg);
}

inline MapPtr identity_map(ManifoldPtr M) {
    return make_map("identity", M, M, [](const auto& x) { return std::vector<elem<decltype(x)>>(x.begin(), x.end()); });
}

// Constant map onto c.
inline MapPtr constant_map(ManifoldPtr M, ManifoldPtr N, Vec c) {
    return make_map("constant", M, N, [c](const auto& x) {
        using T = elem<decltype(x)>;
        std::vector<T> out;
        for (Eigen::Index i = 0; i < c.size(); ++i) out.push_back(T(c[i]) + 0.0 * x[0]);
        return out;
    });
}

inline MatrixField complex_structure(int complex_dim) { return standard_complex_structure(complex_dim); }

inline Vec random_vec(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = nd(rng);
    return v;
}

inline Vec random_unit(std::mt19937_64& rng, const Mat& g) {
    Vec v = random_vec(rng, static_cast<int>(g.rows()));
    return v / norm(g, v);
}

// Shared scenarios, built once per test binary.
inline const Scenario& scenario(const std::string& id, int n = 2) {
    static std::map<std::string, std::unique_ptr<Scenario>> cache;
    const std::string key = id + "/" + std::to_string(n);
    auto it = cache.find(key);
    if (it == cache.end()) {
        ScenarioOptions o;
        o.n = n;
        it = cache.emplace(key, std::make_unique<Scenario>(build_scenario(id, o))).first;
    }
    return *it->second;
}

inline std::vector<std::string> phwc_scenario_ids() { return scenario_ids(); }

inline Vec xi_at(const Scenario& s, const Vec& x) { return s.contact->xi(x); }

}  // namespace phwc_test
