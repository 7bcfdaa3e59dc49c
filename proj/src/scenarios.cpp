#include "phwc/scenarios.hpp"

#include "phwc/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <type_traits>

namespace phwc {

namespace {

constexpr double kPi = std::numbers::pi;

template <class V>
using elem_t = typename std::decay_t<V>::value_type;

// Axis node count, overridden by opts.order when positive.
int nodes_or(const ScenarioOptions& o, int fallback) { return o.order > 0 ? o.order : fallback; }

std::vector<ChartAxis> sphere_axes(int n, int eta_nodes, int theta_nodes, AxisRule theta_rule) {
    std::vector<ChartAxis> axes;
    for (int k = 0; k < n; ++k) axes.push_back({0.0, kPi / 2.0, AxisRule::GaussLegendre, eta_nodes});
    for (int k = 0; k <= n; ++k) axes.push_back({0.0, 2.0 * kPi, theta_rule, theta_nodes});
    return axes;
}

// Radii r_0..r_n of the multi-Hopf chart.
template <class T>
std::vector<T> sphere_radii(const std::vector<T>& x, int n) {
    using std::cos;
    using std::sin;
    std::vector<T> r(static_cast<std::size_t>(n + 1));
    T prod(1.0);
    for (int k = 0; k < n; ++k) {
        r[k] = prod * cos(x[k]);
        prod = prod * sin(x[k]);
    }
    r[n] = prod;
    return r;
}

SmoothFunction sphere_metric(int n, double warp) {
    const int m = 2 * n + 1;
    return SmoothFunction(m, m * m, [n, m, warp](const auto& x) {
        using T = elem_t<decltype(x)>;
        using std::cos;
        using std::exp;
        using std::sin;
        std::vector<T> out(static_cast<std::size_t>(m * m), T(0.0));
        auto r = sphere_radii(x, n);
        T s(1.0);
        for (int k = 0; k < n; ++k) {
            out[k * m + k] = s;
            s = s * sin(x[k]) * sin(x[k]);
        }
        for (int k = 0; k <= n; ++k) out[(n + k) * m + n + k] = r[k] * r[k];
        if (warp != 0.0) {
            T c = exp(2.0 * warp * cos(2.0 * x[0]));
            for (auto& v : out) v = v * c;
        }
        return out;
    });
}

void check_registration(Scenario& s, const ScenarioOptions& opts) {
    const SmoothMap& phi = *s.map;
    auto pts = s.domain->sample_points(opts.validation_points, 20240901ULL);
    RegistrationCheck rc;
    rc.sample_points = static_cast<int>(pts.size());
    std::vector<Vec> ypts;
    for (const auto& x : pts) {
        rc.phwc = std::max(rc.phwc, phwc_residual(phi, s.J.J, x));
        rc.dilation = std::max(rc.dilation, dilation_hwc(phi, x).residual);
        rc.eq7 = std::max(rc.eq7, criticality_residual_eq7(phi, s.J.J, x));
        rc.mean_curvature = std::max(rc.mean_curvature, norm(s.domain->metric_at(x), mean_curvature_fibres(phi, x)));
        ypts.push_back(phi(x));
    }
    StructureCheck jc = s.J.validate(ypts);
    rc.structure = std::max(jc.square, jc.compatibility);
    if (s.contact) {
        StructureCheck cc = s.contact->validate(pts);
        rc.structure = std::max({rc.structure, cc.square, cc.compatibility, cc.normalisation});
    }
    s.registration = rc;

    std::ostringstream bad;
    auto expect = [&bad](const char* what, bool declared, bool measured) {
        if (declared != measured) bad << " " << what << " declared " << declared << " measured " << measured << ";";
    };
    expect("is_phwc", s.expected.is_phwc, rc.phwc < 1e-9);
    expect("is_semiconformal", s.expected.is_semiconformal, rc.dilation < 1e-6);
    expect("is_critical_eq7", s.expected.is_critical_eq7, rc.eq7 < 1e-4);
    expect("minimal_fibres", s.expected.minimal_fibres, rc.mean_curvature < 1e-6);
    if (!(rc.structure < 1e-10)) bad << " structure invariants " << rc.structure << ";";
    if (!bad.str().empty()) {
        throw GeometryError(ErrorKind::InvalidArgument, "scenario " + s.id + " failed registration:" + bad.str());
    }
}

Scenario hopf_s3(const ScenarioOptions& opts, double warp) {
    Scenario s;
    const int q = nodes_or(opts, 24);
    auto axes = sphere_axes(1, q, q, AxisRule::GaussLegendre);
    auto M = std::make_shared<ChartManifold>(warp == 0.0 ? "S3" : "S3-warped", axes, sphere_metric(1, warp));
    s.domain = M;
    s.codomain = make_s2_half();
    SmoothFunction expr(3, 2, [](const auto& x) {
        using T = elem_t<decltype(x)>;
        return std::vector<T>{2.0 * x[0], x[2] - x[1]};
    });
    s.map = std::make_shared<SmoothMap>(warp == 0.0 ? "hopf" : "hopf-warped", s.domain, s.codomain, expr, opts.diff);
    s.J = {s.codomain, s2_half_complex_structure()};
    s.embedding = sphere_embedding(1);
    if (warp == 0.0) {
        s.contact = sphere_contact_structure(s.domain, 1);
        s.sphere_n = 1;
    }
    return s;
}

}  // namespace

ManifoldPtr make_sphere_odd(int n, int eta_nodes, int theta_nodes, AxisRule theta_rule) {
    if (n < 1) throw GeometryError(ErrorKind::InvalidArgument, "sphere S^{2n+1} needs n >= 1");
    return std::make_shared<ChartManifold>("S" + std::to_string(2 * n + 1),
                                           sphere_axes(n, eta_nodes, theta_nodes, theta_rule), sphere_metric(n, 0.0));
}

SmoothFunction sphere_embedding(int n) {
    return SmoothFunction(2 * n + 1, 2 * n + 2, [n](const auto& x) {
        using T = elem_t<decltype(x)>;
        using std::cos;
        using std::sin;
        auto r = sphere_radii(x, n);
        std::vector<T> p(static_cast<std::size_t>(2 * n + 2));
        for (int k = 0; k <= n; ++k) {
            p[2 * k] = r[k] * cos(x[n + k]);
            p[2 * k + 1] = r[k] * sin(x[n + k]);
        }
        return p;
    });
}

ContactMetricStructure sphere_contact_structure(const ManifoldPtr& sphere, int n) {
    const int m = 2 * n + 1;
    SmoothFunction emb = sphere_embedding(n);
    Mat Jamb = Mat::Zero(2 * n + 2, 2 * n + 2);
    for (int k = 0; k <= n; ++k) {
        Jamb(2 * k + 1, 2 * k) = 1.0;
        Jamb(2 * k, 2 * k + 1) = -1.0;
    }
    ContactMetricStructure c;
    c.base = sphere;
    c.xi = [n, m](const Vec&) {
        Vec v = Vec::Zero(m);
        for (int k = 0; k <= n; ++k) v[n + k] = -1.0;
        return v;
    };
    c.phi = [sphere, emb, Jamb](const Vec& x) {
        Mat E = emb.jacobian(x);
        Mat g = sphere->metric_at(x);
        return Mat(g.ldlt().solve(E.transpose() * Jamb * E));
    };
    return c;
}

ManifoldPtr make_cpn_affine(int n) {
    const int d = 2 * n;
    std::vector<ChartAxis> axes(static_cast<std::size_t>(d), ChartAxis{-400.0, 400.0, AxisRule::GaussLegendre, 8});
    SmoothFunction metric(d, d * d, [n, d](const auto& w) {
        using T = elem_t<decltype(w)>;
        T s(1.0);
        for (int k = 0; k < d; ++k) s = s + w[k] * w[k];
        T inv = 1.0 / (s * s);
        std::vector<T> out(static_cast<std::size_t>(d * d), T(0.0));
        for (int k = 0; k < n; ++k) {
            for (int l = 0; l < n; ++l) {
                const T& uk = w[2 * k];
                const T& vk = w[2 * k + 1];
                const T& ul = w[2 * l];
                const T& vl = w[2 * l + 1];
                // H_kl = (delta_kl s - conj(w_k) w_l) / s^2 = A + iB
                T A = ((k == l ? s : T(0.0)) - (uk * ul + vk * vl)) * inv;
                T B = -(uk * vl - vk * ul) * inv;
                out[(2 * k) * d + 2 * l] = A;
                out[(2 * k + 1) * d + 2 * l + 1] = A;
                out[(2 * k) * d + 2 * l + 1] = B;
                out[(2 * k + 1) * d + 2 * l] = -B;
            }
        }
        return out;
    });
    auto N = std::make_shared<ChartManifold>("CP" + std::to_string(n), axes, metric);
    N->set_complex_chart(true);
    return N;
}

ManifoldPtr make_s2_half() {
    std::vector<ChartAxis> axes{{0.0, kPi, AxisRule::GaussLegendre, 24}, {-4.0 * kPi, 4.0 * kPi, AxisRule::Periodic, 24}};
    SmoothFunction metric(2, 4, [](const auto& y) {
        using T = elem_t<decltype(y)>;
        using std::sin;
        T st = sin(y[0]);
        return std::vector<T>{T(0.25), T(0.0), T(0.0), 0.25 * st * st};
    });
    return std::make_shared<ChartManifold>("S2(1/2)", axes, metric);
}

MatrixField standard_complex_structure(int complex_dim) {
    Mat J = Mat::Zero(2 * complex_dim, 2 * complex_dim);
    for (int k = 0; k < complex_dim; ++k) {
        J(2 * k + 1, 2 * k) = 1.0;
        J(2 * k, 2 * k + 1) = -1.0;
    }
    return [J](const Vec&) { return J; };
}

MatrixField s2_half_complex_structure() {
    return [](const Vec& y) {
        const double st = std::sin(y[0]);
        Mat J(2, 2);
        J << 0.0, -st, 1.0 / st, 0.0;
        return J;
    };
}

std::vector<std::string> scenario_ids() {
    return {"hopf-s3", "hopf-s2n+1", "flat-holo", "product-proj", "warped-hopf"};
}

std::string scenario_description(const std::string& id) {
    if (id == "hopf-s3") return "Hopf map S^3 -> S^2(1/2) = CP^1, Sasakian domain, Riemannian submersion";
    if (id == "hopf-s2n+1") return "Hopf map S^{2n+1} -> CP^n (Fubini-Study affine chart), n from --n";
    if (id == "flat-holo") return "linear holomorphic submersion C^2 -> C, z1 + (0.5+0.5i) z2";
    if (id == "product-proj") return "projection S^2(1/2) x S^1 -> S^2(1/2), integrable horizontal distribution";
    if (id == "warped-hopf") return "Hopf map with domain metric exp(2f) g, f = 0.3 cos(2 eta); PHWC, not critical";
    throw GeometryError(ErrorKind::UnknownScenario, "unknown scenario '" + id + "'");
}

Scenario build_scenario(const std::string& id, const ScenarioOptions& opts) {
    opts.diff.validate();
    Scenario s;
    if (id == "hopf-s3") {
        s = hopf_s3(opts, 0.0);
        s.expected = {true, true, true, true, "stable"};
    } else if (id == "warped-hopf") {
        s = hopf_s3(opts, 0.3);
        s.expected = {true, true, false, false, "n/a"};
    } else if (id == "hopf-s2n+1") {
        const int n = opts.n;
        if (n < 1 || n > 3) throw GeometryError(ErrorKind::ConfigError, "hopf-s2n+1 supports n in {1, 2, 3}");
        int eta = n == 1 ? 24 : (n == 2 ? 8 : 6);
        int theta = n == 1 ? 24 : (n == 2 ? 8 : 5);
        s.domain = make_sphere_odd(n, nodes_or(opts, eta), nodes_or(opts, theta), AxisRule::Periodic);
        s.codomain = make_cpn_affine(n);
        SmoothFunction expr(2 * n + 1, 2 * n, [n](const auto& x) {
            using T = elem_t<decltype(x)>;
            using std::cos;
            using std::sin;
            auto r = sphere_radii(x, n);
            std::vector<T> w(static_cast<std::size_t>(2 * n));
            for (int k = 1; k <= n; ++k) {
                T q = r[k] / r[0];
                T a = x[n + k] - x[n];
                w[2 * (k - 1)] = q * cos(a);
                w[2 * (k - 1) + 1] = q * sin(a);
            }
            return w;
        });
        s.map = std::make_shared<SmoothMap>("hopf-" + std::to_string(n), s.domain, s.codomain, expr, opts.diff);
        s.J = {s.codomain, standard_complex_structure(n)};
        s.contact = sphere_contact_structure(s.domain, n);
        s.sphere_n = n;
        s.embedding = sphere_embedding(n);
        s.expected = {true, true, true, true, n == 1 ? "stable" : "unstable"};
    } else if (id == "flat-holo") {
        const int q = nodes_or(opts, 6);
        std::vector<ChartAxis> axes(4, ChartAxis{-1.0, 1.0, AxisRule::GaussLegendre, q});
        SmoothFunction flat4(4, 16, [](const auto& x) {
            using T = elem_t<decltype(x)>;
            std::vector<T> out(16, T(0.0));
            for (int k = 0; k < 4; ++k) out[k * 5] = T(1.0);
            return out;
        });
        auto M = std::make_shared<ChartManifold>("R4", axes, flat4);
        M->set_complex_chart(true);
        SmoothFunction flat2(2, 4, [](const auto& x) {
            using T = elem_t<decltype(x)>;
            return std::vector<T>{T(1.0), T(0.0), T(0.0), T(1.0)};
        });
        std::vector<ChartAxis> taxes(2, ChartAxis{-3.0, 3.0, AxisRule::GaussLegendre, q});
        auto N = std::make_shared<ChartManifold>("R2", taxes, flat2);
        N->set_complex_chart(true);
        s.domain = M;
        s.codomain = N;
        SmoothFunction expr(4, 2, [](const auto& x) {
            using T = elem_t<decltype(x)>;
            // z1 + (0.5 + 0.5i) z2
            return std::vector<T>{x[0] + 0.5 * x[2] - 0.5 * x[3], x[1] + 0.5 * x[2] + 0.5 * x[3]};
        });
        s.map = std::make_shared<SmoothMap>("flat-holo", s.domain, s.codomain, expr, opts.diff);
        s.J = {s.codomain, standard_complex_structure(1)};
        s.expected = {true, true, true, true, "stable-cond-b"};
    } else if (id == "product-proj") {
        const int q = nodes_or(opts, 24);
        std::vector<ChartAxis> axes{{0.0, kPi, AxisRule::GaussLegendre, q},
                                    {0.0, 2.0 * kPi, AxisRule::Periodic, q},
                                    {0.0, 2.0 * kPi, AxisRule::Periodic, q}};
        SmoothFunction metric(3, 9, [](const auto& x) {
            using T = elem_t<decltype(x)>;
            using std::sin;
            T st = sin(x[0]);
            return std::vector<T>{T(0.25), T(0.0), T(0.0), T(0.0), 0.25 * st * st, T(0.0), T(0.0), T(0.0), T(1.0)};
        });
        s.domain = std::make_shared<ChartManifold>("S2(1/2)xS1", axes, metric);
        s.codomain = make_s2_half();
        SmoothFunction expr(3, 2, [](const auto& x) {
            using T = elem_t<decltype(x)>;
            return std::vector<T>{x[0], x[1]};
        });
        s.map = std::make_shared<SmoothMap>("product-proj", s.domain, s.codomain, expr, opts.diff);
        s.J = {s.codomain, s2_half_complex_structure()};
        s.expected = {true, true, true, true, "stable-cond-a"};
    } else {
        throw GeometryError(ErrorKind::UnknownScenario, "unknown scenario '" + id + "'");
    }
    s.id = id;
    s.description = scenario_description(id);
    s.map->validate_on_quadrature();
    if (opts.validate) check_registration(s, opts);
    return s;
}

}  // namespace phwc
