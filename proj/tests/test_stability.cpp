#include "support.hpp"

#include "phwc/stability.hpp"

#include <doctest.h>

using namespace phwc_test;

namespace {

VariationField scaled(const VariationField& f, double t) {
    VariationField out = f;
    out.label = f.label + "*t";
    if (f.X) out.X = [X = f.X, t](const PointGeometry& pg) -> Vec { return t * X(pg); };
    if (f.v) out.v = [v = f.v, t](const PointGeometry& pg) -> Vec { return t * v(pg); };
    return out;
}

const SmoothFunction* emb(const Scenario& s) { return s.embedding ? &*s.embedding : nullptr; }

KillingFamily killing(const Scenario& s) {
    return killing_fields_sphere(s.sphere_n, *s.map, *s.contact, s.J.J, *s.embedding);
}

VectorField domain_field(const Scenario& s, const VariationField& f) {
    return [&s, f](const Vec& y) { return variation_domain_field(f, point_geometry(*s.map, s.J.J, emb(s), y)); };
}

}  // namespace

TEST_SUITE("stability") {

TEST_CASE("Killing generators are skew and satisfy the Killing equation") {
    for (int n : {1, 2}) {
        const Scenario& s = scenario("hopf-s2n+1", n);
        KillingFamily fam = killing(s);
        CHECK(fam.all.size() == static_cast<std::size_t>((2 * n + 2) * (2 * n + 1) / 2));
        for (const auto& f : fam.all) {
            REQUIRE(f.generator.rows() == 2 * n + 2);
            CHECK((f.generator + f.generator.transpose()).norm() == 0.0);
        }
        for (const auto& f : fam.perp_xi) CHECK((f.generator + f.generator.transpose()).norm() == 0.0);
        CHECK(fam.max_killing_residual < 1e-8);
        CHECK(fam.max_perp_xi_dot < 1e-8);
        CHECK(fam.max_nabla_xi_identity < 1e-4);
        MESSAGE("n = " << n << ": " << fam.perp_xi.size() << " generators orthogonal to xi");
        if (n == 2) CHECK(fam.perp_xi.size() >= 1);
    }
}

TEST_CASE("Hessian is quadratic in the field") {
    const Scenario& s = scenario("hopf-s3");
    auto fields = random_trial_fields(3, 5, *s.map, emb(s));
    std::vector<VariationField> all = fields;
    for (const auto& f : fields) all.push_back(scaled(f, -2.5));
    HessianBatch b = hessian_batch(*s.map, s.J.J, emb(s), all);
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const double h = b.values[i].total, h2 = b.values[i + fields.size()].total;
        CHECK(std::abs(h2 - 6.25 * h) <= 1e-12 * std::max(1.0, std::abs(h2)));
    }
    HessianValue single = hessian(*s.map, s.J.J, emb(s), fields[0]);
    CHECK(single.total == b.values[0].total);
    CHECK(single.total == doctest::Approx(single.pullback_term + single.z_term).epsilon(1e-12));
}

TEST_CASE("symmetry directions are neutral on S^3") {
    const Scenario& s = scenario("hopf-s3");
    KillingFamily fam = killing(s);
    HessianBatch b = hessian_batch(*s.map, s.J.J, emb(s), fam.perp_xi);
    for (const auto& h : b.values) CHECK(std::abs(h.total) < 1e-3 * h.v_l2_sq);
}

TEST_CASE("S^3 -> CP^1: sampled Hessian is nonnegative") {
    const Scenario& s = scenario("hopf-s3");
    auto fields = random_trial_fields(50, 0, *s.map, emb(s));
    HessianBatch b = hessian_batch(*s.map, s.J.J, emb(s), fields);
    CHECK(b.max_eq7 < 1e-4);
    for (const auto& h : b.values) {
        CHECK(h.v_l2_sq > 0.0);
        CHECK(h.total >= -1e-3 * h.v_l2_sq);
    }
}

TEST_CASE("S^3 -> CP^1: Sasakian form agrees with the Hessian") {
    const Scenario& s = scenario("hopf-s3");
    auto fields = random_trial_fields(10, 3, *s.map, emb(s));
    HessianBatch b = hessian_batch(*s.map, s.J.J, emb(s), fields);
    auto q = sasakian_hessian_batch(*s.map, &*s.contact, s.J.J, emb(s), fields);
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const double a = b.values[i].total, c = q[i].total;
        CHECK(std::abs(a - c) <= 1e-2 * std::max({std::abs(a), std::abs(c), 0.1 * b.values[i].v_l2_sq}));
        CHECK(q[i].reduced == doctest::Approx(q[i].bracket_term + q[i].coupling_term).epsilon(1e-12));
    }
}

// Closed-form instability value on S^5 -> CP^2. The computed Hessian does not reproduce it;
// see the notes in the README.
TEST_CASE("S^5 -> CP^2: Killing fields orthogonal to xi give Hess = -4 int |X|^2") {
    const Scenario& s = scenario("hopf-s2n+1", 2);
    KillingFamily fam = killing(s);
    REQUIRE(!fam.perp_xi.empty());
    HessianBatch b = hessian_batch(*s.map, s.J.J, emb(s), fam.perp_xi);
    auto q = sasakian_hessian_batch(*s.map, &*s.contact, s.J.J, emb(s), fam.perp_xi);
    for (std::size_t i = 0; i < b.values.size(); ++i) {
        const double ratio = b.values[i].total / b.values[i].x_l2_sq;
        CHECK(ratio == doctest::Approx(-4.0).epsilon(1e-2));
        CHECK(q[i].div_term < 1e-6 * q[i].x_l2_sq);
        MESSAGE("generator " << i << ": Hess/|X|^2 = " << ratio << ", reduced integrand ratio = "
                             << q[i].reduced / q[i].x_l2_sq << ", pair term = " << q[i].pair_term);
    }
}

TEST_CASE("S^5 -> CP^2: Sasakian form agrees with the Hessian on random fields") {
    const Scenario& s = scenario("hopf-s2n+1", 2);
    auto fields = random_trial_fields(5, 0, *s.map, emb(s));
    HessianBatch b = hessian_batch(*s.map, s.J.J, emb(s), fields);
    auto q = sasakian_hessian_batch(*s.map, &*s.contact, s.J.J, emb(s), fields);
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const double a = b.values[i].total, c = q[i].total;
        CHECK(std::abs(a - c) <= 1e-2 * std::max({std::abs(a), std::abs(c), 0.1 * b.values[i].v_l2_sq}));
    }
}

TEST_CASE("vertical codifferential formula") {
    for (int n : {1, 2}) {
        const Scenario& s = scenario("hopf-s2n+1", n);
        for (const auto& x : s.domain->sample_points(10, 1)) {
            ScalarPair p = vertical_codifferential_formula(*s.map, s.J.J, s.contact->xi(x), x);
            CHECK(p.lhs == doctest::Approx(2.0 * n).epsilon(1e-4));
            CHECK(std::abs(p.lhs - p.rhs) < 1e-3);
        }
    }
    const Scenario& prod = scenario("product-proj");
    for (const auto& x : prod.domain->sample_points(10, 2)) {
        FibreSplitting fs = fibre_splitting(*prod.map, x);
        for (Eigen::Index j = 0; j < fs.vertical_basis.cols(); ++j) {
            ScalarPair p = vertical_codifferential_formula(*prod.map, prod.J.J, fs.vertical_basis.col(j), x);
            CHECK(std::abs(p.lhs) < 1e-6);
            CHECK(std::abs(p.rhs) < 1e-6);
        }
    }
    const Scenario& w = scenario("warped-hopf");
    int used = 0;
    for (const auto& x : w.domain->sample_points(20, 3)) {
        FibreSplitting fs = fibre_splitting(*w.map, x);
        try {
            ScalarPair p = vertical_codifferential_formula(*w.map, w.J.J, fs.vertical_basis.col(0), x);
            CHECK(std::abs(p.lhs - p.rhs) < 1e-3);
            ++used;
        } catch (const GeometryError& e) {
            CHECK(e.kind() == ErrorKind::EigenframeDegenerate);
        }
    }
    CHECK(used > 0);
}

TEST_CASE("Sasakian bracket identities") {
    const Scenario& s = scenario("hopf-s2n+1", 2);
    KillingFamily fam = killing(s);
    REQUIRE(!fam.perp_xi.empty());
    VectorField X = domain_field(s, fam.perp_xi[0]);
    for (const auto& x : s.domain->sample_points(10, 4)) {
        CHECK(bracket_identity_sasakian(*s.domain, &*s.contact, X, x).residual < 1e-5);
    }
    VectorField zero = [](const Vec& y) { return Vec::Zero(y.size()); };
    Vec x0 = s.domain->sample_points(1, 5)[0];
    IdentityPair z = bracket_identity_sasakian(*s.domain, &*s.contact, zero, x0);
    CHECK(z.lhs.norm() == 0.0);
    CHECK(z.rhs.norm() == 0.0);

    std::mt19937_64 rng(6);
    for (int n : {1, 2}) {
        const Scenario& sc = scenario("hopf-s2n+1", n);
        for (const auto& x : sc.domain->sample_points(20, 7)) {
            Mat P = horizontal_projector(*sc.map, x);
            Vec Xh = P * random_unit(rng, sc.domain->metric_at(x));
            CHECK(phi_nabla_xi_identity(*sc.domain, &*sc.contact, Xh, x).residual < 1e-5);
        }
    }

    const Scenario& flat = scenario("flat-holo");
    try {
        bracket_identity_sasakian(*flat.domain, nullptr, zero, flat.domain->sample_points(1, 8)[0]);
        FAIL("expected NotSasakianScenario");
    } catch (const GeometryError& e) {
        CHECK(e.kind() == ErrorKind::NotSasakianScenario);
    }
    try {
        sasakian_hessian_batch(*flat.map, nullptr, flat.J.J, nullptr, {});
        FAIL("expected NotSasakianScenario");
    } catch (const GeometryError& e) {
        CHECK(e.kind() == ErrorKind::NotSasakianScenario);
    }
}

TEST_CASE("sufficient stability conditions") {
    const Scenario& prod = scenario("product-proj");
    StabilityConditions a = stability_conditions(*prod.map, prod.J.J, prod.domain->sample_points(10, 9));
    CHECK(a.cond_a < 1e-8);
    CHECK(a.integrable());
    const Scenario& flat = scenario("flat-holo");
    StabilityConditions b = stability_conditions(*flat.map, flat.J.J, flat.domain->sample_points(10, 10));
    CHECK(b.cond_b < 1e-8);
    CHECK(b.cond_b_holds());
    const Scenario& s = scenario("hopf-s3");
    StabilityConditions h = stability_conditions(*s.map, s.J.J, s.domain->sample_points(10, 11));
    CHECK(h.cond_a > 0.1);
    CHECK_FALSE(h.integrable());
}

TEST_CASE("the Hessian is refused away from critical maps") {
    const Scenario& w = scenario("warped-hopf");
    auto fields = random_trial_fields(1, 0, *w.map, emb(w));
    try {
        hessian_batch(*w.map, w.J.J, emb(w), fields);
        FAIL("expected NotCritical");
    } catch (const GeometryError& e) {
        CHECK(e.kind() == ErrorKind::NotCritical);
    }
    HessianOptions o;
    o.allow_noncritical = true;
    HessianBatch b = hessian_batch(*w.map, w.J.J, emb(w), fields, o);
    CHECK(b.max_eq7 > 1e-2);
    CHECK(std::isfinite(b.values[0].total));
}

}
