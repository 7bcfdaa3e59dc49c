#include "support.hpp"

#include "phwc/variational.hpp"

#include <doctest.h>

using namespace phwc_test;

namespace {

std::vector<std::string> phwc_submersions() { return scenario_ids(); }

// Largest value of f over the quadrature nodes of M.
template <class F>
double node_max(const ChartManifold& M, F f) {
    double m = 0.0;
    for (const auto& x : M.quadrature().nodes) m = std::max(m, f(x));
    return m;
}

bool kaehler_target(const Scenario& s) {
    for (const auto& y : s.codomain->sample_points(5, 99)) {
        auto nJ = covariant_derivative_endomorphism(*s.codomain, s.J.J, y);
        for (const auto& m : nJ)
            if (m.norm() > 1e-8) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("variational") {

TEST_CASE("pullback two-form") {
    auto c = constant_map(flat_chart(4), flat_chart(2, -1.0, 1.0, 4, true), vec({0.1, 0.2}));
    CHECK(pullback_two_form(*c, complex_structure(1), vec({0.1, 0.2, 0.3, 0.4})).norm() == 0.0);

    const Scenario& s = scenario("hopf-s3");
    for (const auto& x : s.domain->sample_points(20, 1)) {
        Mat w = pullback_two_form(*s.map, s.J.J, x);
        CHECK((w + w.transpose()).norm() < 1e-14);
        Mat g = s.domain->metric_at(x);
        FibreSplitting fs = fibre_splitting(*s.map, x);
        Vec E = fs.horizontal_basis.col(0);
        E /= norm(g, E);
        Vec FE = s.contact->phi(x) * E;
        CHECK(std::abs(std::abs(E.dot(w * FE)) - 1.0) < 1e-9);
    }
    for (const auto& id : phwc_submersions()) {
        const Scenario& sc = scenario(id);
        MatrixField F = induced_f_structure_field(*sc.map, sc.J.J);
        for (const auto& x : sc.domain->sample_points(20, 2)) {
            Mat w = pullback_two_form(*sc.map, sc.J.J, x);
            // phi^*h(FX, Y) = (F^T phi^*h)(X, Y)
            Mat alt = F(x).transpose() * pullback_metric(*sc.map, x);
            CHECK((w - alt).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("energies: constant map") {
    auto c = constant_map(unit_s2(), flat_chart(2, -1.0, 1.0, 4, true), vec({0.1, 0.2}));
    EnergyReport e = fh_energy(*c, complex_structure(1), 3.0);
    CHECK(e.dirichlet == 0.0);
    CHECK(e.fh_alpha == 0.0);
    CHECK(e.fh_infinity == 0.0);
    CHECK(e.p_energy == 0.0);
}

TEST_CASE("energies: Hopf map closed forms") {
    const Scenario& s = scenario("hopf-s3");
    const double pi2 = kPi * kPi;
    EnergyReport e = fh_energy(*s.map, s.J.J, 1.0);
    CHECK(std::abs(e.dirichlet - 2.0 * pi2) < 1e-3 * 2.0 * pi2);
    CHECK(std::abs(e.fh_infinity - pi2) < 1e-3 * pi2);
    CHECK(std::abs(dirichlet_energy(*s.map) - e.dirichlet) < 1e-12 * e.dirichlet);
    CHECK(std::abs(fh_infinity_energy(*s.map, s.J.J) - e.fh_infinity) < 1e-12 * e.fh_infinity);
    CHECK(e.convention.find("a<b") != std::string::npos);
    // p = 2 is the Dirichlet energy by definition; |dphi|^4 = 4 so E_4 = Vol
    CHECK(p_energy(*s.map, 2.0) == e.dirichlet);
    CHECK(std::abs(p_energy(*s.map, 4.0) - 2.0 * pi2) < 1e-3 * 2.0 * pi2);
}

TEST_CASE("energies: the two CP^1 charts agree") {
    const Scenario& a = scenario("hopf-s3");
    const Scenario& b = scenario("hopf-s2n+1", 1);
    EnergyReport ea = fh_energy(*a.map, a.J.J, 1.0);
    EnergyReport eb = fh_energy(*b.map, b.J.J, 1.0);
    CHECK(std::abs(ea.dirichlet - eb.dirichlet) < 1e-3 * ea.dirichlet);
    CHECK(std::abs(ea.fh_infinity - eb.fh_infinity) < 1e-3 * ea.fh_infinity);
}

TEST_CASE("energies: alpha monotone, strong coupling identity") {
    for (const auto& id : scenario_ids()) {
        const Scenario& s = scenario(id);
        double prev = -1.0;
        for (double alpha : {0.0, 0.5, 1.0, 10.0, 1e3, 1e6}) {
            EnergyReport e = fh_energy(*s.map, s.J.J, alpha);
            CHECK(e.fh_alpha >= prev);
            prev = e.fh_alpha;
            CHECK(e.fh_alpha >= e.dirichlet * (1.0 - 1e-15));
            if (alpha > 0.0) {
                double lhs = e.fh_alpha / alpha - e.fh_infinity;
                CHECK(std::abs(lhs - e.dirichlet / alpha) <= 1e-12 * (e.fh_alpha / alpha + e.dirichlet));
            }
            if (alpha == 1e6 && e.fh_infinity > 0.0) CHECK(std::abs(e.fh_alpha / alpha - e.fh_infinity) < 1e-4 * e.fh_infinity);
        }
    }
}

TEST_CASE("Z field") {
    const Scenario& flat = scenario("flat-holo");
    for (const auto& x : flat.domain->sample_points(10, 3)) CHECK(z_field(*flat.map, flat.J.J, x).norm() < 1e-8);
    for (int n : {1, 2}) {
        const Scenario& s = scenario("hopf-s2n+1", n);
        for (const auto& x : s.domain->sample_points(10, 4)) {
            Vec Z = z_field(*s.map, s.J.J, x);
            Mat g = s.domain->metric_at(x);
            Vec xi = s.contact->xi(x);
            CHECK(inner(g, Z, xi) == doctest::Approx(-2.0 * n).epsilon(1e-4 / (2.0 * n)));
            CHECK(norm(g, Z - inner(g, Z, xi) * xi) < 1e-4);
        }
    }
    const Scenario& s3 = scenario("hopf-s3");
    for (const auto& x : s3.domain->sample_points(10, 5))
        CHECK(inner(s3.domain->metric_at(x), z_field(*s3.map, s3.J.J, x), s3.contact->xi(x)) ==
              doctest::Approx(-2.0).epsilon(1e-4));
}

TEST_CASE("criticality residual") {
    for (int n : {1, 2}) {
        const Scenario& s = scenario("hopf-s2n+1", n);
        for (const auto& x : s.domain->sample_points(20, 6)) CHECK(criticality_residual_eq7(*s.map, s.J.J, x) < 1e-4);
    }
    const Scenario& flat = scenario("flat-holo");
    for (const auto& x : flat.domain->sample_points(10, 7)) CHECK(criticality_residual_eq7(*flat.map, flat.J.J, x) < 1e-8);
    const Scenario& w = scenario("warped-hopf");
    CHECK(node_max(*w.domain, [&](const Vec& x) { return criticality_residual_eq7(*w.map, w.J.J, x); }) > 1e-2);
}

TEST_CASE("criticality report verdicts") {
    const Scenario& s = scenario("hopf-s3");
    CriticalityReport r = criticality_report(*s.map, s.J.J, s.domain->sample_points(20, 8));
    CHECK(r.phwc_ok());
    CHECK(r.harmonic());
    CHECK(r.critical());
    CHECK(r.phwc.value >= 0.0);
    CHECK(r.eq7.point.size() == 3);
    const Scenario& w = scenario("warped-hopf");
    CriticalityReport rw = criticality_report(*w.map, w.J.J, w.domain->quadrature().nodes);
    CHECK(rw.phwc_ok());
    CHECK_FALSE(rw.critical());
    CHECK(rw.critical() == (rw.eq7.value < rw.tol.eq7));
}

TEST_CASE("two-imply-the-third residuals") {
    const Scenario& s = scenario("hopf-s3");
    for (const auto& x : s.domain->sample_points(20, 9)) {
        Prop41Residuals r = prop41_equivalence(*s.map, s.J.J, x);
        CHECK(r.cosymplectic < 1e-4);
        CHECK(r.eq7 < 1e-4);
        CHECK(r.pullback_sum < 1e-4);
        CHECK(r.identity < 1e-4);
    }
    const Scenario& flat = scenario("flat-holo");
    Prop41Residuals rf = prop41_equivalence(*flat.map, flat.J.J, flat.domain->sample_points(1, 10)[0]);
    CHECK(rf.cosymplectic < 1e-9);
    CHECK(rf.eq7 < 1e-9);
    CHECK(rf.pullback_sum < 1e-9);
    CHECK(rf.identity < 1e-9);
    for (const auto& id : phwc_submersions()) {
        const Scenario& sc = scenario(id);
        for (const auto& x : sc.domain->sample_points(20, 11)) CHECK(prop41_equivalence(*sc.map, sc.J.J, x).identity < 1e-4);
    }
    const Scenario& w = scenario("warped-hopf");
    double worst = node_max(*w.domain, [&](const Vec& x) {
        Prop41Residuals r = prop41_equivalence(*w.map, w.J.J, x);
        return std::max({r.cosymplectic, r.eq7, r.pullback_sum});
    });
    CHECK(worst > 1e-2);
}

TEST_CASE("semiconformal criticality") {
    const Scenario& s = scenario("hopf-s3");
    for (const auto& x : s.domain->sample_points(20, 12)) {
        SemiconformalResiduals r = semiconformal_criticality(*s.map, s.J.J, x);
        CHECK(r.criticality < 1e-5);
        CHECK(r.f_divergence < 1e-4);
        CHECK(r.lambda_sq == doctest::Approx(1.0).epsilon(1e-9));
    }
    const Scenario& w = scenario("warped-hopf");
    for (const auto& x : w.domain->sample_points(20, 13)) CHECK(semiconformal_criticality(*w.map, w.J.J, x).f_divergence < 1e-4);
    CHECK(node_max(*w.domain, [&](const Vec& x) { return semiconformal_criticality(*w.map, w.J.J, x).criticality; }) >
          1e-2);

    auto stretch = make_map("stretch", flat_chart(2, -1.0, 1.0, 4, true), flat_chart(2, -5.0, 5.0, 4, true),
                            [](const auto& x) {
                                using T = elem<decltype(x)>;
                                return std::vector<T>{x[0], 2.0 * x[1]};
                            });
    try {
        semiconformal_criticality(*stretch, complex_structure(1), vec({0.1, 0.2}));
        FAIL("expected NotSemiconformal");
    } catch (const GeometryError& e) {
        CHECK(e.kind() == ErrorKind::NotSemiconformal);
    }
}

TEST_CASE("Weyl connection") {
    const Scenario& s = scenario("hopf-s3");
    Vec x = s.domain->sample_points(1, 14)[0];
    Vec zero = Vec::Zero(3);
    Christoffel D = weyl_connection(*s.domain, x, zero);
    Christoffel LC = christoffel_at(*s.domain, x);
    for (int k = 0; k < 3; ++k) CHECK((D.gamma[k] - LC.gamma[k]).norm() < 1e-14);
    Mat Fphi = s.contact->phi(x);
    CHECK((Fphi * weyl_div_f(*s.domain, s.contact->phi, x, zero) - Fphi * div_f(*s.domain, s.contact->phi, x)).norm() <
          1e-12);

    for (const auto& y : s.domain->sample_points(10, 15)) {
        Mat g = s.domain->metric_at(y);
        Vec th = compatible_weyl_theta(*s.domain, s.contact->phi, y);
        CHECK(norm(g, sharp(*s.domain, y, th)) < 1e-5);
        CHECK(weyl_compat_residual(*s.domain, s.contact->phi, y).compatible < 1e-5);
    }

    const Scenario& w = scenario("warped-hopf");
    MatrixField F = induced_f_structure_field(*w.map, w.J.J);
    for (const auto& y : w.domain->sample_points(20, 16)) CHECK(weyl_compat_residual(*w.domain, F, y).compatible < 1e-4);
    CHECK(node_max(*w.domain, [&](const Vec& y) { return weyl_compat_residual(*w.domain, F, y).levi_civita; }) > 1e-2);

    try {
        compatible_weyl_theta(*flat_chart(2), complex_structure(1), vec({0.1, 0.2}));
        FAIL("expected DimensionTooSmall");
    } catch (const GeometryError& e) {
        CHECK(e.kind() == ErrorKind::DimensionTooSmall);
    }
}

TEST_CASE("tension of a PHWC map") {
    const Scenario& s = scenario("hopf-s3");
    for (const auto& x : s.domain->sample_points(20, 17)) {
        TensionPhwc t = tension_phwc(*s.map, s.J.J, x);
        CHECK(t.j_div_j.norm() < 1e-5);
        CHECK(t.tau.norm() < 1e-5);
    }
    const Scenario& flat = scenario("flat-holo");
    CHECK(tension_phwc(*flat.map, flat.J.J, flat.domain->sample_points(1, 18)[0]).tau.norm() < 1e-9);
    for (const auto& id : phwc_submersions()) {
        const Scenario& sc = scenario(id);
        for (const auto& x : sc.domain->sample_points(100, 19)) {
            TensionPhwc t = tension_phwc(*sc.map, sc.J.J, x);
            CHECK((t.tau - tension_field_direct(*sc.map, x)).norm() < 1e-4);
        }
    }
}

TEST_CASE("(1,1) condition and its identity") {
    const Scenario& flat = scenario("flat-holo");
    Cond11Residuals rf = cond_1_1_residual(*flat.map, flat.J.J, flat.domain->sample_points(1, 20)[0]);
    CHECK(rf.cond < 1e-9);
    CHECK(rf.split < 1e-9);
    for (const auto& id : phwc_submersions()) {
        const Scenario& sc = scenario(id);
        if (!kaehler_target(sc)) continue;
        for (const auto& x : sc.domain->sample_points(20, 21)) CHECK(cond_1_1_residual(*sc.map, sc.J.J, x).split < 1e-4);
    }
}

TEST_CASE("horizontally homothetic built-ins: critical exactly when fibres are minimal") {
    for (const auto& id : {"hopf-s3", "flat-holo", "product-proj"}) {
        const Scenario& s = scenario(id);
        for (const auto& x : s.domain->sample_points(20, 22)) {
            CHECK(horizontal_grad_ln_lambda(*s.map, x).norm() < 1e-6);
            bool critical = criticality_residual_eq7(*s.map, s.J.J, x) < 1e-4;
            bool minimal = mean_curvature_fibres(*s.map, x).norm() < 1e-4;
            CHECK(critical == minimal);
        }
    }
}

TEST_CASE("non-finite integrand is reported") {
    auto blow = make_map("blow-up", flat_chart(2, 0.0, 1.0, 4, true), flat_chart(2, -1e300, 1e300, 4, true),
                         [](const auto& x) {
                             using T = elem<decltype(x)>;
                             // |dphi|^2 = 1e400 overflows
                             return std::vector<T>{1e200 * x[0], x[1]};
                         });
    try {
        fh_energy(*blow, complex_structure(1), 1.0);
        FAIL("expected NonFiniteIntegrand");
    } catch (const GeometryError& e) {
        CHECK(e.kind() == ErrorKind::NonFiniteIntegrand);
    }
}

}
