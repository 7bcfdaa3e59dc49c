#include "support.hpp"

#include "phwc/structures.hpp"

#include <doctest.h>

#include <algorithm>

using namespace phwc_test;

TEST_SUITE("scenario-catalog") {

TEST_CASE("catalogue contents") {
    auto ids = scenario_ids();
    for (const char* id : {"hopf-s3", "hopf-s2n+1", "flat-holo", "product-proj", "warped-hopf"})
        CHECK(std::find(ids.begin(), ids.end(), id) != ids.end());
    for (const auto& id : ids) CHECK_FALSE(scenario_description(id).empty());
}

TEST_CASE("unknown ids and out-of-range n are rejected") {
    try {
        build_scenario("hopf-s7");
        FAIL("expected UnknownScenario");
    } catch (const GeometryError& e) {
        CHECK(e.kind() == ErrorKind::UnknownScenario);
    }
    try {
        scenario_description("nope");
        FAIL("expected UnknownScenario");
    } catch (const GeometryError& e) {
        CHECK(e.kind() == ErrorKind::UnknownScenario);
    }
    for (int n : {0, 4}) {
        ScenarioOptions o;
        o.n = n;
        try {
            build_scenario("hopf-s2n+1", o);
            FAIL("expected ConfigError");
        } catch (const GeometryError& e) {
            CHECK(e.kind() == ErrorKind::ConfigError);
        }
    }
}

TEST_CASE("registration re-derives the declared properties") {
    for (const auto& id : scenario_ids()) {
        const Scenario& s = scenario(id);
        const RegistrationCheck& r = s.registration;
        CHECK(r.sample_points > 0);
        CHECK((r.phwc < 1e-9) == s.expected.is_phwc);
        CHECK((r.dilation < 1e-6) == s.expected.is_semiconformal);
        CHECK((r.eq7 < 1e-4) == s.expected.is_critical_eq7);
        CHECK((r.mean_curvature < 1e-6) == s.expected.minimal_fibres);
        CHECK(r.structure < 1e-10);
    }
    CHECK_FALSE(scenario("warped-hopf").expected.is_critical_eq7);
    CHECK(scenario("hopf-s3").expected.stability_class == "stable");
    CHECK(scenario("hopf-s2n+1", 2).expected.stability_class == "unstable");
    CHECK(scenario("product-proj").expected.stability_class == "stable-cond-a");
    CHECK(scenario("flat-holo").expected.stability_class == "stable-cond-b");
}

TEST_CASE("Hopf family: g = phi^*h + eta (x) eta") {
    for (int n : {1, 2, 3}) {
        const Scenario& s = scenario("hopf-s2n+1", n);
        CHECK(s.sphere_n == n);
        CHECK(s.domain->dim() == 2 * n + 1);
        CHECK(s.codomain->dim() == 2 * n);
        CHECK(s.codomain->has_complex_chart());
        for (const auto& x : s.domain->sample_points(10, 1)) {
            Vec eta = s.contact->eta_at(x);
            Mat g = s.domain->metric_at(x);
            CHECK((g - pullback_metric(*s.map, x) - eta * eta.transpose()).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
    const Scenario& s3 = scenario("hopf-s3");
    CHECK_FALSE(s3.codomain->has_complex_chart());
    for (const auto& x : s3.domain->sample_points(10, 2)) {
        Vec eta = s3.contact->eta_at(x);
        CHECK((s3.domain->metric_at(x) - pullback_metric(*s3.map, x) - eta * eta.transpose()).cwiseAbs().maxCoeff() <
              1e-9);
    }
}

TEST_CASE("sphere quadrature integrates the volume") {
    const double vol3 = 2.0 * kPi * kPi, vol5 = kPi * kPi * kPi;
    CHECK(scenario("hopf-s3").domain->quadrature().total_measure == doctest::Approx(vol3).epsilon(1e-10));
    CHECK(scenario("hopf-s2n+1", 2).domain->quadrature().total_measure == doctest::Approx(vol5).epsilon(1e-8));
}

TEST_CASE("order option overrides node counts") {
    ScenarioOptions o;
    o.order = 5;
    Scenario s = build_scenario("flat-holo", o);
    CHECK(s.domain->quadrature().size() == 5u * 5u * 5u * 5u);
}

}
