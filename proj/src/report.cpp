#include "phwc/report.hpp"

#include "phwc/errors.hpp"
#include "phwc/geometry.hpp"
#include "phwc/stability.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>

namespace phwc {

namespace {

using ojson = nlohmann::ordered_json;
constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void config_error(const std::string& what) { throw GeometryError(ErrorKind::ConfigError, what); }

ojson vec_json(const Vec& v) {
    if (v.size() == 0) return nullptr;
    ojson a = ojson::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

// Keeps the first point attaining the extreme, so reports do not depend on ties.
struct Extreme {
    double value = 0.0;
    Vec point;
    bool seen = false;
    void max(double v, const Vec& x) {
        if (!seen || v > value) value = v, point = x, seen = true;
    }
    void min(double v, const Vec& x) {
        if (!seen || v < value) value = v, point = x, seen = true;
    }
};

struct HessianSummary {
    bool defined = false;      // false when the map is not critical
    double min_random = 0.0;   // min Hess / |v|^2 over the random suite
    double min_killing = 0.0;  // min Hess / |v|^2 over Killing fields, sphere scenarios
    bool has_killing = false;
};

struct Ctx {
    const RunConfig& cfg;
    Scenario& s;
    std::vector<Vec> pts;
    std::vector<CheckRow> rows;
    ojson details = ojson::object();
    std::optional<HessianSummary> hess;
    std::mt19937_64 rng;

    const SmoothMap& phi() const { return *s.map; }
    const MatrixField& J() const { return s.J.J; }
    const ChartManifold& M() const { return *s.domain; }
    const SmoothFunction* embedding() const { return s.embedding ? &*s.embedding : nullptr; }
    const DifferentiationConfig& diff() const { return s.map->diff_config(); }
    bool critical() const { return s.expected.is_critical_eq7; }

    CheckRow& add(const std::string& check, const std::string& name, double value, double tol,
                  const std::string& relation, std::optional<bool> expected, const Vec& point = Vec()) {
        CheckRow r;
        r.check = check;
        r.name = name;
        r.value = value;
        r.tolerance = tol;
        r.relation = relation;
        if (relation == "<") {
            r.measured = value < tol;
        } else if (relation == ">") {
            r.measured = value > tol;
        } else if (relation == ">=") {
            r.measured = value >= tol;
        } else {
            throw GeometryError(ErrorKind::InvalidArgument, "unknown relation " + relation);
        }
        r.expected = expected;
        r.point = point;
        r.label = r.measured ? "holds" : "fails";
        rows.push_back(std::move(r));
        return rows.back();
    }
    CheckRow& below(const std::string& check, const std::string& name, const Extreme& e, double tol,
                    std::optional<bool> expected) {
        return add(check, name, e.value, tol, "<", expected, e.point);
    }
};

std::string expectation_suffix(const CheckRow& r) {
    if (!r.expected) return "";
    return r.match() ? ": expected" : ": UNEXPECTED";
}

Vec random_unit(std::mt19937_64& rng, const Mat& g) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Vec v(g.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = nd(rng);
    return v / norm(g, v);
}

// Round S^{2n+1}: volume 2 pi^{n+1} / n!.
double sphere_volume(int n) { return 2.0 * std::pow(kPi, n + 1) / std::tgamma(n + 1.0); }

// ---------------------------------------------------------------- checks

void check_phwc(Ctx& c) {
    const std::string k = "phwc";
    Extreme r, coords, rank_defect, hol, iso;
    const bool coords_ok = c.s.codomain->has_complex_chart();
    for (const auto& x : c.pts) {
        r.max(phwc_residual(c.phi(), c.J(), x), x);
        if (coords_ok) coords.max(phwc_residual_coordinates(c.phi(), x), x);
    }
    c.below(k, "phwc-residual", r, c.cfg.tol.phwc, c.s.expected.is_phwc).label =
        std::string(r.value < c.cfg.tol.phwc ? "PHWC" : "not PHWC");
    c.rows.back().label += expectation_suffix(c.rows.back());
    if (coords_ok) c.below(k, "phwc-residual-complex-chart", coords, c.cfg.tol.phwc, c.s.expected.is_phwc);
    if (!c.s.expected.is_phwc) return;
    MatrixField F = induced_f_structure_field(c.phi(), c.J());
    const int dimN = c.s.codomain->dim();
    for (const auto& x : c.pts) {
        InducedFStructure f = induced_f_structure(c.phi(), c.J(), x);
        int rank_dphi = fibre_splitting(c.phi(), x).rank;
        // rank F = rank J + rank dphi - dim N
        rank_defect.max(std::abs(f.rank - (dimN + rank_dphi - dimN)), x);
        iso.max(f.isotropy, x);
        hol.max(holomorphy_residual(c.phi(), F, c.J(), x), x);
    }
    c.below(k, "induced-f-rank-defect", rank_defect, 0.5, true);
    c.below(k, "induced-f-isotropy", iso, 1e-8, true);
    c.below(k, "holomorphy-wrt-induced-f", hol, c.cfg.tol.holomorphy, true);
}

void check_structure(Ctx& c) {
    const std::string k = "structure";
    std::vector<Vec> ys;
    for (const auto& x : c.pts) ys.push_back(c.phi()(x));
    StructureCheck jc = c.s.J.validate(ys);
    c.add(k, "J-square", jc.square, c.cfg.tol.structure, "<", true);
    c.add(k, "J-compatibility", jc.compatibility, c.cfg.tol.structure, "<", true);
    if (c.s.contact) {
        StructureCheck cc = c.s.contact->validate(c.pts);
        c.add(k, "contact-square", cc.square, c.cfg.tol.structure, "<", true);
        c.add(k, "contact-compatibility", cc.compatibility, c.cfg.tol.structure, "<", true);
        c.add(k, "contact-normalisation", cc.normalisation, c.cfg.tol.structure, "<", true);
    }
}

void check_tension(Ctx& c) {
    const std::string k = "tension";
    Extreme ident, tau;
    for (const auto& x : c.pts) {
        TensionPhwc t = tension_phwc(c.phi(), c.J(), x);
        Mat h = c.s.codomain->metric_at(c.phi()(x));
        ident.max(norm(h, t.tau - t.direct), x);
        tau.max(norm(h, t.direct), x);
    }
    c.below(k, "phwc-formula-vs-direct", ident, c.cfg.tol.identity, true);
    CheckRow& r = c.below(k, "tension-norm", tau, c.cfg.tol.tension, c.s.expected.minimal_fibres);
    r.label = std::string(r.measured ? "harmonic" : "not harmonic") + expectation_suffix(r);
}

void check_energy(Ctx& c) {
    const std::string k = "energy";
    EnergyReport e = fh_energy(c.phi(), c.J(), c.cfg.alpha, c.cfg.p);
    EnergyReport e2 = fh_energy(c.phi(), c.J(), c.cfg.alpha, 2.0);
    ojson d;
    d["convention"] = e.convention;
    d["dirichlet"] = e.dirichlet;
    d["fh_infinity"] = e.fh_infinity;
    d["alpha"] = e.alpha;
    d["fh_alpha"] = e.fh_alpha;
    d["p"] = e.p;
    d["p_energy"] = e.p_energy;
    d["quadrature_nodes"] = c.M().quadrature().size();
    const int n = c.s.sphere_n;
    if (n > 0) {
        const double vol = sphere_volume(n);
        const double D = n * vol, Einf = 0.5 * n * vol;
        d["closed_form_dirichlet"] = D;
        d["closed_form_fh_infinity"] = Einf;
        c.add(k, "dirichlet-vs-closed-form", std::abs(e.dirichlet - D) / D, c.cfg.tol.energy_rel, "<", true);
        c.add(k, "fh-infinity-vs-closed-form", std::abs(e.fh_infinity - Einf) / Einf, c.cfg.tol.energy_rel, "<",
              true);
    }
    if (c.cfg.alpha > 0.0) {
        const double a = c.cfg.alpha;
        const double gap = std::abs(e.fh_alpha / a - e.fh_infinity - e.dirichlet / a);
        c.add(k, "alpha-identity", gap / std::max(1.0, e.fh_alpha / a), c.cfg.tol.energy_identity, "<", true)
            .note = "|E_FH/alpha - E_inf - E/alpha|, relative";
    }
    c.add(k, "p2-energy-equals-dirichlet", std::abs(e2.p_energy - e.dirichlet) / std::max(1.0, e.dirichlet),
          c.cfg.tol.energy_identity, "<", true);
    c.details[k] = d;
}

void check_criticality(Ctx& c) {
    const std::string k = "criticality";
    Extreme nodes, samples;
    const auto& q = c.M().quadrature();
    std::size_t used = 0;
    for (const auto& x : q.nodes) {
        if (!far_from_boundary(c.M(), x, c.diff())) continue;
        nodes.max(criticality_residual_eq7(c.phi(), c.J(), x), x);
        ++used;
    }
    for (const auto& x : c.pts) samples.max(criticality_residual_eq7(c.phi(), c.J(), x), x);
    CheckRow& r = c.below(k, "horizontal-z-quadrature-nodes", nodes, c.cfg.tol.eq7, c.critical());
    r.label = std::string(r.measured ? "critical" : "non-critical") + expectation_suffix(r);
    r.note = std::to_string(used) + " nodes";
    CheckRow& r2 = c.below(k, "horizontal-z-sample-points", samples, c.cfg.tol.eq7, c.critical());
    r2.label = std::string(r2.measured ? "critical" : "non-critical") + expectation_suffix(r2);
    if (c.s.contact) {
        const double target = -2.0 * c.s.sphere_n;
        Extreme dev;
        double lo = 1e300, hi = -1e300;
        for (const auto& x : c.pts) {
            Vec z = z_field(c.phi(), c.J(), x);
            Vec xi = c.s.contact->xi(x);
            Mat g = c.M().metric_at(x);
            double comp = inner(g, z, xi) / inner(g, xi, xi);
            lo = std::min(lo, comp);
            hi = std::max(hi, comp);
            dev.max(std::abs(comp - target), x);
        }
        c.below(k, "z-vertical-component-vs-minus-2n", dev, c.cfg.tol.z_vertical, true).note =
            "target " + std::to_string(static_cast<int>(target));
        c.details[k] = ojson{{"z_vertical_min", lo}, {"z_vertical_max", hi}, {"target", target}};
    }
}

void check_prop41(Ctx& c) {
    const std::string k = "prop41";
    Extreme i, ii, iii, ident;
    for (const auto& x : c.pts) {
        Prop41Residuals r = prop41_equivalence(c.phi(), c.J(), x);
        i.max(r.cosymplectic, x);
        ii.max(r.eq7, x);
        iii.max(r.pullback_sum, x);
        ident.max(r.identity, x);
    }
    const double tol = c.cfg.tol.identity;
    c.below(k, "cosymplectic", i, tol, c.critical());
    c.below(k, "horizontal-z", ii, tol, c.critical());
    c.below(k, "pullback-metric-sum", iii, tol, std::nullopt);
    c.below(k, "proof-identity", ident, tol, true);
    int holding = (i.value < tol) + (ii.value < tol) + (iii.value < tol);
    c.add(k, "conditions-holding-not-exactly-two", holding == 2 ? 1.0 : 0.0, 0.5, "<", true).note =
        std::to_string(holding) + " of 3 hold; any two imply the third";
    c.add(k, "some-condition-fails-clearly", std::max({i.value, ii.value, iii.value}), 1e-2, ">", !c.critical());
}

void check_semiconformal(Ctx& c) {
    const std::string k = "semiconformal";
    Extreme crit, f_divergence;
    double lmin = 1e300, lmax = -1e300;
    try {
        for (const auto& x : c.pts) {
            SemiconformalResiduals r = semiconformal_criticality(c.phi(), c.J(), x);
            crit.max(r.criticality, x);
            f_divergence.max(r.f_divergence, x);
            lmin = std::min(lmin, r.lambda_sq);
            lmax = std::max(lmax, r.lambda_sq);
        }
    } catch (const GeometryError& e) {
        if (e.kind() != ErrorKind::NotSemiconformal) throw;
        c.add(k, "semiconformal", 1.0, 0.5, "<", c.s.expected.is_semiconformal ? std::optional<bool>(true)
                                                                               : std::nullopt)
            .note = e.what();
        return;
    }
    c.below(k, "f-divergence-formula", f_divergence, c.cfg.tol.identity, true);
    CheckRow& r = c.below(k, "criticality-combination", crit, c.cfg.tol.semiconformal, c.critical());
    r.label = std::string(r.measured ? "critical" : "non-critical") + expectation_suffix(r);
    c.add(k, "criticality-combination-fails-clearly", crit.value, 1e-2, ">", !c.critical(), crit.point);
    c.details[k] = ojson{{"lambda_sq_min", lmin}, {"lambda_sq_max", lmax}};
}

void check_weyl(Ctx& c) {
    const std::string k = "weyl";
    MatrixField F = induced_f_structure_field(c.phi(), c.J());
    Extreme comp, lc;
    try {
        for (const auto& x : c.pts) {
            WeylResiduals w = weyl_compat_residual(c.M(), F, x, c.diff());
            comp.max(w.compatible, x);
            lc.max(w.levi_civita, x);
        }
    } catch (const GeometryError& e) {
        if (e.kind() != ErrorKind::DimensionTooSmall) throw;
        c.add(k, "applicable", 0.0, 0.5, ">", std::nullopt).note = e.what();
        return;
    }
    c.below(k, "f-div-weyl", comp, c.cfg.tol.weyl, true);
    c.add(k, "f-div-levi-civita-fails-somewhere", lc.value, c.cfg.tol.weyl_levi_civita, ">", !c.critical(), lc.point);
}

// |a - b| <= rel * max(|a|, |b|, 0.1 |v|^2), reported as the left side over the scale.
double agreement(double a, double b, double v_sq) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 0.1 * v_sq, 1e-300});
}

HessianSummary& hessian_summary(Ctx& c, bool emit) {
    if (c.hess && !emit) return *c.hess;
    const std::string k = "hessian";
    HessianSummary hs;
    ojson d;
    auto random = random_trial_fields(c.cfg.random_fields, c.cfg.seed, c.phi(), c.embedding());
    HessianBatch rb;
    try {
        rb = hessian_batch(c.phi(), c.J(), c.embedding(), random);
    } catch (const GeometryError& e) {
        if (e.kind() != ErrorKind::NotCritical) throw;
        if (emit) {
            CheckRow& r = c.add(k, "defined-at-critical-map", 0.0, 0.5, ">", c.critical());
            r.label = "not critical: Hessian undefined" + expectation_suffix(r);
            r.note = e.what();
        }
        c.hess = hs;
        return *c.hess;
    }
    hs.defined = true;
    const std::string& cls = c.s.expected.stability_class;
    const bool expect_stable = cls == "stable" || cls == "stable-cond-a" || cls == "stable-cond-b";
    double min_ratio = 1e300;
    std::size_t argmin = 0;
    ojson vals = ojson::array();
    for (std::size_t i = 0; i < rb.values.size(); ++i) {
        const auto& h = rb.values[i];
        double ratio = h.total / h.v_l2_sq;
        if (ratio < min_ratio) min_ratio = ratio, argmin = i;
        vals.push_back(ojson{{"label", random[i].label}, {"hessian", h.total}, {"v_l2_sq", h.v_l2_sq}});
    }
    hs.min_random = min_ratio;
    d["random_fields"] = vals;
    d["max_horizontal_z"] = rb.max_eq7;
    if (emit) {
        CheckRow& r = c.add(k, "sampled-nonnegativity", min_ratio, -c.cfg.tol.nonneg, ">=",
                            expect_stable ? std::optional<bool>(true) : std::nullopt);
        r.label = std::string("sampled nonnegativity: ") + (r.measured ? "pass" : "fail");
        r.note = "min Hess/|v|^2 at " + random[argmin].label + "; evidence, not proof";
    }

    if (c.s.contact && c.s.embedding && c.s.sphere_n > 0) {
        const int n = c.s.sphere_n;
        KillingFamily fam = killing_fields_sphere(n, c.phi(), *c.s.contact, c.J(), *c.s.embedding, 10, c.cfg.seed);
        if (emit) {
            c.add(k, "killing-equation", fam.max_killing_residual, 1e-8, "<", true);
            c.add(k, "killing-perp-xi", fam.max_perp_xi_dot, 1e-8, "<", true);
            c.add(k, "killing-nabla-xi-identities", fam.max_nabla_xi_identity, c.cfg.tol.identity, "<", true);
        }
        HessianBatch kb = hessian_batch(c.phi(), c.J(), c.embedding(), fam.perp_xi);
        std::vector<VariationField> sas_fields = fam.perp_xi;
        const std::size_t n_rand = std::min<std::size_t>(10, random.size());
        sas_fields.insert(sas_fields.end(), random.begin(), random.begin() + static_cast<std::ptrdiff_t>(n_rand));
        auto sb = sasakian_hessian_batch(c.phi(), &*c.s.contact, c.J(), c.embedding(), sas_fields);
        const double closed = 4.0 * (1.0 - n);
        Extreme dev, agree_k, agree_r, neutral;
        double min_k = 1e300, reduced_sum = 0.0;
        ojson kv = ojson::array();
        Vec idx(1);
        for (std::size_t i = 0; i < kb.values.size(); ++i) {
            const auto& h = kb.values[i];
            const auto& q = sb[i];
            double ratio = h.total / h.x_l2_sq;
            idx[0] = static_cast<double>(i);
            if (n >= 2) dev.max(std::abs(ratio - closed) / std::abs(closed), idx);
            neutral.max(std::abs(h.total) / h.v_l2_sq, idx);
            agree_k.max(agreement(h.total, q.total, h.v_l2_sq), idx);
            min_k = std::min(min_k, h.total / h.v_l2_sq);
            reduced_sum += q.reduced / q.x_l2_sq;
            kv.push_back(ojson{{"label", fam.perp_xi[i].label},
                               {"hessian", h.total},
                               {"x_l2_sq", h.x_l2_sq},
                               {"ratio", ratio},
                               {"sasakian", q.total},
                               {"sasakian_pair_term", q.pair_term},
                               {"sasakian_div_term", q.div_term},
                               {"sasakian_reduced", q.reduced}});
        }
        for (std::size_t i = 0; i < n_rand; ++i) {
            const auto& h = rb.values[i];
            const auto& q = sb[kb.values.size() + i];
            idx[0] = static_cast<double>(i);
            agree_r.max(agreement(h.total, q.total, h.v_l2_sq), idx);
        }
        hs.has_killing = !kb.values.empty();
        hs.min_killing = min_k;
        d["killing_perp_xi"] = kv;
        d["closed_form_ratio"] = closed;
        if (emit && !kb.values.empty()) {
            if (n >= 2) {
                c.below(k, "killing-ratio-vs-4(1-n)", dev, c.cfg.tol.hessian_rel, true).note =
                    "max |Hess/int|X|^2 - 4(1-n)| / |4(1-n)| over generators (index in point)";
            } else {
                c.below(k, "killing-neutral", neutral, c.cfg.tol.nonneg, true).note = "max |Hess|/|v|^2";
            }
            c.below(k, "sasakian-agreement-killing", agree_k, c.cfg.tol.hessian_rel, true).note =
                "|a-b| / max(|a|,|b|,0.1|v|^2)";
            const double mean_reduced = reduced_sum / static_cast<double>(kb.values.size());
            CheckRow& r = c.add(k, "reduced-integrand-ratio-diagnostic",
                                closed == 0.0 ? std::abs(mean_reduced) : std::abs(mean_reduced - closed) / std::abs(closed),
                                c.cfg.tol.hessian_rel, "<", std::nullopt);
            r.note = "bracket plus coupling terms alone, mean ratio " + std::to_string(mean_reduced);
        }
        if (emit && n_rand > 0) {
            c.below(k, "sasakian-agreement-random", agree_r, c.cfg.tol.hessian_rel, true).note =
                "|a-b| / max(|a|,|b|,0.1|v|^2) over the first " + std::to_string(n_rand) + " random fields";
        }
    }
    if (emit) c.details[k] = d;
    c.hess = hs;
    return *c.hess;
}

void check_hessian(Ctx& c) { hessian_summary(c, true); }

void check_stability(Ctx& c) {
    const std::string k = "stability";
    const std::string& cls = c.s.expected.stability_class;
    std::vector<Vec> pts(c.pts.begin(), c.pts.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(20, c.pts.size())));
    StabilityConditions sc = stability_conditions(c.phi(), c.J(), pts);
    std::optional<bool> ea, eb;
    if (cls == "stable-cond-a") ea = true;
    if (cls == "stable-cond-b") eb = true;
    if (c.s.contact) ea = false;  // contact distributions are never integrable
    CheckRow& ra = c.add(k, "cond-a-horizontal-integrable", sc.cond_a, c.cfg.tol.stability, "<", ea);
    ra.label = std::string(ra.measured ? "weakly stable via (a)" : "(a) does not apply") + expectation_suffix(ra);
    CheckRow& rb = c.add(k, "cond-b-f-structure", sc.cond_b, c.cfg.tol.stability, "<", eb);
    rb.label = std::string(rb.measured ? "weakly stable via (b)" : "(b) does not apply") + expectation_suffix(rb);
    if (cls == "stable") {
        HessianSummary& hs = hessian_summary(c, false);
        CheckRow& r = c.add(k, "sampled-nonnegativity", hs.min_random, -c.cfg.tol.nonneg, ">=", true);
        r.label = std::string("sampled nonnegativity: ") + (r.measured ? "pass" : "fail");
    } else if (cls == "unstable") {
        HessianSummary& hs = hessian_summary(c, false);
        double m = std::min(hs.min_random, hs.has_killing ? hs.min_killing : 1e300);
        CheckRow& r = c.add(k, "negative-direction-found", m, -c.cfg.tol.nonneg, "<", true);
        r.label = std::string(r.measured ? "unstable: negative direction found" : "no negative direction found") +
                  expectation_suffix(r);
        r.note = "min Hess/|v|^2 over random and Killing fields";
    } else if (cls == "n/a") {
        CheckRow& r = c.add(k, "assessed", 0.0, 0.5, ">", std::nullopt);
        r.label = "not assessed: map is not critical";
    }
}

// ---------------------------------------------------------------- identities

void identity_suites(Ctx& c) {
    const std::string k = "identities";
    const double tol = c.cfg.tol.identity;
    Extreme pullback_deriv, split, f_divergence, proof, vcf, bracket, phinabla;
    std::size_t skipped_vcf = 0, vcf_points = 0, fdiv_points = 0;
    bool semiconformal = true;
    std::vector<VariationField> xfields;
    if (c.s.contact && c.s.embedding) xfields = random_trial_fields(3, c.cfg.seed + 1, c.phi(), c.embedding());
    for (const auto& x : c.pts) {
        Mat g = c.M().metric_at(x);
        Vec X = random_unit(c.rng, g), Y = random_unit(c.rng, g), Z = random_unit(c.rng, g);
        double a = nabla_pullback_metric(c.phi(), x, X, Y, Z, PullbackDerivativeRoute::SecondFundamentalForm);
        double b = nabla_pullback_metric(c.phi(), x, X, Y, Z, PullbackDerivativeRoute::DirectCovariant);
        pullback_deriv.max(std::abs(a - b), x);
        split.max(cond_1_1_residual(c.phi(), c.J(), x).split, x);
        if (semiconformal) {
            try {
                f_divergence.max(semiconformal_criticality(c.phi(), c.J(), x).f_divergence, x);
                ++fdiv_points;
            } catch (const GeometryError& e) {
                if (e.kind() != ErrorKind::NotSemiconformal) throw;
                semiconformal = false;
            }
        }
        proof.max(prop41_equivalence(c.phi(), c.J(), x).identity, x);
        FibreSplitting split = fibre_splitting(c.phi(), x);
        bool used = false;
        for (Eigen::Index j = 0; j < split.vertical_basis.cols(); ++j) {
            try {
                ScalarPair sp = vertical_codifferential_formula(c.phi(), c.J(), split.vertical_basis.col(j), x);
                vcf.max(std::abs(sp.lhs - sp.rhs), x);
                used = true;
            } catch (const GeometryError& e) {
                if (e.kind() != ErrorKind::EigenframeDegenerate) throw;
                ++skipped_vcf;
            }
        }
        vcf_points += used;
        if (!xfields.empty()) {
            for (const auto& f : xfields) {
                VectorField Xf = [&c, f](const Vec& y) {
                    return variation_domain_field(f, point_geometry(c.phi(), c.J(), c.embedding(), y));
                };
                bracket.max(bracket_identity_sasakian(c.M(), &*c.s.contact, Xf, x, c.diff()).residual, x);
            }
            Mat P = horizontal_projector(c.phi(), x);
            phinabla.max(phi_nabla_xi_identity(c.M(), &*c.s.contact, P * X, x, c.diff()).residual, x);
        }
    }
    c.below(k, "pullback-metric-derivative", pullback_deriv, tol, true).note = "two evaluation routes";
    c.below(k, "second-fundamental-form-split", split, tol, true);
    if (semiconformal) {
        c.below(k, "f-divergence-formula", f_divergence, tol, true).note = std::to_string(fdiv_points) + " points";
    }
    c.below(k, "codifferential-decomposition", proof, tol, true);
    if (vcf_points > 0) {
        c.below(k, "vertical-codifferential", vcf, tol, true).note =
            std::to_string(vcf_points) + " points, " + std::to_string(skipped_vcf) + " degenerate eigenframes skipped";
    }
    if (!xfields.empty()) {
        c.below(k, "sasakian-bracket", bracket, tol, true);
        c.below(k, "phi-equals-minus-nabla-xi", phinabla, tol, true);
    }
}

// ---------------------------------------------------------------- assembly

ojson row_json(const CheckRow& r) {
    ojson j;
    j["name"] = r.name;
    j["value"] = r.value;
    j["tolerance"] = r.tolerance;
    j["relation"] = r.relation;
    j["verdict"] = r.measured;
    j["expected"] = r.expected ? ojson(*r.expected) : ojson(nullptr);
    j["match"] = r.match();
    j["label"] = r.label;
    j["point"] = vec_json(r.point);
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

ojson scenario_json(const Scenario& s) {
    ojson j;
    j["id"] = s.id;
    j["description"] = s.description;
    j["domain"] = ojson{{"chart", s.domain->name()}, {"dim", s.domain->dim()},
                        {"quadrature_nodes", s.domain->quadrature().size()}};
    j["codomain"] = ojson{{"chart", s.codomain->name()}, {"dim", s.codomain->dim()}};
    j["map"] = s.map->id();
    if (s.sphere_n > 0) j["sphere_n"] = s.sphere_n;
    j["expected"] = ojson{{"is_phwc", s.expected.is_phwc},
                          {"is_semiconformal", s.expected.is_semiconformal},
                          {"is_critical_eq7", s.expected.is_critical_eq7},
                          {"minimal_fibres", s.expected.minimal_fibres},
                          {"stability_class", s.expected.stability_class}};
    j["registration"] = ojson{{"phwc", s.registration.phwc},
                              {"dilation", s.registration.dilation},
                              {"horizontal_z", s.registration.eq7},
                              {"mean_curvature", s.registration.mean_curvature},
                              {"structure", s.registration.structure},
                              {"sample_points", s.registration.sample_points}};
    return j;
}

ojson conventions_json() {
    return ojson{
        {"two_form_norm", kTwoFormConvention},
        {"codifferential", "delta w = -sum_a i_{e_a} nabla_{e_a} w"},
        {"energies", "E = 1/2 int |dphi|^2, E_inf = 1/2 int |phi^*Omega|^2, E_FH = E + alpha E_inf, E_p = 1/p int |dphi|^p"},
        {"hessian", "Hess(v,v) = int |phi^* d(i_v Omega)|^2 + int Omega(v, nabla_Z v), Z = (delta phi^*Omega)^sharp"},
        {"hessian_agreement", "|a-b| / max(|a|, |b|, 0.1 |v|^2)"},
        {"relation", "verdict is (value relation tolerance)"}};
}

Scenario make_scenario(const RunConfig& cfg) {
    ScenarioOptions so;
    so.n = cfg.n;
    so.order = cfg.order;
    so.diff.fd_step = cfg.fd_step;
    return build_scenario(cfg.scenario, so);
}

RunReport assemble(const RunConfig& cfg, const std::string& mode, const std::vector<std::string>& checks) {
    cfg.validate();
    auto t0 = std::chrono::steady_clock::now();
    Scenario s = make_scenario(cfg);
    Ctx c{cfg, s, s.domain->sample_points(static_cast<std::size_t>(cfg.sample_points), cfg.seed), {}, ojson::object(),
          std::nullopt, std::mt19937_64(cfg.seed)};
    ojson checks_json = ojson::object();
    for (const auto& name : checks) {
        std::size_t first = c.rows.size();
        if (name == "phwc") check_phwc(c);
        else if (name == "structure") check_structure(c);
        else if (name == "tension") check_tension(c);
        else if (name == "energy") check_energy(c);
        else if (name == "criticality") check_criticality(c);
        else if (name == "prop41") check_prop41(c);
        else if (name == "semiconformal") check_semiconformal(c);
        else if (name == "weyl") check_weyl(c);
        else if (name == "hessian") check_hessian(c);
        else if (name == "stability") check_stability(c);
        else if (name == "identities") identity_suites(c);
        else config_error("unknown check '" + name + "'");
        ojson rows = ojson::array();
        for (std::size_t i = first; i < c.rows.size(); ++i) rows.push_back(row_json(c.rows[i]));
        ojson entry;
        entry["rows"] = rows;
        if (c.details.contains(name)) entry["details"] = c.details[name];
        checks_json[name] = entry;
    }
    RunReport r;
    r.rows = std::move(c.rows);
    ojson mism = ojson::array();
    for (const auto& row : r.rows)
        if (!row.match()) mism.push_back(row.check + "/" + row.name);
    r.body["schema"] = kReportSchema;
    r.body["mode"] = mode;
    r.body["config"] = config_to_json(cfg);
    r.body["scenario"] = scenario_json(s);
    r.body["conventions"] = conventions_json();
    r.body["checks"] = checks_json;
    r.body["summary"] = ojson{{"rows", r.rows.size()}, {"mismatches", mism}, {"all_match", mism.empty()}};
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

const std::vector<std::string>& all_checks() {
    static const std::vector<std::string> c{"phwc",   "structure",     "tension", "energy",  "criticality",
                                            "prop41", "semiconformal", "weyl",    "hessian", "stability"};
    return c;
}

void RunConfig::validate() const {
    auto ids = scenario_ids();
    if (std::find(ids.begin(), ids.end(), scenario) == ids.end())
        throw GeometryError(ErrorKind::UnknownScenario, "unknown scenario '" + scenario + "'");
    for (const auto& ch : checks) {
        if (std::find(all_checks().begin(), all_checks().end(), ch) == all_checks().end())
            config_error("unknown check '" + ch + "'");
    }
    if (n < 1 || n > 3) config_error("n must be 1, 2 or 3");
    if (order != 0 && (order < 2 || order > 64)) config_error("order must be 0 or in [2, 64]");
    if (!(fd_step >= 1e-8 && fd_step <= 1e-2)) config_error("fd_step must lie in [1e-8, 1e-2]");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) config_error("alpha must be finite and >= 0");
    if (!(p >= 1.0) || !std::isfinite(p)) config_error("p must be finite and >= 1");
    if (sample_points < 1 || sample_points > 100000) config_error("sample_points must lie in [1, 100000]");
    if (random_fields < 1 || random_fields > 1000) config_error("random_fields must lie in [1, 1000]");
    const double tols[] = {tol.phwc,     tol.structure, tol.holomorphy,    tol.tension,    tol.identity,
                           tol.eq7,      tol.z_vertical, tol.semiconformal, tol.weyl,       tol.weyl_levi_civita,
                           tol.energy_rel, tol.energy_identity, tol.hessian_rel, tol.nonneg, tol.stability};
    for (double t : tols)
        if (!(t > 0.0) || !std::isfinite(t)) config_error("tolerances must be finite and > 0");
}

std::vector<std::string> RunConfig::effective_checks() const {
    if (checks.empty()) return all_checks();
    // catalogue order, duplicates dropped
    std::vector<std::string> out;
    for (const auto& c : all_checks())
        if (std::find(checks.begin(), checks.end(), c) != checks.end()) out.push_back(c);
    return out;
}

namespace {

struct TolKey {
    const char* key;
    double RunTolerances::*field;
};
const TolKey kTolKeys[] = {{"phwc", &RunTolerances::phwc},
                           {"structure", &RunTolerances::structure},
                           {"holomorphy", &RunTolerances::holomorphy},
                           {"tension", &RunTolerances::tension},
                           {"identity", &RunTolerances::identity},
                           {"horizontal_z", &RunTolerances::eq7},
                           {"z_vertical", &RunTolerances::z_vertical},
                           {"semiconformal", &RunTolerances::semiconformal},
                           {"weyl", &RunTolerances::weyl},
                           {"weyl_levi_civita", &RunTolerances::weyl_levi_civita},
                           {"energy_rel", &RunTolerances::energy_rel},
                           {"energy_identity", &RunTolerances::energy_identity},
                           {"hessian_rel", &RunTolerances::hessian_rel},
                           {"nonneg", &RunTolerances::nonneg},
                           {"stability", &RunTolerances::stability}};

template <class T>
T get_as(const nlohmann::json& v, const std::string& key) {
    try {
        return v.get<T>();
    } catch (const nlohmann::json::exception&) {
        config_error("config key '" + key + "' has the wrong type");
    }
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j, RunConfig c) {
    if (!j.is_object()) config_error("config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        const auto& v = it.value();
        if (key == "scenario") {
            c.scenario = get_as<std::string>(v, key);
        } else if (key == "checks") {
            c.checks = get_as<std::vector<std::string>>(v, key);
        } else if (key == "n") {
            c.n = get_as<int>(v, key);
        } else if (key == "order") {
            c.order = get_as<int>(v, key);
        } else if (key == "fd_step") {
            c.fd_step = get_as<double>(v, key);
        } else if (key == "alpha") {
            c.alpha = get_as<double>(v, key);
        } else if (key == "p") {
            c.p = get_as<double>(v, key);
        } else if (key == "seed") {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
                config_error("seed must be a non-negative integer");
            c.seed = v.get<unsigned long long>();
        } else if (key == "sample_points") {
            c.sample_points = get_as<int>(v, key);
        } else if (key == "random_fields") {
            c.random_fields = get_as<int>(v, key);
        } else if (key == "tolerances") {
            if (!v.is_object()) config_error("tolerances must be an object");
            for (auto t = v.begin(); t != v.end(); ++t) {
                auto hit = std::find_if(std::begin(kTolKeys), std::end(kTolKeys),
                                        [&](const TolKey& tk) { return t.key() == tk.key; });
                if (hit == std::end(kTolKeys)) config_error("unknown tolerance key '" + t.key() + "'");
                c.tol.*(hit->field) = get_as<double>(t.value(), t.key());
            }
        } else {
            config_error("unknown config key '" + key + "'");
        }
    }
    return c;
}

nlohmann::ordered_json config_to_json(const RunConfig& c) {
    ojson j;
    j["scenario"] = c.scenario;
    j["checks"] = c.effective_checks();
    j["n"] = c.n;
    j["order"] = c.order;
    j["fd_step"] = c.fd_step;
    j["alpha"] = c.alpha;
    j["p"] = c.p;
    j["seed"] = c.seed;
    j["sample_points"] = c.sample_points;
    j["random_fields"] = c.random_fields;
    ojson t;
    for (const auto& tk : kTolKeys) t[tk.key] = c.tol.*(tk.field);
    j["tolerances"] = t;
    return j;
}

bool RunReport::all_match() const {
    return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.match(); });
}

nlohmann::ordered_json RunReport::document() const {
    ojson d;
    d["body"] = body;
    d["timing"] = ojson{{"wall_seconds", wall_seconds}};
    return d;
}

RunReport run(const RunConfig& cfg) { return assemble(cfg, "run", cfg.effective_checks()); }

RunReport run_identities(const RunConfig& cfg) { return assemble(cfg, "identities", {"identities"}); }

std::string report_csv(const RunReport& r) {
    std::ostringstream os;
    os << "check,name,value,tolerance,relation,verdict,expected,match,label,point\n";
    for (const auto& row : r.rows) {
        std::string pt;
        for (Eigen::Index i = 0; i < row.point.size(); ++i) pt += (i ? " " : "") + fmt(row.point[i]);
        os << row.check << ',' << row.name << ',' << fmt(row.value) << ',' << fmt(row.tolerance) << ','
           << csv_field(row.relation) << ',' << (row.measured ? "true" : "false") << ','
           << (row.expected ? (*row.expected ? "true" : "false") : "") << ',' << (row.match() ? "true" : "false")
           << ',' << csv_field(row.label) << ',' << csv_field(pt) << '\n';
    }
    return os.str();
}

std::string report_table(const RunReport& r) {
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "%-14s %-40s %12s %3s %10s  %-6s %-8s %s\n", "check", "name", "value", "rel",
                  "tol", "match", "expected", "label");
    os << line;
    for (const auto& row : r.rows) {
        std::snprintf(line, sizeof line, "%-14s %-40s %12.4e %3s %10.3e  %-6s %-8s %s\n", row.check.c_str(),
                      row.name.c_str(), row.value, row.relation.c_str(), row.tolerance, row.match() ? "yes" : "NO",
                      row.expected ? (*row.expected ? "true" : "false") : "-", row.label.c_str());
        os << line;
    }
    std::snprintf(line, sizeof line, "%zu rows, %s, %.2f s\n", r.rows.size(),
                  r.all_match() ? "all verdicts match" : "VERDICT MISMATCH", r.wall_seconds);
    os << line;
    return os.str();
}

}  // namespace phwc
