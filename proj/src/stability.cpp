#include "phwc/stability.hpp"

#include "phwc/errors.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace phwc {

PointGeometry point_geometry(const SmoothMap& phi, const MatrixField& J, const SmoothFunction* embedding,
                             const Vec& x) {
    PointGeometry pg;
    pg.x = x;
    MapJet j = phi.jet(x, false);
    pg.y = j.y;
    pg.dphi = j.dphi;
    pg.g = phi.domain().metric_at(x);
    pg.ginv = pg.g.inverse();
    pg.h = phi.codomain().metric_at(j.y);
    pg.omega = J(j.y).transpose() * pg.h;
    pg.P_H = horizontal_projector(pg.g, pg.h, pg.dphi);
    if (embedding) {
        pg.p = (*embedding)(x);
        pg.E = embedding->jacobian(x, phi.diff_config());
    }
    return pg;
}

Vec variation_domain_field(const VariationField& f, const PointGeometry& pg) {
    if (!f.X) throw GeometryError(ErrorKind::InvalidArgument, "variation field " + f.label + " has no domain field");
    return f.X(pg);
}

Vec variation_value(const VariationField& f, const PointGeometry& pg) {
    if (f.X) return pg.dphi * f.X(pg);
    if (!f.v) throw GeometryError(ErrorKind::InvalidArgument, "variation field " + f.label + " is empty");
    return f.v(pg);
}

namespace {

// Stencil x, x + h e_i, x - h e_i stored as [0], [1 + 2i], [2 + 2i].
std::vector<PointGeometry> stencil(const SmoothMap& phi, const MatrixField& J, const SmoothFunction* embedding,
                                   const Vec& x, double h) {
    const int m = phi.domain().dim();
    std::vector<PointGeometry> out;
    out.reserve(static_cast<std::size_t>(2 * m + 1));
    out.push_back(point_geometry(phi, J, embedding, x));
    for (int i = 0; i < m; ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        out.push_back(point_geometry(phi, J, embedding, xp));
        out.push_back(point_geometry(phi, J, embedding, xm));
    }
    return out;
}

// d beta for beta = dphi^T Omega^T v, from the stencil values.
Mat d_beta(const std::vector<PointGeometry>& st, const std::vector<Vec>& v, double h) {
    const auto m = st[0].x.size();
    Mat D(m, m);  // D(i, :) = d_i beta
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& a = st[static_cast<std::size_t>(1 + 2 * i)];
        const auto& b = st[static_cast<std::size_t>(2 + 2 * i)];
        Vec bp = a.dphi.transpose() * (a.omega.transpose() * v[static_cast<std::size_t>(1 + 2 * i)]);
        Vec bm = b.dphi.transpose() * (b.omega.transpose() * v[static_cast<std::size_t>(2 + 2 * i)]);
        D.row(i) = ((bp - bm) / (2.0 * h)).transpose();
    }
    return D - D.transpose();
}

Vec stencil_partial(const std::vector<Vec>& vals, int i, double h) {
    return (vals[static_cast<std::size_t>(1 + 2 * i)] - vals[static_cast<std::size_t>(2 + 2 * i)]) / (2.0 * h);
}

// Z_phi at the centre of a stencil.
Vec z_from_stencil(const Christoffel& G, const std::vector<PointGeometry>& st, double h) {
    const auto& c = st[0];
    const int m = static_cast<int>(c.x.size());
    auto W = [](const PointGeometry& pg) -> Mat { return pg.dphi.transpose() * pg.omega * pg.dphi; };
    Mat W0 = W(c);
    std::vector<Mat> nabla(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        Mat A = G.along(Vec::Unit(m, i));
        nabla[static_cast<std::size_t>(i)] =
            (W(st[static_cast<std::size_t>(1 + 2 * i)]) - W(st[static_cast<std::size_t>(2 + 2 * i)])) / (2.0 * h) -
            A.transpose() * W0 - W0 * A;
    }
    Mat E = gram_schmidt(c.g, Mat::Identity(m, m));
    Vec delta = Vec::Zero(m);
    for (int a = 0; a < m; ++a) {
        Vec e = E.col(a);
        Mat ne = Mat::Zero(m, m);
        for (int i = 0; i < m; ++i) ne += e[i] * nabla[static_cast<std::size_t>(i)];
        delta -= (e.transpose() * ne).transpose();
    }
    return c.ginv * delta;
}

}  // namespace

HessianBatch hessian_batch(const SmoothMap& phi, const MatrixField& J, const SmoothFunction* embedding,
                           const std::vector<VariationField>& fields, const HessianOptions& opts) {
    const ChartManifold& M = phi.domain();
    const ChartManifold& N = phi.codomain();
    const auto& cfg = phi.diff_config();
    const double h = cfg.fd_step;
    const int m = M.dim();
    const auto& q = M.quadrature();
    const std::size_t nf = fields.size();
    std::vector<std::vector<double>> t1(nf, std::vector<double>(q.size())), t2 = t1, vv = t1, xx = t1;
    HessianBatch out;
    for (std::size_t k = 0; k < q.size(); ++k) {
        const Vec& x = q.nodes[k];
        const double w = q.weights[k] * q.volume_weights[k];
        auto st = stencil(phi, J, embedding, x, h);
        const auto& c = st[0];
        Christoffel GM = christoffel_at(M, x, cfg);
        Vec Z = z_from_stencil(GM, st, h);
        double eq7 = norm(c.g, c.P_H * Z);
        out.max_eq7 = std::max(out.max_eq7, eq7);
        if (!opts.allow_noncritical && eq7 > opts.critical_tol) {
            std::ostringstream os;
            os << "eq7 residual " << eq7 << " at node (" << x.transpose() << ") exceeds " << opts.critical_tol;
            throw GeometryError(ErrorKind::NotCritical, os.str());
        }
        Christoffel GN = christoffel_at(N, c.y, cfg);
        Vec dZ = c.dphi * Z;
        for (std::size_t f = 0; f < nf; ++f) {
            std::vector<Vec> v(st.size());
            for (std::size_t s = 0; s < st.size(); ++s) v[s] = variation_value(fields[f], st[s]);
            Mat db = d_beta(st, v, h);
            Vec dv = GN.contract(dZ, v[0]);
            for (int i = 0; i < m; ++i) {
                if (Z[i] != 0.0) dv += Z[i] * stencil_partial(v, i, h);
            }
            t1[f][k] = w * two_form_norm_sq(c.ginv, db);
            t2[f][k] = w * v[0].dot(c.omega * dv);
            vv[f][k] = w * inner(c.h, v[0], v[0]);
            if (fields[f].X) {
                Vec X0 = fields[f].X(c);
                xx[f][k] = w * inner(c.g, X0, X0);
            } else {
                xx[f][k] = 0.0;
            }
        }
    }
    for (std::size_t f = 0; f < nf; ++f) {
        HessianValue hv;
        hv.pullback_term = pairwise_sum(t1[f]);
        hv.z_term = pairwise_sum(t2[f]);
        hv.total = hv.pullback_term + hv.z_term;
        hv.v_l2_sq = pairwise_sum(vv[f]);
        hv.x_l2_sq = pairwise_sum(xx[f]);
        out.values.push_back(hv);
    }
    return out;
}

HessianValue hessian(const SmoothMap& phi, const MatrixField& J, const SmoothFunction* embedding,
                     const VariationField& field, const HessianOptions& opts) {
    return hessian_batch(phi, J, embedding, {field}, opts).values.at(0);
}

std::vector<SasakianHessianValue> sasakian_hessian_batch(const SmoothMap& phi, const ContactMetricStructure* contact,
                                                         const MatrixField& J, const SmoothFunction* embedding,
                                                         const std::vector<VariationField>& fields) {
    if (!contact) throw GeometryError(ErrorKind::NotSasakianScenario, "scenario has no Sasakian domain");
    const ChartManifold& M = phi.domain();
    const auto& cfg = phi.diff_config();
    const double h = cfg.fd_step;
    const int m = M.dim();
    const int n = phi.codomain().dim() / 2;
    const auto& q = M.quadrature();
    const std::size_t nf = fields.size();
    for (const auto& f : fields) {
        if (!f.X) throw GeometryError(ErrorKind::InvalidArgument, "Sasakian Hessian needs a horizontal domain field");
    }
    std::vector<std::vector<double>> pair(nf, std::vector<double>(q.size())), dv = pair, br = pair, cp = pair,
                                                                               xx = pair;
    for (std::size_t k = 0; k < q.size(); ++k) {
        const Vec& x = q.nodes[k];
        const double w = q.weights[k] * q.volume_weights[k];
        auto st = stencil(phi, J, embedding, x, h);
        const auto& c = st[0];
        Christoffel GM = christoffel_at(M, x, cfg);
        Mat phit = contact->phi(x);
        std::vector<Vec> xi(st.size());
        for (std::size_t s = 0; s < st.size(); ++s) xi[s] = contact->xi(st[s].x);
        FibreSplitting split = fibre_splitting(phi, x, phi.codomain().dim());
        Mat frame = f_adapted_basis(c.g, phit, split.horizontal_basis);
        for (std::size_t f = 0; f < nf; ++f) {
            std::vector<Vec> X(st.size()), v(st.size());
            for (std::size_t s = 0; s < st.size(); ++s) {
                X[s] = fields[f].X(st[s]);
                v[s] = st[s].dphi * X[s];
            }
            Mat db = d_beta(st, v, h);
            double ps = 0.0;
            for (int a = 0; a < frame.cols(); ++a) {
                for (int b = a + 1; b < frame.cols(); ++b) {
                    if (a / 2 == b / 2) continue;
                    double val = frame.col(a).dot(db * frame.col(b));
                    ps += val * val;
                }
            }
            double div = 0.0;
            Vec bracket = Vec::Zero(m);
            for (int i = 0; i < m; ++i) {
                Vec dX = stencil_partial(X, i, h);
                div += dX[i] + GM.gamma[static_cast<std::size_t>(i)].row(i).dot(X[0]);
                bracket += xi[0][i] * dX - X[0][i] * stencil_partial(xi, i, h);
            }
            pair[f][k] = w * ps;
            dv[f][k] = w * div * div;
            br[f][k] = w * inner(c.g, bracket, bracket);
            cp[f][k] = w * (-2.0 * n) * inner(c.g, phit * X[0], bracket);
            xx[f][k] = w * inner(c.g, X[0], X[0]);
        }
    }
    std::vector<SasakianHessianValue> out;
    for (std::size_t f = 0; f < nf; ++f) {
        SasakianHessianValue s;
        s.pair_term = pairwise_sum(pair[f]);
        s.div_term = pairwise_sum(dv[f]);
        s.bracket_term = pairwise_sum(br[f]);
        s.coupling_term = pairwise_sum(cp[f]);
        s.reduced = s.bracket_term + s.coupling_term;
        s.total = s.pair_term + s.div_term + s.reduced;
        s.x_l2_sq = pairwise_sum(xx[f]);
        out.push_back(s);
    }
    return out;
}

namespace {

Mat ambient_complex_structure(int n) {
    Mat Ja = Mat::Zero(2 * n + 2, 2 * n + 2);
    for (int k = 0; k <= n; ++k) {
        Ja(2 * k + 1, 2 * k) = 1.0;
        Ja(2 * k, 2 * k + 1) = -1.0;
    }
    return Ja;
}

VariationField killing_field(const Mat& A, const std::string& label) {
    VariationField f;
    f.label = label;
    f.generator = A;
    f.X = [A](const PointGeometry& pg) -> Vec {
        if (pg.E.size() == 0) throw GeometryError(ErrorKind::InvalidArgument, "Killing field needs the sphere embedding");
        return pg.ginv * (pg.E.transpose() * (A * pg.p));
    };
    return f;
}

// sqrt(tr(g^-1 S g^-1 S)) for a symmetric (0,2)-tensor S.
double tensor_norm(const Mat& ginv, const Mat& S) { return std::sqrt(std::max(0.0, (ginv * S * ginv * S).trace())); }

// five-point stencil; the Killing check wants better than the central difference gives
Vec partial4(const VectorField& f, const Vec& x, int i, double h) {
    auto at = [&](double s) {
        Vec y = x;
        y[i] += s;
        return f(y);
    };
    return (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
}

}  // namespace

KillingFamily killing_fields_sphere(int n, const SmoothMap& phi, const ContactMetricStructure& contact,
                                    const MatrixField& J, const SmoothFunction& embedding, std::size_t samples,
                                    unsigned long long seed) {
    if (n < 1) throw GeometryError(ErrorKind::InvalidArgument, "killing_fields_sphere needs n >= 1");
    const ChartManifold& M = phi.domain();
    if (M.dim() != 2 * n + 1) throw GeometryError(ErrorKind::InvalidArgument, "domain is not S^{2n+1}");
    const int d = 2 * n + 2;
    const auto& cfg = phi.diff_config();
    Mat Ja = ambient_complex_structure(n);
    KillingFamily fam;
    std::vector<Mat> projected;
    for (int a = 0; a < d; ++a) {
        for (int b = a + 1; b < d; ++b) {
            Mat A = Mat::Zero(d, d);
            A(a, b) = 1.0;
            A(b, a) = -1.0;
            fam.all.push_back(killing_field(A, "so(" + std::to_string(d) + ")[" + std::to_string(a) + "," +
                                                   std::to_string(b) + "]"));
            projected.push_back(0.5 * (A + Ja * A * Ja));
        }
    }
    // Frobenius Gram-Schmidt of the anticommuting projections
    std::vector<Mat> basis;
    for (const auto& P : projected) {
        Mat R = P;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& B : basis) R -= (R.cwiseProduct(B).sum()) * B;
        }
        double nr = R.norm();
        if (nr > 1e-10) basis.push_back(R / nr);
    }
    for (std::size_t k = 0; k < basis.size(); ++k) fam.perp_xi.push_back(killing_field(basis[k], "perp-xi[" + std::to_string(k) + "]"));

    auto pts = M.sample_points(samples, seed);
    auto as_field = [&](const VariationField& f) -> VectorField {
        return [&phi, &J, &embedding, f](const Vec& y) { return f.X(point_geometry(phi, J, &embedding, y)); };
    };
    for (const auto& x : pts) {
        PointGeometry pg = point_geometry(phi, J, &embedding, x);
        auto dg = M.metric_derivatives(x, cfg);
        Vec xi = contact.xi(x);
        Mat phit = contact.phi(x);
        for (const auto& f : fam.all) {
            VectorField X = as_field(f);
            Vec X0 = f.X(pg);
            Mat L = Mat::Zero(M.dim(), M.dim());
            for (int k = 0; k < M.dim(); ++k) L += X0[k] * dg[static_cast<std::size_t>(k)];
            Mat DX(M.dim(), M.dim());  // DX(k, i) = d_i X^k
            for (int i = 0; i < M.dim(); ++i) DX.col(i) = partial4(X, x, i, 1e-4);
            L += pg.g * DX + DX.transpose() * pg.g;
            fam.max_killing_residual = std::max(fam.max_killing_residual, tensor_norm(pg.ginv, L));
        }
        VectorField xi_field = contact.xi;
        for (const auto& f : fam.perp_xi) {
            Vec X0 = f.X(pg);
            fam.max_perp_xi_dot = std::max(fam.max_perp_xi_dot, std::abs(inner(pg.g, X0, xi)));
            Vec nx = covariant_derivative_vector(M, xi_field, as_field(f), x, cfg);
            double xsq = inner(pg.g, X0, X0);
            fam.max_nabla_xi_identity = std::max({fam.max_nabla_xi_identity, std::abs(inner(pg.g, nx, nx) - xsq),
                                                  std::abs(inner(pg.g, nx, phit * X0) - xsq)});
        }
    }
    return fam;
}

std::vector<VariationField> random_trial_fields(int count, unsigned long long seed, const SmoothMap& phi,
                                                const SmoothFunction* embedding) {
    const int m = phi.domain().dim();
    const int d = embedding ? embedding->out_dim() : m;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<VariationField> out;
    for (int c = 0; c < count; ++c) {
        Vec c0(d);
        Mat B(d, d);
        std::vector<Mat> Q(static_cast<std::size_t>(d), Mat(d, d));
        for (int i = 0; i < d; ++i) c0[i] = normal(rng);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) B(i, j) = normal(rng);
        for (auto& q : Q)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) q(i, j) = normal(rng);
        const bool ambient = embedding != nullptr;
        VariationField f;
        f.label = "random[" + std::to_string(c) + "]";
        f.X = [c0, B, Q, ambient](const PointGeometry& pg) -> Vec {
            const Vec& p = ambient ? pg.p : pg.x;
            Vec P = c0 + B * p;
            for (std::size_t k = 0; k < Q.size(); ++k) P[static_cast<Eigen::Index>(k)] += p.dot(Q[k] * p);
            Vec comp = ambient ? Vec(pg.ginv * (pg.E.transpose() * P)) : P;
            return pg.P_H * comp;
        };
        out.push_back(std::move(f));
    }
    return out;
}

IdentityPair bracket_identity_sasakian(const ChartManifold& M, const ContactMetricStructure* contact,
                                       const VectorField& X, const Vec& x, const DifferentiationConfig& cfg) {
    if (!contact) throw GeometryError(ErrorKind::NotSasakianScenario, "scenario has no Sasakian domain");
    IdentityPair r;
    r.lhs = lie_bracket(contact->xi, X, x, cfg.fd_step);
    r.rhs = covariant_derivative_vector(M, contact->xi, X, x, cfg) + contact->phi(x) * X(x);
    r.residual = norm(M.metric_at(x), r.lhs - r.rhs);
    return r;
}

IdentityPair phi_nabla_xi_identity(const ChartManifold& M, const ContactMetricStructure* contact, const Vec& X,
                                   const Vec& x, const DifferentiationConfig& cfg) {
    if (!contact) throw GeometryError(ErrorKind::NotSasakianScenario, "scenario has no Sasakian domain");
    IdentityPair r;
    r.lhs = contact->phi(x) * X;
    VectorField Xc = [X](const Vec&) { return X; };
    r.rhs = -covariant_derivative_vector(M, Xc, contact->xi, x, cfg);
    r.residual = norm(M.metric_at(x), r.lhs - r.rhs);
    return r;
}

namespace {

struct Eigenframe {
    Mat frame;                   // columns E_1, F E_1, E_2, F E_2, ...
    std::vector<double> lambda;  // lambda_i^2 per pair
};

Eigenframe eigenframe_at(const SmoothMap& phi, const MatrixField& F, const Vec& y) {
    const int n = phi.codomain().dim();
    FibreSplitting split = fibre_splitting(phi, y, n);
    Mat g = phi.domain().metric_at(y);
    Mat pull = pullback_metric(phi, y);
    const Mat& H = split.horizontal_basis;
    Eigen::SelfAdjointEigenSolver<Mat> es(H.transpose() * pull * H);
    const auto& ev = es.eigenvalues();
    Mat Fy = F(y);
    Eigenframe out;
    out.frame.resize(g.rows(), 0);
    Eigen::Index start = 0;
    while (start < ev.size()) {
        Eigen::Index end = start + 1;
        while (end < ev.size() && ev[end] - ev[end - 1] < 1e-6 * std::max(1.0, std::abs(ev[end]))) ++end;
        Mat U = H * es.eigenvectors().middleCols(start, end - start);
        Mat Pi = U * U.transpose() * g;  // coordinate projector onto the cluster
        Mat Q = gram_schmidt(g, Pi, 1e-8);
        Mat A = f_adapted_basis(g, Fy, Q);
        for (Eigen::Index c = 0; c + 1 < A.cols(); c += 2) {
            out.frame.conservativeResize(Eigen::NoChange, out.frame.cols() + 2);
            out.frame.col(out.frame.cols() - 2) = A.col(c);
            out.frame.col(out.frame.cols() - 1) = A.col(c + 1);
            out.lambda.push_back(inner(pull, A.col(c), A.col(c)));
        }
        start = end;
    }
    return out;
}

}  // namespace

ScalarPair vertical_codifferential_formula(const SmoothMap& phi, const MatrixField& J, const Vec& V, const Vec& x) {
    const ChartManifold& M = phi.domain();
    const auto& cfg = phi.diff_config();
    MatrixField F = induced_f_structure_field(phi, J);
    ScalarPair r;
    Vec delta = codifferential_two_form(M, pullback_two_form_field(phi, J), x, cfg);
    r.lhs = -delta.dot(V);
    Eigenframe ef = eigenframe_at(phi, F, x);
    Mat g = M.metric_at(x);
    for (std::size_t i = 0; i < ef.lambda.size(); ++i) {
        const Eigen::Index c = static_cast<Eigen::Index>(2 * i);
        VectorField E = [&phi, &F, c](const Vec& y) -> Vec { return eigenframe_at(phi, F, y).frame.col(c); };
        VectorField FE = [&phi, &F, c](const Vec& y) -> Vec { return eigenframe_at(phi, F, y).frame.col(c + 1); };
        r.rhs += ef.lambda[i] * inner(g, lie_bracket(E, FE, x, cfg.fd_step), V);
    }
    return r;
}

Mat horizontal_frame(const SmoothMap& phi, const Vec& x) {
    Mat g = phi.domain().metric_at(x);
    Mat P = horizontal_projector(phi, x);
    Mat Q = gram_schmidt(g, P, 1e-8);
    if (Q.cols() != phi.codomain().dim()) throw GeometryError(ErrorKind::RankDeficient, "horizontal frame degenerates");
    return Q;
}

StabilityConditions stability_conditions(const SmoothMap& phi, const MatrixField& J, const std::vector<Vec>& points) {
    const ChartManifold& M = phi.domain();
    const auto& cfg = phi.diff_config();
    const int n = phi.codomain().dim();
    MatrixField F = induced_f_structure_field(phi, J);
    StabilityConditions sc;
    for (const auto& x : points) {
        Mat g = M.metric_at(x);
        Mat P = horizontal_projector(phi, x);
        Mat Pv = Mat::Identity(P.rows(), P.cols()) - P;
        for (int a = 0; a < n; ++a) {
            VectorField Ha = [&phi, a](const Vec& y) -> Vec { return horizontal_frame(phi, y).col(a); };
            for (int b = a + 1; b < n; ++b) {
                VectorField Hb = [&phi, b](const Vec& y) -> Vec { return horizontal_frame(phi, y).col(b); };
                sc.cond_a = std::max(sc.cond_a, norm(g, Pv * lie_bracket(Ha, Hb, x, cfg.fd_step)));
            }
        }
        sc.cond_b = std::max(sc.cond_b, cond_b_residual(M, F, x, cfg));
    }
    return sc;
}

}  // namespace phwc
