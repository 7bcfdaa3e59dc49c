#include "phwc/variational.hpp"

#include "phwc/errors.hpp"

#include <cmath>
#include <complex>
#include <sstream>

namespace phwc {

Mat pullback_two_form(const SmoothMap& phi, const MatrixField& J, const Vec& x) {
    MapJet j = phi.jet(x, false);
    Mat h = phi.codomain().metric_at(j.y);
    Mat omega = J(j.y).transpose() * h;
    return j.dphi.transpose() * omega * j.dphi;
}

MatrixField pullback_two_form_field(const SmoothMap& phi, const MatrixField& J) {
    return [&phi, J](const Vec& x) { return pullback_two_form(phi, J, x); };
}

EnergyReport fh_energy(const SmoothMap& phi, const MatrixField& J, double alpha, double p) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw GeometryError(ErrorKind::InvalidArgument, "alpha must be >= 0");
    if (!(p >= 1.0) || !std::isfinite(p)) throw GeometryError(ErrorKind::InvalidArgument, "p must be >= 1");
    const ChartManifold& M = phi.domain();
    const auto& q = M.quadrature();
    std::vector<double> dens(q.size()), strong(q.size()), full(q.size()), pth(q.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
        const Vec& x = q.nodes[k];
        MapJet j = phi.jet(x, false);
        Mat ginv = M.metric_inverse_at(x);
        Mat h = phi.codomain().metric_at(j.y);
        Mat pull = j.dphi.transpose() * h * j.dphi;
        double e = (ginv * pull).trace();
        Mat w = j.dphi.transpose() * (J(j.y).transpose() * h) * j.dphi;
        double s = two_form_norm_sq(ginv, w);
        double wk = q.weights[k] * q.volume_weights[k];
        if (!std::isfinite(e) || !std::isfinite(s)) {
            throw GeometryError(ErrorKind::NonFiniteIntegrand, "energy density not finite at a quadrature node");
        }
        dens[k] = wk * e;
        strong[k] = wk * s;
        full[k] = wk * (e + alpha * s);
        pth[k] = wk * std::pow(std::max(e, 0.0), 0.5 * p);
    }
    EnergyReport r;
    r.alpha = alpha;
    r.p = p;
    r.dirichlet = 0.5 * pairwise_sum(dens);
    r.fh_infinity = 0.5 * pairwise_sum(strong);
    // own sum, so the alpha identity is a check and not a definition
    r.fh_alpha = 0.5 * pairwise_sum(full);
    r.p_energy = pairwise_sum(pth) / p;
    return r;
}

double fh_infinity_energy(const SmoothMap& phi, const MatrixField& J) { return fh_energy(phi, J, 0.0).fh_infinity; }

double dirichlet_energy(const SmoothMap& phi) {
    return 0.5 * integrate(phi.domain(), [&phi](const Vec& x) { return energy_density(phi, x); });
}

double p_energy(const SmoothMap& phi, double p) {
    if (!(p >= 1.0)) throw GeometryError(ErrorKind::InvalidArgument, "p must be >= 1");
    return integrate(phi.domain(), [&phi, p](const Vec& x) { return std::pow(energy_density(phi, x), 0.5 * p); }) / p;
}

Vec z_field(const SmoothMap& phi, const MatrixField& J, const Vec& x) {
    Vec delta = codifferential_two_form(phi.domain(), pullback_two_form_field(phi, J), x, phi.diff_config());
    return sharp(phi.domain(), x, delta);
}

double criticality_residual_eq7(const SmoothMap& phi, const MatrixField& J, const Vec& x) {
    Mat P = horizontal_projector(phi, x);
    Vec Z = z_field(phi, J, x);
    return norm(phi.domain().metric_at(x), P * Z);
}

bool far_from_boundary(const ChartManifold& M, const Vec& x, const DifferentiationConfig& cfg) {
    return M.boundary_distance(x) > 10.0 * cfg.fd_step;
}

namespace {

double tensor_along(const std::vector<Mat>& nabla, const Vec& X, const Vec& Y, const Vec& Z) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < X.size(); ++i) {
        if (X[i] != 0.0) s += X[i] * Y.dot(nabla[static_cast<std::size_t>(i)] * Z);
    }
    return s;
}

Mat endo_along(const std::vector<Mat>& nabla, const Vec& X) {
    Mat out = Mat::Zero(nabla[0].rows(), nabla[0].cols());
    for (Eigen::Index i = 0; i < X.size(); ++i) {
        if (X[i] != 0.0) out += X[i] * nabla[static_cast<std::size_t>(i)];
    }
    return out;
}

}  // namespace

Prop41Residuals prop41_equivalence(const SmoothMap& phi, const MatrixField& J, const Vec& x) {
    const ChartManifold& M = phi.domain();
    const auto& cfg = phi.diff_config();
    FibreSplitting split = fibre_splitting(phi, x, phi.codomain().dim());
    MatrixField F = induced_f_structure_field(phi, J);
    Mat F0 = F(x);  // gates NotPHWC
    Mat g = M.metric_at(x);
    Mat frame = f_adapted_basis(g, F0, split.horizontal_basis);

    Christoffel G = christoffel_at(M, x, cfg);
    auto nabla_pull = covariant_derivative_tensor02(G, pullback_metric_field(phi), x, cfg.fd_step);
    Mat pull = pullback_metric(phi, x);
    Vec delta = codifferential_two_form(M, pullback_two_form_field(phi, J), x, cfg);
    Vec divF = div_f(M, F, x, cfg);

    Prop41Residuals r;
    r.cosymplectic = norm(g, F0 * divF);
    double eq7 = 0.0, iii = 0.0, id = 0.0;
    const Mat& H = split.horizontal_basis;
    for (int c = 0; c < H.cols(); ++c) {
        Vec Z = H.col(c);
        double s = 0.0;
        for (int jj = 0; jj + 1 < frame.cols(); jj += 2) {
            Vec E = frame.col(jj);
            Vec FE = frame.col(jj + 1);
            s += tensor_along(nabla_pull, E, FE, Z) - tensor_along(nabla_pull, FE, E, Z);
        }
        double dz = delta.dot(Z);
        eq7 += dz * dz;
        iii += s * s;
        double defect = -dz - divF.dot(pull * Z) - s;
        id += defect * defect;
    }
    r.eq7 = std::sqrt(eq7);
    r.pullback_sum = std::sqrt(iii);
    r.identity = std::sqrt(id);
    return r;
}

Vec horizontal_grad_ln_lambda(const SmoothMap& phi, const Vec& x) {
    ScalarField L = dilation_field(phi);
    const double l0 = L(x);
    if (!(l0 > 0.0)) throw GeometryError(ErrorKind::RankDeficient, "dilation vanishes");
    const int m = phi.domain().dim();
    Vec d(m);
    for (int i = 0; i < m; ++i) d[i] = 0.5 * partial(L, x, i, phi.diff_config().fd_step) / l0;
    Mat P = horizontal_projector(phi, x);
    return P * sharp(phi.domain(), x, d);
}

SemiconformalResiduals semiconformal_criticality(const SmoothMap& phi, const MatrixField& J, const Vec& x) {
    Dilation dil = dilation_hwc(phi, x);
    if (!(dil.residual < 1e-6)) {
        std::ostringstream os;
        os << "dilation residual " << dil.residual << " at (" << x.transpose() << ")";
        throw GeometryError(ErrorKind::NotSemiconformal, os.str());
    }
    const ChartManifold& M = phi.domain();
    const double m = M.dim();
    const double n2 = phi.codomain().dim();
    Vec grad = horizontal_grad_ln_lambda(phi, x);
    Vec mu = mean_curvature_fibres(phi, x);
    MatrixField F = induced_f_structure_field(phi, J);
    Vec fdf = f_div_f(M, F, x, phi.diff_config());
    Mat g = M.metric_at(x);
    SemiconformalResiduals r;
    r.lambda_sq = dil.lambda_sq;
    r.criticality = norm(g, (n2 - 4.0) * grad + (m - n2) * mu);
    r.f_divergence = norm(g, fdf - (n2 - 2.0) * grad - (m - n2) * mu);
    return r;
}

Christoffel weyl_connection(const ChartManifold& M, const Vec& x, const Vec& theta, const DifferentiationConfig& cfg) {
    Christoffel G = christoffel_at(M, x, cfg);
    const int d = M.dim();
    Mat g = M.metric_at(x);
    Vec ts = sharp(M, x, theta);
    for (int k = 0; k < d; ++k) {
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                double extra = -g(i, j) * ts[k];
                if (k == j) extra += theta[i];
                if (k == i) extra += theta[j];
                G.gamma[k](i, j) += extra;
            }
        }
    }
    return G;
}

Vec compatible_weyl_theta(const ChartManifold& M, const MatrixField& F, const Vec& x, const DifferentiationConfig& cfg) {
    if (M.dim() <= 2) throw GeometryError(ErrorKind::DimensionTooSmall, "compatible Weyl connection needs dim M > 2");
    Vec theta_sharp = f_div_f(M, F, x, cfg) / static_cast<double>(M.dim() - 2);
    return flat(M, x, theta_sharp);
}

Vec weyl_div_f(const ChartManifold& M, const MatrixField& F, const Vec& x, const Vec& theta,
               const DifferentiationConfig& cfg) {
    Christoffel D = weyl_connection(M, x, theta, cfg);
    auto nabla = covariant_derivative_endomorphism(D, F, x, cfg.fd_step);
    Mat E = orthonormal_frame(M, x);
    Vec out = Vec::Zero(M.dim());
    for (int a = 0; a < E.cols(); ++a) out += endo_along(nabla, E.col(a)) * E.col(a);
    return out;
}

WeylResiduals weyl_compat_residual(const ChartManifold& M, const MatrixField& F, const Vec& x,
                                   const DifferentiationConfig& cfg) {
    Mat g = M.metric_at(x);
    Mat F0 = F(x);
    Vec theta = compatible_weyl_theta(M, F, x, cfg);
    WeylResiduals r;
    r.compatible = norm(g, F0 * weyl_div_f(M, F, x, theta, cfg));
    r.levi_civita = norm(g, f_div_f(M, F, x, cfg));
    return r;
}

TensionPhwc tension_phwc(const SmoothMap& phi, const MatrixField& J, const Vec& x) {
    const ChartManifold& M = phi.domain();
    const auto& cfg = phi.diff_config();
    MapJet j = phi.jet(x, false);
    MatrixField F = induced_f_structure_field(phi, J);
    Vec fdf = f_div_f(M, F, x, cfg);
    auto nablaJ = covariant_derivative_endomorphism(phi.codomain(), J, j.y, cfg);
    Mat E = orthonormal_frame(M, x);
    Vec divJ = Vec::Zero(phi.codomain().dim());
    for (int a = 0; a < E.cols(); ++a) {
        Vec W = j.dphi * E.col(a);
        divJ += endo_along(nablaJ, W) * W;
    }
    TensionPhwc t;
    t.j_div_j = J(j.y) * divJ;
    t.tau = t.j_div_j - j.dphi * fdf;
    t.direct = tension_field_direct(phi, x);
    return t;
}

Cond11Residuals cond_1_1_residual(const SmoothMap& phi, const MatrixField& J, const Vec& x) {
    const ChartManifold& M = phi.domain();
    const auto& cfg = phi.diff_config();
    FibreSplitting split = fibre_splitting(phi, x, phi.codomain().dim());
    MatrixField F = induced_f_structure_field(phi, J);
    Mat F0 = F(x);
    MapJet j = phi.jet(x, true);
    auto B = second_fundamental_form(phi, j);
    Mat h = phi.codomain().metric_at(j.y);
    Mat Jy = J(j.y);
    auto nablaF = covariant_derivative_endomorphism(M, F, x, cfg);
    const std::complex<double> I(0.0, 1.0);
    CMat hc = h.cast<std::complex<double>>();
    CMat Jc = Jy.cast<std::complex<double>>();
    const Mat& H = split.horizontal_basis;
    Cond11Residuals r;
    for (int a = 0; a < H.cols(); ++a) {
        Vec X = H.col(a);
        Mat NX = endo_along(nablaF, X);
        for (int b = 0; b < H.cols(); ++b) {
            Vec Y = H.col(b);
            Vec bxy = apply(B, X, Y);
            Vec bxfy = apply(B, X, F0 * Y);
            CVec w = bxy.cast<std::complex<double>>() + I * bxfy.cast<std::complex<double>>();
            CVec w01 = 0.5 * (w + I * (Jc * w));
            r.cond = std::max(r.cond, std::sqrt(std::max(0.0, (w01.adjoint() * hc * w01)(0, 0).real())));
            Vec split = j.dphi * (NX * Y) + bxfy - Jy * bxy;
            r.split = std::max(r.split, norm(h, split));
        }
    }
    return r;
}

CriticalityReport criticality_report(const SmoothMap& phi, const MatrixField& J, const std::vector<Vec>& points,
                                     const CriticalityTolerances& tol) {
    CriticalityReport rep;
    rep.map_id = phi.id();
    rep.tol = tol;
    const ChartManifold& M = phi.domain();
    const auto& cfg = phi.diff_config();
    MatrixField F = induced_f_structure_field(phi, J);
    rep.semiconformal_applicable = true;
    for (const auto& x : points) {
        if (!far_from_boundary(M, x, cfg)) continue;
        rep.phwc.update(phwc_residual(phi, J, x), x);
        MapJet j = phi.jet(x, false);
        rep.tension.update(norm(phi.codomain().metric_at(j.y), tension_field_direct(phi, x)), x);
        Prop41Residuals p = prop41_equivalence(phi, J, x);
        rep.eq7.update(p.eq7, x);
        rep.prop41_iii.update(p.pullback_sum, x);
        if (rep.semiconformal_applicable) {
            try {
                SemiconformalResiduals s = semiconformal_criticality(phi, J, x);
                rep.f_divergence.update(s.f_divergence, x);
                rep.semiconformal.update(s.criticality, x);
            } catch (const GeometryError& e) {
                if (e.kind() != ErrorKind::NotSemiconformal) throw;
                rep.semiconformal_applicable = false;
            }
        }
        if (M.dim() > 2) rep.weyl.update(weyl_compat_residual(M, F, x, cfg).compatible, x);
    }
    return rep;
}

}  // namespace phwc
