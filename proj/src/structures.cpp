#include "phwc/structures.hpp"

#include "phwc/errors.hpp"

#include <cmath>
#include <complex>
#include <sstream>

namespace phwc {

namespace {

// M in g-orthonormal components: L^T M L^{-T}.
Mat orthonormal_components(const Mat& L, const Mat& M) {
    Mat LT = L.transpose();
    return LT * M * LT.triangularView<Eigen::Upper>().solve(Mat::Identity(L.rows(), L.cols()));
}

int numerical_rank(const Mat& A, double rel = 1e-8) {
    Eigen::JacobiSVD<Mat> svd(A);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s[0] == 0.0) return 0;
    int r = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s[k] >= rel * s[0]) ++r;
    }
    return r;
}

void merge(StructureCheck& acc, const StructureCheck& c, bool first) {
    acc.square = std::max(acc.square, c.square);
    acc.compatibility = std::max(acc.compatibility, c.compatibility);
    acc.normalisation = std::max(acc.normalisation, c.normalisation);
    if (first) {
        acc.rank = c.rank;
    } else if (acc.rank != c.rank) {
        acc.rank = -1;
    }
}

}  // namespace

StructureCheck check_f_structure(const Mat& g, const Mat& F) {
    Mat L = cholesky_lower(g);
    Mat Fo = orthonormal_components(L, F);
    StructureCheck c;
    c.square = (Fo * Fo * Fo + Fo).norm();
    c.compatibility = (Fo + Fo.transpose()).norm();
    c.rank = numerical_rank(Fo);
    return c;
}

Mat AlmostHermitianStructure::omega_at(const Vec& y) const {
    return J(y).transpose() * base->metric_at(y);
}

StructureCheck AlmostHermitianStructure::validate(const std::vector<Vec>& points) const {
    StructureCheck acc;
    bool first = true;
    for (const auto& y : points) {
        Mat g = base->metric_at(y);
        Mat Jy = J(y);
        StructureCheck c = check_f_structure(g, Jy);
        Mat Jo = orthonormal_components(cholesky_lower(g), Jy);
        c.square = (Jo * Jo + Mat::Identity(Jo.rows(), Jo.cols())).norm();
        merge(acc, c, first);
        first = false;
    }
    return acc;
}

StructureCheck MetricFStructure::validate(const std::vector<Vec>& points) const {
    StructureCheck acc;
    bool first = true;
    for (const auto& x : points) {
        merge(acc, check_f_structure(base->metric_at(x), F(x)), first);
        first = false;
    }
    return acc;
}

Vec ContactMetricStructure::eta_at(const Vec& x) const { return base->metric_at(x) * xi(x); }

StructureCheck ContactMetricStructure::validate(const std::vector<Vec>& points) const {
    StructureCheck acc;
    bool first = true;
    for (const auto& x : points) {
        Mat g = base->metric_at(x);
        Mat p = phi(x);
        Vec z = xi(x);
        Vec eta = g * z;
        const auto d = g.rows();
        StructureCheck c;
        c.square = (p * p + Mat::Identity(d, d) - z * eta.transpose()).norm();
        c.compatibility = (p.transpose() * g * p - g + eta * eta.transpose()).norm();
        c.normalisation = std::abs(eta.dot(z) - 1.0);
        c.rank = numerical_rank(p);
        merge(acc, c, first);
        first = false;
    }
    return acc;
}

double phwc_residual(const SmoothMap& phi, const MatrixField& F_N, const Vec& x) {
    MapJet j = phi.jet(x, false);
    Mat g = phi.domain().metric_at(x);
    Mat h = phi.codomain().metric_at(j.y);
    Mat A = j.dphi * adjoint_differential(g, h, j.dphi);
    Mat L = cholesky_lower(h);
    Mat Ao = orthonormal_components(L, A);
    Mat Fo = orthonormal_components(L, F_N(j.y));
    return (Fo * (Ao * Fo - Fo * Ao)).norm();
}

double phwc_residual_coordinates(const SmoothMap& phi, const Vec& x) {
    if (!phi.codomain().has_complex_chart()) {
        throw GeometryError(ErrorKind::ComplexChartMissing, "codomain " + phi.codomain().name() + " has no complex chart");
    }
    MapJet j = phi.jet(x, false);
    Mat ginv = phi.domain().metric_inverse_at(x);
    const int nc = phi.codomain().dim() / 2;
    CMat dz(nc, phi.domain().dim());
    for (int a = 0; a < nc; ++a) {
        for (int i = 0; i < phi.domain().dim(); ++i) dz(a, i) = {j.dphi(2 * a, i), j.dphi(2 * a + 1, i)};
    }
    CMat S = dz * ginv.cast<std::complex<double>>() * dz.transpose();
    double r = 0.0;
    for (int a = 0; a < nc; ++a) {
        for (int b = a; b < nc; ++b) r = std::max(r, std::abs(S(a, b)));
    }
    return r;
}

InducedFStructure induced_f_structure(const SmoothMap& phi, const MatrixField& J, const Vec& x, double gate) {
    InducedFStructure out;
    out.phwc_residual = phwc_residual(phi, J, x);
    if (!(out.phwc_residual < gate)) {
        std::ostringstream os;
        os << "PHWC residual " << out.phwc_residual << " exceeds gate " << gate << " at (" << x.transpose() << ")";
        throw GeometryError(ErrorKind::NotPHWC, os.str());
    }
    MapJet j = phi.jet(x, false);
    Mat g = phi.domain().metric_at(x);
    Mat h = phi.codomain().metric_at(j.y);
    Mat adj = adjoint_differential(g, h, j.dphi);
    const auto n = h.rows();
    const auto m = g.rows();
    Mat Lh = cholesky_lower(h);
    Mat U = Lh.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(n, n));  // h-orthonormal basis
    Mat Jy = J(j.y);
    const std::complex<double> I(0.0, 1.0);
    CMat T10 = U.cast<std::complex<double>>() - I * (Jy * U).cast<std::complex<double>>();
    CMat C = adj.cast<std::complex<double>>() * T10;
    CMat gc = g.cast<std::complex<double>>();
    CMat gram = C.adjoint() * gc * C;
    Eigen::SelfAdjointEigenSolver<CMat> es(gram);
    const auto& ev = es.eigenvalues();
    const double emax = ev.size() ? ev.maxCoeff() : 0.0;
    CMat W(m, 0);
    // eigenvalues ascend; take the largest first for deterministic ordering
    for (Eigen::Index k = ev.size() - 1; k >= 0; --k) {
        if (emax <= 0.0 || ev[k] < 1e-8 * emax) break;
        W.conservativeResize(Eigen::NoChange, W.cols() + 1);
        W.col(W.cols() - 1) = C * es.eigenvectors().col(k) / std::sqrt(ev[k]);
    }
    CMat iso = W.transpose() * gc * W;
    out.isotropy = iso.size() ? iso.cwiseAbs().maxCoeff() : 0.0;
    if (out.isotropy > 1e-8) {
        std::ostringstream os;
        os << "dphi^t(T^{1,0}N) is not g-isotropic (" << out.isotropy << ")";
        throw GeometryError(ErrorKind::IsotropyFailure, os.str());
    }
    CMat P = W * W.adjoint() * gc;
    out.F = -2.0 * P.imag();
    out.rank = 2 * static_cast<int>(W.cols());
    return out;
}

MatrixField induced_f_structure_field(const SmoothMap& phi, const MatrixField& J) {
    return [&phi, J](const Vec& x) { return induced_f_structure(phi, J, x).F; };
}

double holomorphy_residual(const SmoothMap& phi, const MatrixField& F_M, const MatrixField& F_N, const Vec& x) {
    MapJet j = phi.jet(x, false);
    Mat h = phi.codomain().metric_at(j.y);
    Mat FM = F_M(x);
    Mat FN = F_N(j.y);
    Mat E = orthonormal_frame(phi.domain(), x);
    double r = 0.0;
    for (int a = 0; a < E.cols(); ++a) {
        Vec e = E.col(a);
        Vec defect = FN * FN * (j.dphi * (FM * e) - FN * (j.dphi * e));
        r = std::max(r, norm(h, defect));
    }
    return r;
}

Vec div_f(const ChartManifold& M, const MatrixField& F, const Vec& x, const DifferentiationConfig& cfg) {
    auto nabla = covariant_derivative_endomorphism(M, F, x, cfg);
    Mat E = orthonormal_frame(M, x);
    Vec out = Vec::Zero(M.dim());
    for (int a = 0; a < E.cols(); ++a) {
        Vec e = E.col(a);
        for (int i = 0; i < M.dim(); ++i) {
            if (e[i] != 0.0) out += e[i] * (nabla[i] * e);
        }
    }
    return out;
}

Vec f_div_f(const ChartManifold& M, const MatrixField& F, const Vec& x, const DifferentiationConfig& cfg) {
    return F(x) * div_f(M, F, x, cfg);
}

Mat f_image_basis(const Mat& g, const Mat& F) {
    // Im F is spanned by the columns of F; Gram-Schmidt keeps it deterministic.
    return gram_schmidt(g, F, 1e-8);
}

namespace {

Mat directional(const std::vector<Mat>& nabla, const Vec& X) {
    Mat out = Mat::Zero(nabla[0].rows(), nabla[0].cols());
    for (std::size_t i = 0; i < nabla.size(); ++i) {
        if (X[static_cast<Eigen::Index>(i)] != 0.0) out += X[static_cast<Eigen::Index>(i)] * nabla[i];
    }
    return out;
}

double cond_b_like(const ChartManifold& M, const MatrixField& F, const Vec& x, const DifferentiationConfig& cfg,
                   bool apply_f) {
    auto nabla = covariant_derivative_endomorphism(M, F, x, cfg);
    Mat g = M.metric_at(x);
    Mat F0 = F(x);
    Mat H = f_image_basis(g, F0);
    auto Q = [&](const Vec& X) {
        Vec FX = F0 * X;
        Vec v = directional(nabla, X) * X + directional(nabla, FX) * FX;
        return apply_f ? Vec(F0 * v) : v;
    };
    double r = 0.0;
    for (int a = 0; a < H.cols(); ++a) {
        r = std::max(r, norm(g, Q(H.col(a))));
        for (int b = a + 1; b < H.cols(); ++b) {
            r = std::max(r, norm(g, Q((H.col(a) + H.col(b)) / std::sqrt(2.0))));
        }
    }
    return r;
}

}  // namespace

double phh_residual(const SmoothMap& phi, const MatrixField& F, const Vec& x) {
    FibreSplitting split = fibre_splitting(phi, x, phi.codomain().dim());
    auto nabla = covariant_derivative_endomorphism(phi.domain(), F, x, phi.diff_config());
    Mat g = phi.domain().metric_at(x);
    Mat F0 = F(x);
    const Mat& H = split.horizontal_basis;
    double r = 0.0;
    for (int a = 0; a < H.cols(); ++a) {
        Mat NX = directional(nabla, H.col(a));
        for (int b = 0; b < H.cols(); ++b) r = std::max(r, norm(g, F0 * (NX * H.col(b))));
    }
    return r;
}

double cond_b_residual(const ChartManifold& M, const MatrixField& F, const Vec& x, const DifferentiationConfig& cfg) {
    return cond_b_like(M, F, x, cfg, false);
}

double cond_div_residual(const ChartManifold& M, const MatrixField& F, const Vec& x, const DifferentiationConfig& cfg) {
    return cond_b_like(M, F, x, cfg, true);
}

}  // namespace phwc
