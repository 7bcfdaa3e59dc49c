#include "phwc/map_calculus.hpp"

#include "phwc/errors.hpp"

#include <cmath>
#include <sstream>

namespace phwc {

SmoothMap::SmoothMap(std::string id, ManifoldPtr domain, ManifoldPtr codomain, SmoothFunction expr,
                     DifferentiationConfig cfg)
    : id_(std::move(id)), domain_(std::move(domain)), codomain_(std::move(codomain)), expr_(std::move(expr)),
      cfg_(cfg) {
    if (expr_.in_dim() != domain_->dim() || expr_.out_dim() != codomain_->dim()) {
        throw GeometryError(ErrorKind::InvalidArgument, "map " + id_ + " has dimensions inconsistent with its charts");
    }
    cfg_.validate();
}

void SmoothMap::set_diff_config(const DifferentiationConfig& cfg) {
    cfg.validate();
    cfg_ = cfg;
}

MapJet SmoothMap::jet(const Vec& x, bool second_order) const {
    if (!domain_->contains(x)) throw GeometryError(ErrorKind::OutOfChart, "map " + id_ + " evaluated outside its domain");
    MapJet j;
    j.x = x;
    j.y = expr_(x);
    if (!codomain_->contains(j.y)) {
        std::ostringstream os;
        os << "map " << id_ << " sends (" << x.transpose() << ") outside chart " << codomain_->name();
        throw GeometryError(ErrorKind::OutOfChart, os.str());
    }
    j.dphi = expr_.jacobian(x, cfg_);
    if (second_order) j.d2phi = expr_.second_derivatives(x, cfg_);
    return j;
}

void SmoothMap::validate_on_quadrature() const {
    for (const auto& node : domain_->quadrature().nodes) {
        Vec y = expr_(node);
        if (!codomain_->contains(y)) {
            std::ostringstream os;
            os << "map " << id_ << " sends quadrature node (" << node.transpose() << ") to (" << y.transpose()
               << "), outside chart " << codomain_->name();
            throw GeometryError(ErrorKind::OutOfChart, os.str());
        }
    }
}

Mat adjoint_differential(const Mat& g, const Mat& h, const Mat& dphi) {
    return g.ldlt().solve(dphi.transpose() * h);
}

Mat adjoint_differential(const SmoothMap& phi, const Vec& x) {
    MapJet j = phi.jet(x, false);
    return adjoint_differential(phi.domain().metric_at(x), phi.codomain().metric_at(j.y), j.dphi);
}

std::vector<Mat> second_fundamental_form(const SmoothMap& phi, const MapJet& jet) {
    const auto& cfg = phi.diff_config();
    Christoffel GM = christoffel_at(phi.domain(), jet.x, cfg);
    Christoffel GN = christoffel_at(phi.codomain(), jet.y, cfg);
    const int m = phi.domain().dim();
    const int n = phi.codomain().dim();
    std::vector<Mat> B(n);
    for (int c = 0; c < n; ++c) {
        Mat b = jet.d2phi.at(c);
        for (int k = 0; k < m; ++k) b -= jet.dphi(c, k) * GM.gamma[k];
        b += jet.dphi.transpose() * GN.gamma[c] * jet.dphi;
        B[c] = 0.5 * (b + b.transpose());
    }
    return B;
}

std::vector<Mat> second_fundamental_form(const SmoothMap& phi, const Vec& x) {
    return second_fundamental_form(phi, phi.jet(x, true));
}

Vec apply(const std::vector<Mat>& bilinear, const Vec& X, const Vec& Y) {
    Vec out(static_cast<Eigen::Index>(bilinear.size()));
    for (std::size_t c = 0; c < bilinear.size(); ++c) out[static_cast<Eigen::Index>(c)] = X.dot(bilinear[c] * Y);
    return out;
}

Vec second_fundamental_form(const SmoothMap& phi, const Vec& x, const Vec& X, const Vec& Y) {
    return apply(second_fundamental_form(phi, x), X, Y);
}

Vec tension_field_direct(const SmoothMap& phi, const Vec& x) {
    auto B = second_fundamental_form(phi, x);
    Mat E = orthonormal_frame(phi.domain(), x);
    Vec tau = Vec::Zero(phi.codomain().dim());
    for (int a = 0; a < E.cols(); ++a) tau += apply(B, E.col(a), E.col(a));
    return tau;
}

Mat pullback_metric(const SmoothMap& phi, const Vec& x) {
    MapJet j = phi.jet(x, false);
    return j.dphi.transpose() * phi.codomain().metric_at(j.y) * j.dphi;
}

MatrixField pullback_metric_field(const SmoothMap& phi) {
    return [&phi](const Vec& x) { return pullback_metric(phi, x); };
}

double nabla_pullback_metric(const SmoothMap& phi, const Vec& x, const Vec& X, const Vec& Y, const Vec& Z,
                             PullbackDerivativeRoute route) {
    if (route == PullbackDerivativeRoute::SecondFundamentalForm) {
        MapJet j = phi.jet(x, true);
        auto B = second_fundamental_form(phi, j);
        Mat h = phi.codomain().metric_at(j.y);
        return apply(B, X, Y).dot(h * (j.dphi * Z)) + (j.dphi * Y).dot(h * apply(B, X, Z));
    }
    auto nabla = covariant_derivative_tensor02(phi.domain(), pullback_metric_field(phi), x, phi.diff_config());
    double s = 0.0;
    for (int i = 0; i < X.size(); ++i) s += X[i] * Y.dot(nabla[i] * Z);
    return s;
}

FibreSplitting fibre_splitting(const SmoothMap& phi, const Vec& x, int expected_rank) {
    MapJet j = phi.jet(x, false);
    Mat Lg = cholesky_lower(phi.domain().metric_at(x));
    Mat Lh = cholesky_lower(phi.codomain().metric_at(j.y));
    const int m = phi.domain().dim();
    Mat Eg = Lg.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(m, m));  // L^{-T}
    Mat A = Lh.transpose() * j.dphi * Eg;
    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s.size() > 0 ? s[0] : 0.0;
    int rank = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (smax > 0.0 && s[k] >= 1e-8 * smax) ++rank;
    }
    if (expected_rank >= 0 && rank != expected_rank) {
        std::ostringstream os;
        os << "rank of d" << phi.id() << " is " << rank << ", expected " << expected_rank;
        throw GeometryError(ErrorKind::RankDeficient, os.str());
    }
    FibreSplitting out;
    out.rank = rank;
    Mat V = svd.matrixV();
    out.horizontal_basis = Eg * V.leftCols(rank);
    out.vertical_basis = Eg * V.rightCols(m - rank);
    return out;
}

Mat horizontal_projector(const Mat& g, const Mat& h, const Mat& dphi) {
    Mat adj = adjoint_differential(g, h, dphi);
    Mat A = dphi * adj;
    return adj * A.ldlt().solve(dphi);
}

Mat horizontal_projector(const SmoothMap& phi, const Vec& x) {
    MapJet j = phi.jet(x, false);
    fibre_splitting(phi, x, phi.codomain().dim());
    return horizontal_projector(phi.domain().metric_at(x), phi.codomain().metric_at(j.y), j.dphi);
}

Vec mean_curvature_fibres(const SmoothMap& phi, const Vec& x) {
    const int n = phi.codomain().dim();
    FibreSplitting split = fibre_splitting(phi, x, n);
    const Mat C = split.vertical_basis;  // fixed coordinate components
    const auto k = C.cols();
    if (k == 0) return Vec::Zero(phi.domain().dim());
    const auto& cfg = phi.diff_config();
    auto frame_at = [&phi, C](const Vec& y) {
        Mat g = phi.domain().metric_at(y);
        Mat P = horizontal_projector(g, phi.codomain().metric_at(phi(y)), phi.differential(y));
        Mat V = (Mat::Identity(P.rows(), P.cols()) - P) * C;
        Mat Q = gram_schmidt(g, V, 1e-8);
        if (Q.cols() != C.cols()) throw GeometryError(ErrorKind::RankDeficient, "vertical frame degenerates");
        return Q;
    };
    Christoffel G = christoffel_at(phi.domain(), x, cfg);
    Mat P = horizontal_projector(phi, x);
    Mat U0 = frame_at(x);
    Vec mu = Vec::Zero(phi.domain().dim());
    for (Eigen::Index a = 0; a < k; ++a) {
        VectorField U = [&frame_at, a](const Vec& y) -> Vec { return frame_at(y).col(a); };
        Vec u = U0.col(a);
        Vec nabla = G.contract(u, u);
        for (int i = 0; i < u.size(); ++i) {
            if (u[i] != 0.0) nabla += u[i] * partial(U, x, i, cfg.fd_step);
        }
        mu += P * nabla;
    }
    return mu / static_cast<double>(k);
}

Dilation dilation_hwc(const SmoothMap& phi, const Vec& x) {
    MapJet j = phi.jet(x, false);
    Mat g = phi.domain().metric_at(x);
    Mat h = phi.codomain().metric_at(j.y);
    Mat A = j.dphi * adjoint_differential(g, h, j.dphi);
    // symmetric representative in h-orthonormal components
    Mat Lh = cholesky_lower(h);
    Mat Ah = Lh.transpose() * A * Lh.transpose().inverse();
    const double n = static_cast<double>(phi.codomain().dim());
    Dilation d;
    d.lambda_sq = Ah.trace() / n;
    d.residual = (Ah - d.lambda_sq * Mat::Identity(Ah.rows(), Ah.cols())).norm();
    return d;
}

double energy_density(const SmoothMap& phi, const Vec& x) {
    MapJet j = phi.jet(x, false);
    Mat g = phi.domain().metric_at(x);
    Mat h = phi.codomain().metric_at(j.y);
    return (g.ldlt().solve(j.dphi.transpose() * h * j.dphi)).trace();
}

ScalarField energy_density_field(const SmoothMap& phi) {
    return [&phi](const Vec& x) { return energy_density(phi, x); };
}

ScalarField dilation_field(const SmoothMap& phi) {
    return [&phi](const Vec& x) { return dilation_hwc(phi, x).lambda_sq; };
}

}  // namespace phwc
