#include "phwc/geometry.hpp"

#include "phwc/errors.hpp"

#include <cmath>

namespace phwc {

Vec Christoffel::contract(const Vec& X, const Vec& Y) const {
    Vec out(static_cast<Eigen::Index>(gamma.size()));
    for (std::size_t k = 0; k < gamma.size(); ++k) out[static_cast<Eigen::Index>(k)] = X.dot(gamma[k] * Y);
    return out;
}

Mat Christoffel::along(const Vec& X) const {
    const auto d = static_cast<Eigen::Index>(gamma.size());
    Mat A(d, d);
    for (Eigen::Index k = 0; k < d; ++k) A.row(k) = (X.transpose() * gamma[static_cast<std::size_t>(k)]);
    return A;
}

Christoffel christoffel_at(const ChartManifold& M, const Vec& x, const DifferentiationConfig& cfg) {
    const int d = M.dim();
    Mat ginv = M.metric_inverse_at(x);
    auto dg = M.metric_derivatives(x, cfg);
    // first kind: G1[l](i, j) = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    std::vector<Mat> first(d, Mat(d, d));
    for (int l = 0; l < d; ++l) {
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) first[l](i, j) = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        }
    }
    Christoffel G;
    G.gamma.assign(d, Mat::Zero(d, d));
    for (int k = 0; k < d; ++k) {
        for (int l = 0; l < d; ++l) {
            if (ginv(k, l) != 0.0) G.gamma[k] += ginv(k, l) * first[l];
        }
    }
    for (const auto& m : G.gamma) {
        if (!m.allFinite()) throw GeometryError(ErrorKind::DifferentiationFailure, "non-finite Christoffel symbol");
    }
    return G;
}

Vec covariant_derivative_vector(const ChartManifold& M, const VectorField& X, const VectorField& Y, const Vec& x,
                                const DifferentiationConfig& cfg) {
    Christoffel G = christoffel_at(M, x, cfg);
    Vec Xv = X(x);
    Vec Yv = Y(x);
    Vec out = G.contract(Xv, Yv);
    for (int i = 0; i < M.dim(); ++i) {
        if (Xv[i] != 0.0) out += Xv[i] * partial(Y, x, i, cfg.fd_step);
    }
    return out;
}

Vec sharp(const ChartManifold& M, const Vec& x, const Vec& covector) {
    return M.metric_at(x).ldlt().solve(covector);
}

Vec flat(const ChartManifold& M, const Vec& x, const Vec& vector) { return M.metric_at(x) * vector; }

Mat orthonormal_frame(const ChartManifold& M, const Vec& x) {
    Mat g = M.metric_at(x);
    return gram_schmidt(g, Mat::Identity(M.dim(), M.dim()));
}

std::vector<Mat> covariant_derivative_tensor02(const Christoffel& G, const MatrixField& T, const Vec& x, double h) {
    const auto d = static_cast<int>(G.gamma.size());
    Mat T0 = T(x);
    std::vector<Mat> out(d);
    for (int i = 0; i < d; ++i) {
        Mat A = G.along(Vec::Unit(d, i));
        out[i] = partial(T, x, i, h) - A.transpose() * T0 - T0 * A;
    }
    return out;
}

std::vector<Mat> covariant_derivative_tensor02(const ChartManifold& M, const MatrixField& T, const Vec& x,
                                               const DifferentiationConfig& cfg) {
    return covariant_derivative_tensor02(christoffel_at(M, x, cfg), T, x, cfg.fd_step);
}

std::vector<Mat> covariant_derivative_endomorphism(const Christoffel& G, const MatrixField& F, const Vec& x, double h) {
    const auto d = static_cast<int>(G.gamma.size());
    Mat F0 = F(x);
    std::vector<Mat> out(d);
    for (int i = 0; i < d; ++i) {
        Mat A = G.along(Vec::Unit(d, i));
        out[i] = partial(F, x, i, h) + A * F0 - F0 * A;
    }
    return out;
}

std::vector<Mat> covariant_derivative_endomorphism(const ChartManifold& M, const MatrixField& F, const Vec& x,
                                                   const DifferentiationConfig& cfg) {
    return covariant_derivative_endomorphism(christoffel_at(M, x, cfg), F, x, cfg.fd_step);
}

Vec codifferential_two_form(const ChartManifold& M, const MatrixField& w, const Vec& x,
                            const DifferentiationConfig& cfg, const Mat& frame) {
    const int d = M.dim();
    Mat E = frame.size() == 0 ? orthonormal_frame(M, x) : frame;
    auto nabla = covariant_derivative_tensor02(M, w, x, cfg);
    Vec out = Vec::Zero(d);
    for (int a = 0; a < E.cols(); ++a) {
        Vec e = E.col(a);
        Mat nabla_e = Mat::Zero(d, d);
        for (int i = 0; i < d; ++i) {
            if (e[i] != 0.0) nabla_e += e[i] * nabla[i];
        }
        out -= (e.transpose() * nabla_e).transpose();
    }
    return out;
}

double divergence_vector_field(const ChartManifold& M, const VectorField& X, const Vec& x,
                               const DifferentiationConfig& cfg) {
    Christoffel G = christoffel_at(M, x, cfg);
    Vec Xv = X(x);
    double div = 0.0;
    for (int i = 0; i < M.dim(); ++i) {
        div += partial(X, x, i, cfg.fd_step)[i];
        div += G.gamma[i].row(i).dot(Xv);
    }
    return div;
}

Vec divergence_two_tensor(const ChartManifold& M, const MatrixField& T, const Vec& x,
                          const DifferentiationConfig& cfg) {
    const int d = M.dim();
    Mat E = orthonormal_frame(M, x);
    auto nabla = covariant_derivative_tensor02(M, T, x, cfg);
    Vec out = Vec::Zero(d);
    for (int a = 0; a < d; ++a) {
        Vec e = E.col(a);
        Mat nabla_e = Mat::Zero(d, d);
        for (int i = 0; i < d; ++i) nabla_e += e[i] * nabla[i];
        out += (e.transpose() * nabla_e).transpose();
    }
    return out;
}

Vec lie_bracket(const VectorField& X, const VectorField& Y, const Vec& x, double h) {
    Vec Xv = X(x), Yv = Y(x);
    Vec out = Vec::Zero(x.size());
    for (int i = 0; i < x.size(); ++i) {
        if (Xv[i] != 0.0) out += Xv[i] * partial(Y, x, i, h);
        if (Yv[i] != 0.0) out -= Yv[i] * partial(X, x, i, h);
    }
    return out;
}

std::vector<double> weighted_node_values(const ChartManifold& M, const ScalarField& f) {
    const auto& q = M.quadrature();
    std::vector<double> vals(q.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
        double v = f(q.nodes[k]);
        if (!std::isfinite(v)) throw GeometryError(ErrorKind::NonFiniteIntegrand, "integrand not finite at a quadrature node");
        vals[k] = q.weights[k] * q.volume_weights[k] * v;
    }
    return vals;
}

double integrate(const ChartManifold& M, const ScalarField& f) { return pairwise_sum(weighted_node_values(M, f)); }

}  // namespace phwc
