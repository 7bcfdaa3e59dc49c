#include "phwc/linalg.hpp"

#include "phwc/errors.hpp"

#include <cmath>

namespace phwc {

Mat gram_schmidt(const Mat& g, const Mat& columns, double tol) {
    Mat out(columns.rows(), 0);
    for (Eigen::Index c = 0; c < columns.cols(); ++c) {
        Vec v = columns.col(c);
        double n0 = norm(g, v);
        if (n0 == 0.0) continue;
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index k = 0; k < out.cols(); ++k) {
                v -= inner(g, out.col(k), v) * out.col(k);
            }
        }
        double n = norm(g, v);
        if (n <= tol * n0) continue;
        out.conservativeResize(Eigen::NoChange, out.cols() + 1);
        out.col(out.cols() - 1) = v / n;
    }
    return out;
}

Mat complete_orthonormal(const Mat& g, const Mat& basis) {
    const Eigen::Index d = g.rows();
    Mat all(d, basis.cols() + d);
    all << basis, Mat::Identity(d, d);
    Mat q = gram_schmidt(g, all, 1e-8);
    return q.leftCols(std::min<Eigen::Index>(q.cols(), d));
}

Mat f_adapted_basis(const Mat& g, const Mat& F, const Mat& subspace, double tol) {
    Mat out(subspace.rows(), 0);
    auto append = [&](Vec v) {
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index k = 0; k < out.cols(); ++k) v -= inner(g, out.col(k), v) * out.col(k);
        }
        double n = norm(g, v);
        if (n <= tol) return false;
        out.conservativeResize(Eigen::NoChange, out.cols() + 1);
        out.col(out.cols() - 1) = v / n;
        return true;
    };
    for (Eigen::Index c = 0; c < subspace.cols() && out.cols() < subspace.cols(); ++c) {
        if (!append(subspace.col(c))) continue;
        Vec fu = F * out.col(out.cols() - 1);
        if (!append(fu)) {
            throw GeometryError(ErrorKind::EigenframeDegenerate,
                                "subspace is not invariant under the f-structure");
        }
    }
    return out;
}

Mat cholesky_lower(const Mat& spd) {
    Eigen::LLT<Mat> llt(spd);
    if (llt.info() != Eigen::Success) {
        throw GeometryError(ErrorKind::DegenerateMetric, "Cholesky factorisation failed");
    }
    return llt.matrixL();
}

double two_form_inner(const Mat& g_inv, const Mat& w, const Mat& s) {
    // 1/2 g^{ik} g^{jl} w_ij s_kl == sum_{a<b} w(e_a,e_b) s(e_a,e_b)
    return 0.5 * (g_inv * w * g_inv).cwiseProduct(s).sum();
}

double two_form_norm_sq(const Mat& g_inv, const Mat& w) { return two_form_inner(g_inv, w, w); }

double pairwise_sum(const double* data, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

}  // namespace phwc
