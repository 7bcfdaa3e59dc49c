#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace phwc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// Fields on a chart, all in coordinate components.
using ScalarField = std::function<double(const Vec&)>;
using VectorField = std::function<Vec(const Vec&)>;
// Endomorphisms (F^k_j stored as F(k, j)), 2-forms and (0,2)-tensors (T(i, j)).
using MatrixField = std::function<Mat(const Vec&)>;

inline Vec to_vec(const std::vector<double>& v) {
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

// g-inner product of coordinate vectors.
inline double inner(const Mat& g, const Vec& a, const Vec& b) { return a.dot(g * b); }
inline double norm(const Mat& g, const Vec& a) { return std::sqrt(std::max(0.0, inner(g, a, a))); }

// Modified Gram-Schmidt in the metric g, in the column order given. Columns whose
// residual norm falls below tol (relative to their input norm) are dropped.
Mat gram_schmidt(const Mat& g, const Mat& columns, double tol = 1e-10);

// Columns of `basis` extended to a g-orthonormal basis of the whole space by
// appending coordinate directions in index order.
Mat complete_orthonormal(const Mat& g, const Mat& basis);

// Orthonormal basis {u_1, F u_1, u_2, F u_2, ...} of an F-invariant subspace
// spanned by the g-orthonormal columns of `subspace`.
Mat f_adapted_basis(const Mat& g, const Mat& F, const Mat& subspace, double tol = 1e-8);

// Lower Cholesky factor of an SPD matrix; orthonormal components of a vector v
// are L^T v.
Mat cholesky_lower(const Mat& spd);

// Squared norm of a 2-form with components w(i, j) under the metric g:
// sum over a < b of w(e_a, e_b)^2 in a g-orthonormal frame.
double two_form_norm_sq(const Mat& g_inv, const Mat& w);
double two_form_inner(const Mat& g_inv, const Mat& w, const Mat& s);

// Fixed-order pairwise summation.
double pairwise_sum(const double* data, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace phwc
