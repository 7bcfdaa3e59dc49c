#pragma once

#include "phwc/chart_manifold.hpp"

#include <vector>

namespace phwc {

// Christoffel symbols of the second kind; gamma[k](i, j) = Gamma^k_{ij}.
struct Christoffel {
    std::vector<Mat> gamma;

    // Gamma(X, Y)^k = Gamma^k_{ij} X^i Y^j
    Vec contract(const Vec& X, const Vec& Y) const;
    // Matrix A with (A)^k_j = Gamma^k_{ij} X^i, so Gamma(X, Y) = A Y.
    Mat along(const Vec& X) const;
};

Christoffel christoffel_at(const ChartManifold& M, const Vec& x, const DifferentiationConfig& cfg = {});

// (nabla_X Y)(x) for vector fields given in coordinate components.
Vec covariant_derivative_vector(const ChartManifold& M, const VectorField& X, const VectorField& Y, const Vec& x,
                                const DifferentiationConfig& cfg = {});

Vec sharp(const ChartManifold& M, const Vec& x, const Vec& covector);
Vec flat(const ChartManifold& M, const Vec& x, const Vec& vector);

// g-orthonormal frame (columns) from Gram-Schmidt on the coordinate fields in index order.
Mat orthonormal_frame(const ChartManifold& M, const Vec& x);

// Covariant derivative components of a (0,2)-tensor field:
// result[i](j, k) = (nabla_i T)_{jk}.
std::vector<Mat> covariant_derivative_tensor02(const ChartManifold& M, const MatrixField& T, const Vec& x,
                                               const DifferentiationConfig& cfg = {});
std::vector<Mat> covariant_derivative_tensor02(const Christoffel& G, const MatrixField& T, const Vec& x, double h);

// Covariant derivative components of an endomorphism field F (F(k, j) = F^k_j):
// result[i] = nabla_{d_i} F as a matrix.
std::vector<Mat> covariant_derivative_endomorphism(const ChartManifold& M, const MatrixField& F, const Vec& x,
                                                   const DifferentiationConfig& cfg = {});
std::vector<Mat> covariant_derivative_endomorphism(const Christoffel& G, const MatrixField& F, const Vec& x, double h);

// (delta w)(Z) = - sum_a (nabla_{e_a} w)(e_a, Z), evaluated with the supplied g-orthonormal
// frame, or the Gram-Schmidt coordinate frame when `frame` is empty. Returns a covector.
Vec codifferential_two_form(const ChartManifold& M, const MatrixField& w, const Vec& x,
                            const DifferentiationConfig& cfg = {}, const Mat& frame = Mat());

double divergence_vector_field(const ChartManifold& M, const VectorField& X, const Vec& x,
                               const DifferentiationConfig& cfg = {});
// (div T)(Z) = sum_a (nabla_{e_a} T)(e_a, Z); returns a covector.
Vec divergence_two_tensor(const ChartManifold& M, const MatrixField& T, const Vec& x,
                          const DifferentiationConfig& cfg = {});

// Coordinate Lie bracket [X, Y]^k = X^i d_i Y^k - Y^i d_i X^k.
Vec lie_bracket(const VectorField& X, const VectorField& Y, const Vec& x, double h);

// sum_k w_k f(x_k) sqrt(det g)(x_k) over the chart quadrature. Integrand values are
// evaluated independently per node and summed in fixed pairwise order.
double integrate(const ChartManifold& M, const ScalarField& f);

// Integrand evaluated at every quadrature node (already multiplied by weight * volume).
std::vector<double> weighted_node_values(const ChartManifold& M, const ScalarField& f);

}  // namespace phwc
