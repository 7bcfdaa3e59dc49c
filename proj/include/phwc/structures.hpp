#pragma once

#include "phwc/map_calculus.hpp"

#include <vector>

namespace phwc {

// Residual norms of the algebraic invariants of a structure, maximised over the
// points they were evaluated at.
struct StructureCheck {
    double square = 0.0;         // |J^2 + I|, |F^3 + F| or |phi^2 + I - eta (x) xi|
    double compatibility = 0.0;  // |g(FX,Y) + g(X,FY)| or |g(phiX,phiY) - g + eta eta|
    double normalisation = 0.0;  // |eta(xi) - 1| for contact structures, 0 otherwise
    int rank = -1;               // -1 when rank is not constant over the points
};

// J on the codomain N with Omega = h(J., .).
struct AlmostHermitianStructure {
    ManifoldPtr base;
    MatrixField J;

    Mat J_at(const Vec& y) const { return J(y); }
    // Omega(i, j) = h(J d_i, d_j) = (J^T h)(i, j).
    Mat omega_at(const Vec& y) const;
    StructureCheck validate(const std::vector<Vec>& points) const;
};

struct MetricFStructure {
    ManifoldPtr base;
    MatrixField F;
    int rank = 0;

    StructureCheck validate(const std::vector<Vec>& points) const;
};

struct ContactMetricStructure {
    ManifoldPtr base;
    MatrixField phi;
    VectorField xi;

    Vec eta_at(const Vec& x) const;  // eta = g(xi, .)
    StructureCheck validate(const std::vector<Vec>& points) const;
};

// Algebraic invariants of a single endomorphism F for the metric g.
StructureCheck check_f_structure(const Mat& g, const Mat& F);

// |F o [dphi o dphi^t, F]|, Frobenius norm in h-orthonormal components.
double phwc_residual(const SmoothMap& phi, const MatrixField& F_N, const Vec& x);

// max_{a <= b} |g^{ij} d_i phi^a d_j phi^b| with phi^a the complex coordinates of the
// codomain chart. Throws ComplexChartMissing when the codomain has no complex pairing.
double phwc_residual_coordinates(const SmoothMap& phi, const Vec& x);

inline constexpr double kPhwcGate = 1e-6;

struct InducedFStructure {
    Mat F;                       // real m x m
    int rank = 0;
    double phwc_residual = 0.0;  // gate value
    double isotropy = 0.0;       // max |g(w, w')| over the normalised basis of W
};

// F^phi = i on W = dphi^t(T^{1,0}N), -i on its conjugate, 0 on the complement.
InducedFStructure induced_f_structure(const SmoothMap& phi, const MatrixField& J, const Vec& x,
                                      double gate = kPhwcGate);
MatrixField induced_f_structure_field(const SmoothMap& phi, const MatrixField& J);

// max_a |(F_N)^2 (dphi F_M e_a - F_N dphi e_a)| over a g-orthonormal frame.
double holomorphy_residual(const SmoothMap& phi, const MatrixField& F_M, const MatrixField& F_N, const Vec& x);

// div F = sum_a (nabla_{e_a} F)(e_a).
Vec div_f(const ChartManifold& M, const MatrixField& F, const Vec& x, const DifferentiationConfig& cfg = {});
Vec f_div_f(const ChartManifold& M, const MatrixField& F, const Vec& x, const DifferentiationConfig& cfg = {});

// g-orthonormal basis of Ker(F^2 + I) = Im F at x.
Mat f_image_basis(const Mat& g, const Mat& F);

// max over horizontal orthonormal X, Y of |F((nabla_X F) Y)|.
double phh_residual(const SmoothMap& phi, const MatrixField& F, const Vec& x);
// max over X in Ker(F^2+I) of |(nabla_X F)X + (nabla_{FX} F)(FX)|, by polarisation on a frame.
double cond_b_residual(const ChartManifold& M, const MatrixField& F, const Vec& x,
                       const DifferentiationConfig& cfg = {});
// Same expression with F applied.
double cond_div_residual(const ChartManifold& M, const MatrixField& F, const Vec& x,
                         const DifferentiationConfig& cfg = {});

}  // namespace phwc
