#pragma once

#include "phwc/structures.hpp"

#include <string>
#include <vector>

namespace phwc {

// <w, s> = sum_{a<b} w(e_a, e_b) s(e_a, e_b) in a g-orthonormal frame.
inline constexpr const char* kTwoFormConvention = "sum_{a<b} w(e_a,e_b)^2 over a g-orthonormal frame";

// (phi^* Omega)(X, Y) = h(J dphi X, dphi Y).
Mat pullback_two_form(const SmoothMap& phi, const MatrixField& J, const Vec& x);
MatrixField pullback_two_form_field(const SmoothMap& phi, const MatrixField& J);

struct EnergyReport {
    double dirichlet = 0.0;    // 1/2 int |dphi|^2
    double alpha = 0.0;
    double fh_alpha = 0.0;     // 1/2 int (|dphi|^2 + alpha |phi^* Omega|^2)
    double fh_infinity = 0.0;  // 1/2 int |phi^* Omega|^2
    double p = 4.0;
    double p_energy = 0.0;     // 1/p int |dphi|^p
    std::string convention = kTwoFormConvention;
};

// All energies from one pass over the domain quadrature. Throws NonFiniteIntegrand.
EnergyReport fh_energy(const SmoothMap& phi, const MatrixField& J, double alpha, double p = 4.0);
double fh_infinity_energy(const SmoothMap& phi, const MatrixField& J);
double dirichlet_energy(const SmoothMap& phi);
double p_energy(const SmoothMap& phi, double p);

// Z_phi = (delta phi^* Omega)^sharp.
Vec z_field(const SmoothMap& phi, const MatrixField& J, const Vec& x);

// |horizontal part of Z_phi| in the g-norm.
double criticality_residual_eq7(const SmoothMap& phi, const MatrixField& J, const Vec& x);

// Points closer than 10 fd_step to the chart boundary are skipped by pointwise sups.
bool far_from_boundary(const ChartManifold& M, const Vec& x, const DifferentiationConfig& cfg);

struct Prop41Residuals {
    double cosymplectic = 0.0;  // (i)   |F div F|
    double eq7 = 0.0;           // (ii)  |Z_phi^H|
    double pullback_sum = 0.0;  // (iii) sup_Z |sum_j (nabla_{E_j} phi^*h)(FE_j, Z) - (nabla_{FE_j} phi^*h)(E_j, Z)|
    double identity = 0.0;      // sup_Z |-delta Omega^(Z) - phi^*h(div F, Z) - (iii)-form(Z)|
};
Prop41Residuals prop41_equivalence(const SmoothMap& phi, const MatrixField& J, const Vec& x);

struct SemiconformalResiduals {
    double criticality = 0.0;  // |(2n-4) grad^H ln lambda + (m-2n) mu^V|
    double f_divergence = 0.0;  // |F div F - (2n-2) grad^H ln lambda - (m-2n) mu^V|
    double lambda_sq = 0.0;
};
// Throws NotSemiconformal when the dilation residual exceeds 1e-6 at x.
SemiconformalResiduals semiconformal_criticality(const SmoothMap& phi, const MatrixField& J, const Vec& x);

// D_X Y = nabla_X Y + theta(X) Y + theta(Y) X - g(X, Y) theta^sharp, as Christoffel symbols at x.
Christoffel weyl_connection(const ChartManifold& M, const Vec& x, const Vec& theta, const DifferentiationConfig& cfg = {});

// theta with theta^sharp = F div F / (m - 2); returned as a covector. Throws DimensionTooSmall for m <= 2.
Vec compatible_weyl_theta(const ChartManifold& M, const MatrixField& F, const Vec& x,
                          const DifferentiationConfig& cfg = {});

// div^D F = sum_a (D_{e_a} F)(e_a) for the Weyl connection of theta.
Vec weyl_div_f(const ChartManifold& M, const MatrixField& F, const Vec& x, const Vec& theta,
               const DifferentiationConfig& cfg = {});

struct WeylResiduals {
    double compatible = 0.0;     // |F div^D F| with the compatible theta
    double levi_civita = 0.0;    // |F div F|
};
WeylResiduals weyl_compat_residual(const ChartManifold& M, const MatrixField& F, const Vec& x,
                                   const DifferentiationConfig& cfg = {});

struct TensionPhwc {
    Vec tau;          // J div^phi J - dphi(F div F)
    Vec j_div_j;      // J div^phi J
    Vec direct;       // tension_field_direct
};
TensionPhwc tension_phwc(const SmoothMap& phi, const MatrixField& J, const Vec& x);

struct Cond11Residuals {
    double cond = 0.0;  // (0,1)-part of nabla dphi(X, Y + i F Y)
    double split = 0.0;  // |dphi((nabla_X F) Y) + nabla dphi(X, FY) - J nabla dphi(X, Y)|
};
Cond11Residuals cond_1_1_residual(const SmoothMap& phi, const MatrixField& J, const Vec& x);

struct CriticalityTolerances {
    double phwc = 1e-9;
    double tension = 1e-5;
    double eq7 = 1e-4;
    double identity = 1e-4;
    double semiconformal = 1e-5;
    double weyl = 1e-4;
};

struct ResidualMax {
    double value = 0.0;
    Vec point;
    void update(double v, const Vec& x) {
        if (point.size() == 0 || v > value) {
            value = v;
            point = x;
        }
    }
};

struct CriticalityReport {
    std::string map_id;
    ResidualMax phwc;
    ResidualMax tension;
    ResidualMax eq7;
    ResidualMax f_divergence;
    ResidualMax prop41_iii;
    ResidualMax semiconformal;
    ResidualMax weyl;
    bool semiconformal_applicable = false;
    CriticalityTolerances tol;
    bool phwc_ok() const { return phwc.value < tol.phwc; }
    bool harmonic() const { return tension.value < tol.tension; }
    bool critical() const { return eq7.value < tol.eq7; }
};

CriticalityReport criticality_report(const SmoothMap& phi, const MatrixField& J, const std::vector<Vec>& points,
                                     const CriticalityTolerances& tol = {});

// Horizontal part of grad ln(lambda), lambda^2 = trace(dphi dphi^t) / dim N.
Vec horizontal_grad_ln_lambda(const SmoothMap& phi, const Vec& x);

}  // namespace phwc
