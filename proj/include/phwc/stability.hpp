#pragma once

#include "phwc/variational.hpp"

#include <functional>
#include <string>
#include <vector>

namespace phwc {

// Geometry of phi at one domain point, shared by every variation field evaluated there.
struct PointGeometry {
    Vec x;
    Mat g;
    Mat ginv;
    Vec y;
    Mat dphi;
    Mat h;
    Mat omega;  // Omega(y)(a, b) = h(J e_a, e_b)
    Mat P_H;    // coordinate projector onto the horizontal space
    Vec p;      // ambient position when the domain carries an embedding, else empty
    Mat E;      // embedding Jacobian, else empty
};

PointGeometry point_geometry(const SmoothMap& phi, const MatrixField& J, const SmoothFunction* embedding,
                             const Vec& x);

using GeometryField = std::function<Vec(const PointGeometry&)>;

// A section v of phi^{-1}TN. When X is set, v = dphi(X) with X a horizontal field on M.
struct VariationField {
    std::string label;
    GeometryField X;
    GeometryField v;
    Mat generator;  // skew generator of a sphere Killing field, else empty
};

Vec variation_value(const VariationField& f, const PointGeometry& pg);
Vec variation_domain_field(const VariationField& f, const PointGeometry& pg);

struct HessianOptions {
    bool allow_noncritical = false;
    double critical_tol = 1e-4;
};

struct HessianValue {
    double total = 0.0;
    double pullback_term = 0.0;  // int sum_{a<b} d beta(e_a, e_b)^2, beta = phi^*(i_v Omega)
    double z_term = 0.0;         // int Omega(v, nabla^phi_Z v)
    double v_l2_sq = 0.0;        // int h(v, v)
    double x_l2_sq = 0.0;        // int g(X, X) when X is set
};

struct HessianBatch {
    std::vector<HessianValue> values;
    double max_eq7 = 0.0;
};

// Hess(v, v) = |phi^* d(i_v Omega)|^2_{L^2} + int Omega(v, nabla^phi_{Z_phi} v), for every field,
// in one sweep of the domain quadrature. Throws NotCritical when the horizontal part of Z exceeds
// critical_tol at a node and allow_noncritical is false.
HessianBatch hessian_batch(const SmoothMap& phi, const MatrixField& J, const SmoothFunction* embedding,
                           const std::vector<VariationField>& fields, const HessianOptions& opts = {});
HessianValue hessian(const SmoothMap& phi, const MatrixField& J, const SmoothFunction* embedding,
                     const VariationField& field, const HessianOptions& opts = {});

struct SasakianHessianValue {
    double total = 0.0;
    double pair_term = 0.0;      // int 1/2 sum_{|I| != |J|} d beta(e_I, e_J)^2
    double div_term = 0.0;       // int (div X)^2
    double bracket_term = 0.0;   // int |[xi, X]|^2
    double coupling_term = 0.0;  // int -2n g(phi X, [xi, X])
    double reduced = 0.0;        // bracket_term + coupling_term
    double x_l2_sq = 0.0;
};

// Quadrature of the Sasakian form of the Hessian over the frame {xi, e_i, phi e_i}. Every
// field must provide X. Throws NotSasakianScenario when contact is null.
std::vector<SasakianHessianValue> sasakian_hessian_batch(const SmoothMap& phi, const ContactMetricStructure* contact,
                                                         const MatrixField& J, const SmoothFunction* embedding,
                                                         const std::vector<VariationField>& fields);

struct KillingFamily {
    std::vector<VariationField> all;     // elementary basis of so(2n+2)
    std::vector<VariationField> perp_xi; // Frobenius-orthonormal basis of generators anticommuting with i
    double max_perp_xi_dot = 0.0;        // max |g(X, xi)| over samples and perp_xi
    double max_killing_residual = 0.0;   // max |L_X g| over samples and all generators
    double max_nabla_xi_identity = 0.0;  // max of | |nabla_xi X|^2 - |X|^2 | and | g(nabla_xi X, phi X) - |X|^2 | over perp_xi
};

// Killing fields X(p) = A p of S^{2n+1}; identity checks use `samples` random points.
KillingFamily killing_fields_sphere(int n, const SmoothMap& phi, const ContactMetricStructure& contact,
                                    const MatrixField& J, const SmoothFunction& embedding, std::size_t samples = 10,
                                    unsigned long long seed = 7);

// Seeded degree <= 2 polynomial fields made horizontal; ambient polynomials when an embedding
// is given, chart polynomials otherwise.
std::vector<VariationField> random_trial_fields(int count, unsigned long long seed, const SmoothMap& phi,
                                                const SmoothFunction* embedding);

struct IdentityPair {
    Vec lhs;
    Vec rhs;
    double residual = 0.0;  // g-norm of lhs - rhs
};

// [xi, X] against nabla_xi X + phi X.
IdentityPair bracket_identity_sasakian(const ChartManifold& M, const ContactMetricStructure* contact,
                                       const VectorField& X, const Vec& x, const DifferentiationConfig& cfg = {});
// phi X against -nabla_X xi.
IdentityPair phi_nabla_xi_identity(const ChartManifold& M, const ContactMetricStructure* contact, const Vec& X,
                                   const Vec& x, const DifferentiationConfig& cfg = {});

struct ScalarPair {
    double lhs = 0.0;
    double rhs = 0.0;
};

// -delta phi^*Omega(V) against sum_i lambda_i^2 g([E_i, F E_i], V) for vertical V.
// Throws EigenframeDegenerate when an eigenvalue cluster is not F-invariant.
ScalarPair vertical_codifferential_formula(const SmoothMap& phi, const MatrixField& J, const Vec& V, const Vec& x);

// Horizontal frame extended as fields by projecting coordinate fields (g-orthonormal columns).
Mat horizontal_frame(const SmoothMap& phi, const Vec& x);

struct StabilityConditions {
    double cond_a = 0.0;  // max |vertical part of [H_i, H_j]|
    double cond_b = 0.0;  // max cond_b residual of F^phi
    bool integrable() const { return cond_a < 1e-8; }
    bool cond_b_holds() const { return cond_b < 1e-8; }
};
StabilityConditions stability_conditions(const SmoothMap& phi, const MatrixField& J, const std::vector<Vec>& points);

}  // namespace phwc
