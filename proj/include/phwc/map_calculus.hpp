#pragma once

#include "phwc/chart_manifold.hpp"
#include "phwc/geometry.hpp"

#include <memory>
#include <string>
#include <vector>

namespace phwc {

// Value and derivatives of a map at a point.
struct MapJet {
    Vec x;
    Vec y;
    Mat dphi;                // dim N x dim M
    std::vector<Mat> d2phi;  // d2phi[gamma](i, j); empty when only first order was requested
};

// Coordinate expression of a map between two charts.
class SmoothMap {
public:
    SmoothMap(std::string id, ManifoldPtr domain, ManifoldPtr codomain, SmoothFunction expr,
              DifferentiationConfig cfg = {});

    const std::string& id() const { return id_; }
    const ChartManifold& domain() const { return *domain_; }
    const ChartManifold& codomain() const { return *codomain_; }
    const ManifoldPtr& domain_ptr() const { return domain_; }
    const ManifoldPtr& codomain_ptr() const { return codomain_; }
    const SmoothFunction& expr() const { return expr_; }
    const DifferentiationConfig& diff_config() const { return cfg_; }
    void set_diff_config(const DifferentiationConfig& cfg);

    Vec operator()(const Vec& x) const { return expr_(x); }
    Mat differential(const Vec& x) const { return expr_.jacobian(x, cfg_); }
    MapJet jet(const Vec& x, bool second_order = true) const;

    // Throws OutOfChart if some quadrature node lands outside the codomain chart.
    void validate_on_quadrature() const;

private:
    std::string id_;
    ManifoldPtr domain_;
    ManifoldPtr codomain_;
    SmoothFunction expr_;
    DifferentiationConfig cfg_;
};

using MapPtr = std::shared_ptr<const SmoothMap>;

struct FibreSplitting {
    Mat vertical_basis;    // columns, g-orthonormal, spanning Ker dphi
    Mat horizontal_basis;  // columns, g-orthonormal, spanning (Ker dphi)^perp
    int rank = 0;
};

// dphi^t = g^{-1} dphi^T h, characterised by g(X, dphi^t E) = h(dphi X, E).
Mat adjoint_differential(const SmoothMap& phi, const Vec& x);
Mat adjoint_differential(const Mat& g, const Mat& h, const Mat& dphi);

// Second fundamental form nabla dphi: result[gamma](i, j).
std::vector<Mat> second_fundamental_form(const SmoothMap& phi, const MapJet& jet);
std::vector<Mat> second_fundamental_form(const SmoothMap& phi, const Vec& x);
Vec second_fundamental_form(const SmoothMap& phi, const Vec& x, const Vec& X, const Vec& Y);
Vec apply(const std::vector<Mat>& bilinear, const Vec& X, const Vec& Y);

Vec tension_field_direct(const SmoothMap& phi, const Vec& x);

Mat pullback_metric(const SmoothMap& phi, const Vec& x);
MatrixField pullback_metric_field(const SmoothMap& phi);

enum class PullbackDerivativeRoute {
    SecondFundamentalForm,  // h(nabla dphi(X,Y), dphi Z) + h(dphi Y, nabla dphi(X,Z))
    DirectCovariant,        // (nabla_X phi*h)(Y, Z) by differentiating the tensor field
};
double nabla_pullback_metric(const SmoothMap& phi, const Vec& x, const Vec& X, const Vec& Y, const Vec& Z,
                             PullbackDerivativeRoute route = PullbackDerivativeRoute::SecondFundamentalForm);

// SVD split of dphi with relative threshold 1e-8; throws RankDeficient when
// expected_rank >= 0 and the measured rank differs.
FibreSplitting fibre_splitting(const SmoothMap& phi, const Vec& x, int expected_rank = -1);

// Coordinate projectors onto H = (Ker dphi)^perp and V = Ker dphi (submersive points).
Mat horizontal_projector(const Mat& g, const Mat& h, const Mat& dphi);
Mat horizontal_projector(const SmoothMap& phi, const Vec& x);

// Mean curvature vector of the fibre through x (horizontal). Throws RankDeficient
// when dphi is not onto.
Vec mean_curvature_fibres(const SmoothMap& phi, const Vec& x);

struct Dilation {
    double lambda_sq = 0.0;
    double residual = 0.0;
};
Dilation dilation_hwc(const SmoothMap& phi, const Vec& x);

double energy_density(const SmoothMap& phi, const Vec& x);

// |dphi|^2 field and lambda^2 field for use under finite differences.
ScalarField energy_density_field(const SmoothMap& phi);
ScalarField dilation_field(const SmoothMap& phi);

}  // namespace phwc
