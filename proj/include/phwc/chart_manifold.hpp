#pragma once

#include "phwc/linalg.hpp"
#include "phwc/smooth_function.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace phwc {

enum class AxisRule { GaussLegendre, Periodic };

// One axis of a chart box (lo, hi). Quadrature on that axis uses `nodes`
// points of the given rule; Periodic means midpoint-offset trapezoid nodes.
struct ChartAxis {
    double lo = 0.0;
    double hi = 1.0;
    AxisRule rule = AxisRule::GaussLegendre;
    int nodes = 24;
};

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

struct QuadratureRule {
    std::vector<Vec> nodes;
    std::vector<double> weights;        // coordinate (box) weights, all > 0
    std::vector<double> volume_weights; // sqrt(det g) at each node, cached
    double total_measure = 0.0;         // sum of weights * volume_weight

    std::size_t size() const { return nodes.size(); }
};

QuadratureRule tensor_quadrature(const std::vector<ChartAxis>& axes);

class ChartManifold {
public:
    // `metric` maps coordinates to the dim*dim row-major metric components.
    ChartManifold(std::string name, std::vector<ChartAxis> axes, SmoothFunction metric);

    const std::string& name() const { return name_; }
    int dim() const { return dim_; }
    const std::vector<ChartAxis>& axes() const { return axes_; }
    const SmoothFunction& metric_function() const { return metric_; }
    const QuadratureRule& quadrature() const { return quad_; }

    // Rebuilds the quadrature with a new per-axis node count (rules unchanged).
    void set_quadrature_nodes(const std::vector<int>& nodes_per_axis);

    bool contains(const Vec& x) const;
    // Distance from x to the chart boundary in coordinate units (negative outside).
    double boundary_distance(const Vec& x) const;

    // Throws OutOfChart / DegenerateMetric.
    Mat metric_at(const Vec& x) const;
    Mat metric_inverse_at(const Vec& x) const;
    double volume_weight(const Vec& x) const;
    // dg(i, j) as d g_{ij} / dx^k, returned as dim matrices indexed by k.
    std::vector<Mat> metric_derivatives(const Vec& x, const DifferentiationConfig& cfg = {}) const;

    // Complex coordinate pairing (x^{2a}, x^{2a+1}) -> z^a, when the chart is holomorphic
    // for the structure it carries.
    bool has_complex_chart() const { return complex_chart_; }
    void set_complex_chart(bool on) { complex_chart_ = on; }

    // Uniform random interior points with a relative margin on every axis.
    std::vector<Vec> sample_points(std::size_t count, unsigned long long seed, double margin = 0.05) const;

private:
    std::string name_;
    int dim_;
    std::vector<ChartAxis> axes_;
    SmoothFunction metric_;
    QuadratureRule quad_;
    bool complex_chart_ = false;

    Mat raw_metric(const Vec& x) const;
    void rebuild_quadrature();
};

using ManifoldPtr = std::shared_ptr<const ChartManifold>;

// Coordinate vector paired with its base point.
struct TangentVector {
    Vec base_point;
    Vec components;
};

}  // namespace phwc
