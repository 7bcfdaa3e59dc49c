#include "phwc/chart_manifold.hpp"

#include "phwc/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace phwc {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw GeometryError(ErrorKind::InvalidArgument, "Gauss-Legendre order must be >= 1");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged root
        double p0 = 1.0, p1 = 0.0;
        for (int k = 1; k <= n; ++k) {
            double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
        }
        dp = n * (x * p0 - p1) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

QuadratureRule tensor_quadrature(const std::vector<ChartAxis>& axes) {
    std::vector<std::vector<double>> xs(axes.size()), ws(axes.size());
    for (std::size_t a = 0; a < axes.size(); ++a) {
        const auto& ax = axes[a];
        if (ax.nodes < 1) throw GeometryError(ErrorKind::ConfigError, "quadrature order must be >= 1");
        const double len = ax.hi - ax.lo;
        if (ax.rule == AxisRule::GaussLegendre) {
            std::vector<double> t, w;
            gauss_legendre(ax.nodes, t, w);
            for (int i = 0; i < ax.nodes; ++i) {
                xs[a].push_back(ax.lo + 0.5 * len * (t[i] + 1.0));
                ws[a].push_back(0.5 * len * w[i]);
            }
        } else {
            for (int i = 0; i < ax.nodes; ++i) {
                xs[a].push_back(ax.lo + len * (i + 0.5) / ax.nodes);
                ws[a].push_back(len / ax.nodes);
            }
        }
    }
    QuadratureRule q;
    std::size_t total = 1;
    for (const auto& x : xs) total *= x.size();
    q.nodes.reserve(total);
    q.weights.reserve(total);
    std::vector<std::size_t> idx(axes.size(), 0);
    for (std::size_t n = 0; n < total; ++n) {
        Vec p(static_cast<Eigen::Index>(axes.size()));
        double w = 1.0;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            p[static_cast<Eigen::Index>(a)] = xs[a][idx[a]];
            w *= ws[a][idx[a]];
        }
        q.nodes.push_back(std::move(p));
        q.weights.push_back(w);
        for (std::size_t a = axes.size(); a-- > 0;) {
            if (++idx[a] < xs[a].size()) break;
            idx[a] = 0;
        }
    }
    return q;
}

ChartManifold::ChartManifold(std::string name, std::vector<ChartAxis> axes, SmoothFunction metric)
    : name_(std::move(name)), dim_(static_cast<int>(axes.size())), axes_(std::move(axes)), metric_(std::move(metric)) {
    if (metric_.in_dim() != dim_ || metric_.out_dim() != dim_ * dim_) {
        throw GeometryError(ErrorKind::InvalidArgument, "metric function has wrong dimensions for chart " + name_);
    }
    rebuild_quadrature();
}

void ChartManifold::set_quadrature_nodes(const std::vector<int>& nodes_per_axis) {
    if (nodes_per_axis.size() != axes_.size()) {
        throw GeometryError(ErrorKind::ConfigError, "quadrature order list does not match chart dimension");
    }
    for (std::size_t a = 0; a < axes_.size(); ++a) axes_[a].nodes = nodes_per_axis[a];
    rebuild_quadrature();
}

void ChartManifold::rebuild_quadrature() {
    quad_ = tensor_quadrature(axes_);
    quad_.volume_weights.resize(quad_.size());
    double total = 0.0;
    for (std::size_t k = 0; k < quad_.size(); ++k) {
        quad_.volume_weights[k] = volume_weight(quad_.nodes[k]);
        total += quad_.weights[k] * quad_.volume_weights[k];
    }
    quad_.total_measure = total;
}

bool ChartManifold::contains(const Vec& x) const {
    if (x.size() != dim_) return false;
    for (int i = 0; i < dim_; ++i) {
        if (!(x[i] > axes_[i].lo && x[i] < axes_[i].hi)) return false;
    }
    return true;
}

double ChartManifold::boundary_distance(const Vec& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim_; ++i) d = std::min({d, x[i] - axes_[i].lo, axes_[i].hi - x[i]});
    return d;
}

Mat ChartManifold::raw_metric(const Vec& x) const {
    Vec flat = metric_(x);
    Mat g = Eigen::Map<const Mat>(flat.data(), dim_, dim_).transpose();
    return 0.5 * (g + g.transpose());
}

Mat ChartManifold::metric_at(const Vec& x) const {
    if (!contains(x)) {
        std::ostringstream os;
        os << "point (" << x.transpose() << ") outside chart " << name_;
        throw GeometryError(ErrorKind::OutOfChart, os.str());
    }
    Mat g = raw_metric(x);
    Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
    if (!g.allFinite() || es.eigenvalues().minCoeff() <= 1e-12) {
        std::ostringstream os;
        os << "metric of " << name_ << " not positive definite at (" << x.transpose() << ")";
        throw GeometryError(ErrorKind::DegenerateMetric, os.str());
    }
    return g;
}

Mat ChartManifold::metric_inverse_at(const Vec& x) const {
    Mat g = metric_at(x);
    return g.ldlt().solve(Mat::Identity(dim_, dim_));
}

double ChartManifold::volume_weight(const Vec& x) const {
    Mat g = metric_at(x);
    return std::sqrt(g.determinant());
}

std::vector<Mat> ChartManifold::metric_derivatives(const Vec& x, const DifferentiationConfig& cfg) const {
    if (!contains(x)) throw GeometryError(ErrorKind::OutOfChart, "metric derivative outside chart " + name_);
    Mat J = metric_.jacobian(x, cfg);  // (dim*dim) x dim
    std::vector<Mat> dg(dim_, Mat(dim_, dim_));
    for (int k = 0; k < dim_; ++k) {
        for (int i = 0; i < dim_; ++i) {
            for (int j = 0; j < dim_; ++j) dg[k](i, j) = 0.5 * (J(i * dim_ + j, k) + J(j * dim_ + i, k));
        }
    }
    return dg;
}

std::vector<Vec> ChartManifold::sample_points(std::size_t count, unsigned long long seed, double margin) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec> pts;
    pts.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        Vec p(dim_);
        for (int i = 0; i < dim_; ++i) {
            const double len = axes_[i].hi - axes_[i].lo;
            p[i] = axes_[i].lo + len * (margin + (1.0 - 2.0 * margin) * u(rng));
        }
        pts.push_back(std::move(p));
    }
    return pts;
}

}  // namespace phwc
