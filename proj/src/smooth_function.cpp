#include "phwc/smooth_function.hpp"

#include "phwc/errors.hpp"

#include <cmath>
#include <sstream>

namespace phwc {

void DifferentiationConfig::validate() const {
    if (!(fd_step >= 1e-8 && fd_step <= 1e-2)) {
        std::ostringstream os;
        os << "fd_step " << fd_step << " outside [1e-8, 1e-2]";
        throw GeometryError(ErrorKind::ConfigError, os.str());
    }
}

namespace {

void require_finite(const Mat& m, const char* what) {
    if (!m.allFinite()) throw GeometryError(ErrorKind::DifferentiationFailure, what);
}

}  // namespace

Vec SmoothFunction::operator()(const Vec& x) const {
    return to_vec(f0_(to_std(x)));
}

Mat SmoothFunction::jacobian(const Vec& x, const DifferentiationConfig& cfg) const {
    Mat J(out_, in_);
    if (cfg.mode == FirstDerivativeMode::DualForward) {
        std::vector<D1> xd(in_);
        for (int i = 0; i < in_; ++i) xd[i] = D1(x[i], 0.0);
        for (int i = 0; i < in_; ++i) {
            xd[i].eps = 1.0;
            auto y = f1_(xd);
            for (int k = 0; k < out_; ++k) J(k, i) = y[k].eps;
            xd[i].eps = 0.0;
        }
    } else {
        const double h = cfg.fd_step;
        for (int i = 0; i < in_; ++i) {
            Vec xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            J.col(i) = ((*this)(xp) - (*this)(xm)) / (2.0 * h);
        }
    }
    require_finite(J, "non-finite Jacobian entry");
    return J;
}

Vec SmoothFunction::directional(const Vec& x, const Vec& dir, const DifferentiationConfig& cfg) const {
    if (cfg.mode == FirstDerivativeMode::DualForward) {
        std::vector<D1> xd(in_);
        for (int i = 0; i < in_; ++i) xd[i] = D1(x[i], dir[i]);
        auto y = f1_(xd);
        Vec out(out_);
        for (int k = 0; k < out_; ++k) out[k] = y[k].eps;
        return out;
    }
    const double h = cfg.fd_step;
    return ((*this)(x + h * dir) - (*this)(x - h * dir)) / (2.0 * h);
}

std::vector<Mat> SmoothFunction::second_derivatives(const Vec& x, const DifferentiationConfig& cfg) const {
    std::vector<Mat> H(out_, Mat::Zero(in_, in_));
    if (cfg.second_derivative_mode == SecondDerivativeMode::NestedDual) {
        std::vector<D2> xd(in_);
        for (int i = 0; i < in_; ++i) {
            for (int j = i; j < in_; ++j) {
                for (int k = 0; k < in_; ++k) {
                    xd[k] = D2(D1(x[k], k == i ? 1.0 : 0.0), D1(k == j ? 1.0 : 0.0, 0.0));
                }
                auto y = f2_(xd);
                for (int k = 0; k < out_; ++k) {
                    H[k](i, j) = y[k].eps.eps;
                    H[k](j, i) = y[k].eps.eps;
                }
            }
        }
    } else {
        const double h = cfg.fd_step;
        for (int j = 0; j < in_; ++j) {
            Vec xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            Mat dJ = (jacobian(xp, cfg) - jacobian(xm, cfg)) / (2.0 * h);
            for (int k = 0; k < out_; ++k) H[k].col(j) = dJ.row(k).transpose();
        }
        for (auto& m : H) m = 0.5 * (m + m.transpose()).eval();
    }
    for (const auto& m : H) require_finite(m, "non-finite second derivative");
    return H;
}

namespace {

// Five-point stencil; fourth order, so chart coordinates that degenerate near a pole
// (Hopf angles close to 0 or pi/2) do not drown derivatives of 1/cos-type fields.
template <class R, class F>
R stencil(const F& f, const Vec& x, int i, double h) {
    auto at = [&](double s) -> R {
        Vec y = x;
        y[i] += s;
        return f(y);
    };
    R out = (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
    return out;
}

}  // namespace

Vec partial(const VectorField& f, const Vec& x, int i, double h) {
    Vec d = stencil<Vec>(f, x, i, h);
    if (!d.allFinite()) throw GeometryError(ErrorKind::DifferentiationFailure, "non-finite vector field derivative");
    return d;
}

Mat partial(const MatrixField& f, const Vec& x, int i, double h) {
    Mat d = stencil<Mat>(f, x, i, h);
    if (!d.allFinite()) throw GeometryError(ErrorKind::DifferentiationFailure, "non-finite tensor field derivative");
    return d;
}

double partial(const ScalarField& f, const Vec& x, int i, double h) {
    double d = stencil<double>(f, x, i, h);
    if (!std::isfinite(d)) throw GeometryError(ErrorKind::DifferentiationFailure, "non-finite scalar derivative");
    return d;
}

}  // namespace phwc
