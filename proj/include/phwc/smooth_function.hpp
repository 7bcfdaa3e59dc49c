#pragma once

#include "phwc/dual.hpp"
#include "phwc/linalg.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace phwc {

enum class FirstDerivativeMode { DualForward, CentralDifference };
enum class SecondDerivativeMode { NestedDual, CentralDifference };

struct DifferentiationConfig {
    FirstDerivativeMode mode = FirstDerivativeMode::DualForward;
    double fd_step = 1e-5;
    SecondDerivativeMode second_derivative_mode = SecondDerivativeMode::CentralDifference;

    // Throws ConfigError unless fd_step lies in [1e-8, 1e-2].
    void validate() const;
};

// A map R^in -> R^out given once as a generic callable and instantiated for
// double, D1 and D2 so that the same expression can be differentiated exactly.
//
// The callable receives `const std::vector<T>&` and returns `std::vector<T>`.
class SmoothFunction {
public:
    SmoothFunction() = default;

    template <class F>
    SmoothFunction(int in_dim, int out_dim, F f)
        : in_(in_dim), out_(out_dim),
          f0_([f](const std::vector<double>& x) { return f(x); }),
          f1_([f](const std::vector<D1>& x) { return f(x); }),
          f2_([f](const std::vector<D2>& x) { return f(x); }) {}

    int in_dim() const { return in_; }
    int out_dim() const { return out_; }
    explicit operator bool() const { return static_cast<bool>(f0_); }

    Vec operator()(const Vec& x) const;
    std::vector<D1> eval(const std::vector<D1>& x) const { return f1_(x); }
    std::vector<D2> eval(const std::vector<D2>& x) const { return f2_(x); }

    // out x in Jacobian.
    Mat jacobian(const Vec& x, const DifferentiationConfig& cfg = {}) const;
    // Directional derivative d f(x)[dir].
    Vec directional(const Vec& x, const Vec& dir, const DifferentiationConfig& cfg = {}) const;
    // result[k](i, j) = d^2 f_k / dx^i dx^j.
    std::vector<Mat> second_derivatives(const Vec& x, const DifferentiationConfig& cfg = {}) const;

private:
    int in_ = 0;
    int out_ = 0;
    std::function<std::vector<double>(const std::vector<double>&)> f0_;
    std::function<std::vector<D1>(const std::vector<D1>&)> f1_;
    std::function<std::vector<D2>(const std::vector<D2>&)> f2_;
};

// Finite-difference partial derivative of a field along coordinate axis i (five-point stencil).
Vec partial(const VectorField& f, const Vec& x, int i, double h);
Mat partial(const MatrixField& f, const Vec& x, int i, double h);
double partial(const ScalarField& f, const Vec& x, int i, double h);

}  // namespace phwc
