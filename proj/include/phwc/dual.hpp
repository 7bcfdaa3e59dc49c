#pragma once

#include <cmath>
#include <type_traits>

namespace phwc {

// Forward-mode dual number carrying one directional derivative.
// Nesting (Dual<Dual<double>>) gives exact mixed second derivatives.
template <class T>
struct Dual {
    T val{};
    T eps{};

    constexpr Dual() = default;
    constexpr Dual(double v) : val(v), eps(0.0) {}  // NOLINT: implicit lift of constants
    constexpr Dual(T v, T e) : val(v), eps(e) {}

    Dual& operator+=(const Dual& o) { val += o.val; eps += o.eps; return *this; }
    Dual& operator-=(const Dual& o) { val -= o.val; eps -= o.eps; return *this; }
    Dual& operator*=(const Dual& o) { eps = eps * o.val + val * o.eps; val *= o.val; return *this; }
    Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }

    friend Dual operator+(const Dual& a, const Dual& b) { return {a.val + b.val, a.eps + b.eps}; }
    friend Dual operator-(const Dual& a, const Dual& b) { return {a.val - b.val, a.eps - b.eps}; }
    friend Dual operator-(const Dual& a) { return {-a.val, -a.eps}; }
    friend Dual operator+(const Dual& a) { return a; }
    friend Dual operator*(const Dual& a, const Dual& b) { return {a.val * b.val, a.eps * b.val + a.val * b.eps}; }
    friend Dual operator/(const Dual& a, const Dual& b) {
        T inv = T(1.0) / b.val;
        return {a.val * inv, (a.eps * b.val - a.val * b.eps) * inv * inv};
    }

    friend Dual operator+(const Dual& a, double b) { return {a.val + b, a.eps}; }
    friend Dual operator+(double a, const Dual& b) { return {a + b.val, b.eps}; }
    friend Dual operator-(const Dual& a, double b) { return {a.val - b, a.eps}; }
    friend Dual operator-(double a, const Dual& b) { return {a - b.val, -b.eps}; }
    friend Dual operator*(const Dual& a, double b) { return {a.val * b, a.eps * b}; }
    friend Dual operator*(double a, const Dual& b) { return {a * b.val, a * b.eps}; }
    friend Dual operator/(const Dual& a, double b) { return {a.val / b, a.eps / b}; }
    friend Dual operator/(double a, const Dual& b) { return Dual(a) / b; }

    friend bool operator<(const Dual& a, const Dual& b) { return a.val < b.val; }
    friend bool operator>(const Dual& a, const Dual& b) { return a.val > b.val; }
    friend bool operator<(const Dual& a, double b) { return a.val < b; }
    friend bool operator>(const Dual& a, double b) { return a.val > b; }
};

using D1 = Dual<double>;
using D2 = Dual<Dual<double>>;

template <class T> struct is_dual : std::false_type {};
template <class T> struct is_dual<Dual<T>> : std::true_type {};

// Innermost double value of a (possibly nested) dual number.
inline double primal(double x) { return x; }
template <class T>
double primal(const Dual<T>& x) { return primal(x.val); }

template <class T>
Dual<T> sin(const Dual<T>& a) { using std::sin; using std::cos; return {sin(a.val), a.eps * cos(a.val)}; }
template <class T>
Dual<T> cos(const Dual<T>& a) { using std::sin; using std::cos; return {cos(a.val), -(a.eps * sin(a.val))}; }
template <class T>
Dual<T> tan(const Dual<T>& a) {
    using std::tan; using std::cos;
    T c = cos(a.val);
    return {tan(a.val), a.eps / (c * c)};
}
template <class T>
Dual<T> exp(const Dual<T>& a) { using std::exp; T e = exp(a.val); return {e, a.eps * e}; }
template <class T>
Dual<T> log(const Dual<T>& a) { using std::log; return {log(a.val), a.eps / a.val}; }
template <class T>
Dual<T> sqrt(const Dual<T>& a) { using std::sqrt; T s = sqrt(a.val); return {s, a.eps / (2.0 * s)}; }
template <class T>
Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
    using std::atan2;
    T r2 = x.val * x.val + y.val * y.val;
    return {atan2(y.val, x.val), (x.val * y.eps - y.val * x.eps) / r2};
}
template <class T>
Dual<T> pow(const Dual<T>& a, double p) {
    using std::pow;
    return {pow(a.val, p), a.eps * (p * pow(a.val, p - 1.0))};
}
template <class T>
bool isfinite(const Dual<T>& a) { using std::isfinite; return isfinite(a.val) && isfinite(a.eps); }

}  // namespace phwc
