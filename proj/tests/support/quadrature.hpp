#pragma once

// Adaptive Gauss–Kronrod (7/15) quadrature used as an independent oracle for
// the closed-form integrals. Test-only.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace aoi::testing {

struct QuadResult
{
    double value;
    double error;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment
{
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

inline Segment gk15(const std::function<double(double)>& f, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kKronrodNodes[static_cast<std::size_t>(j)];
        const double s = f(c - dx) + f(c + dx);
        kron += kKronrodWeights[static_cast<std::size_t>(j)] * s;
        if (j % 2 == 1)
            gauss += kGaussWeights[static_cast<std::size_t>(j / 2)] * s;
    }
    return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace detail

/// ∫_a^b f with global absolute error target `abs_tol`, bisecting the worst
/// segment first.
inline QuadResult adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                                     double abs_tol = 1e-10, int max_segments = 20000)
{
    std::priority_queue<detail::Segment> heap;
    auto first = detail::gk15(f, a, b);
    double value = first.value;
    double error = first.error;
    heap.push(first);
    while (error > abs_tol && static_cast<int>(heap.size()) < max_segments) {
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const auto left = detail::gk15(f, worst.a, mid);
        const auto right = detail::gk15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // re-sum to shed accumulated round-off in the running total
    value = 0.0;
    error = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    return {value, error};
}

/// Smallest x on a doubling ladder from `start` where `bound(x) < cutoff`.
inline double truncation_point(const std::function<double(double)>& bound, double start,
                               double cutoff = 1e-14)
{
    double x = start;
    for (int i = 0; i < 200 && bound(x) >= cutoff; ++i)
        x *= 1.25;
    if (bound(x) >= cutoff)
        throw std::runtime_error("integrand bound never fell below cutoff");
    return x;
}

/// ∫_0^∞ of a non-negative, non-increasing integrand (a survival function or
/// product of them), truncated where it drops below 1e-14.
inline QuadResult integrate_survival(const std::function<double(double)>& f, double scale = 1.0,
                                     double abs_tol = 1e-10)
{
    const double x_max = truncation_point([&](double x) { return std::abs(f(x)); }, scale);
    return adaptive_integrate(f, 0.0, x_max, abs_tol);
}

/// Trapezoid rule on a uniform grid of values.
inline double trapezoid(const std::vector<double>& y, double step)
{
    if (y.size() < 2)
        return 0.0;
    double s = 0.5 * (y.front() + y.back());
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        s += y[i];
    return s * step;
}

}  // namespace aoi::testing
