#pragma once

// Globally adaptive Gauss-Kronrod (7/15) integration over a real interval.
// The integrand may return any value type that supports addition and scaling
// by double (double, std::complex<double>, Eigen matrices); the error norm is
// selected by overload of `quad_norm`.

#include <algorithm>
#include <cmath>
#include <complex>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "modelspace/errors.hpp"

namespace modelspace {

struct QuadratureOptions {
    double abs_tol = 1e-13;
    double rel_tol = 1e-11;
    int max_panels = 40000;
};

template <class V>
struct QuadratureResult {
    V value;
    double error = 0.0;
    int panels = 0;
};

inline double quad_norm(double v) { return std::abs(v); }
inline double quad_norm(const std::complex<double>& v) { return std::abs(v); }
template <class Derived>
double quad_norm(const Eigen::MatrixBase<Derived>& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

namespace detail {

inline constexpr double kGkNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd Kronrod nodes (indices 1, 3, 5, 7).
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class V>
struct Panel {
    double a;
    double b;
    V value;
    double error;
};

template <class V, class F>
Panel<V> gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    V fc = f(c);
    V kron = fc * kKronrodWeights[7];
    V gauss = fc * kGaussWeights[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kGkNodes[i];
        V s = f(c - dx) + f(c + dx);
        kron = kron + s * kKronrodWeights[i];
        if (i % 2 == 1) gauss = gauss + s * kGaussWeights[i / 2];
    }
    V kv = kron * h;
    V gv = gauss * h;
    const double err = quad_norm(kv - gv);
    return Panel<V>{a, b, kv, err};
}

}  // namespace detail

// Integrates f over [breaks.front(), breaks.back()], starting from the panels
// delimited by `breaks` (sorted ascending). Throws QuadratureFailure when the
// panel budget is exhausted before the tolerance is met.
template <class V, class F>
QuadratureResult<V> integrate(F&& f, std::span<const double> breaks,
                              const QuadratureOptions& opts = {}) {
    if (breaks.size() < 2) throw InvalidArgument("integrate: need at least two breakpoints");
    using detail::Panel;
    auto cmp = [](const Panel<V>& x, const Panel<V>& y) { return x.error < y.error; };
    std::priority_queue<Panel<V>, std::vector<Panel<V>>, decltype(cmp)> heap(cmp);

    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        auto p = detail::gk15<V>(f, breaks[i], breaks[i + 1]);
        total_err += p.error;
        heap.push(std::move(p));
    }
    if (heap.empty()) throw InvalidArgument("integrate: empty interval");

    auto sum_values = [&heap]() {
        auto copy = heap;
        V acc = copy.top().value;
        copy.pop();
        while (!copy.empty()) {
            acc = acc + copy.top().value;
            copy.pop();
        }
        return acc;
    };

    V total = sum_values();
    int panels = static_cast<int>(heap.size());
    int since_resum = 0;
    while (true) {
        const double target = std::max(opts.abs_tol, opts.rel_tol * quad_norm(total));
        if (total_err <= target) break;
        if (panels >= opts.max_panels) {
            throw QuadratureFailure("adaptive quadrature exceeded " +
                                    std::to_string(opts.max_panels) + " panels (error " +
                                    std::to_string(total_err) + ")");
        }
        Panel<V> worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw QuadratureFailure("adaptive quadrature: panel below floating resolution");
        }
        auto left = detail::gk15<V>(f, worst.a, mid);
        auto right = detail::gk15<V>(f, mid, worst.b);
        total_err += left.error + right.error - worst.error;
        total = total + (left.value + right.value - worst.value);
        heap.push(std::move(left));
        heap.push(std::move(right));
        ++panels;
        // Periodically rebuild running sums to bound cancellation drift.
        if (++since_resum == 256) {
            since_resum = 0;
            total = sum_values();
            double e = 0.0;
            auto copy = heap;
            while (!copy.empty()) {
                e += copy.top().error;
                copy.pop();
            }
            total_err = e;
        }
    }
    return QuadratureResult<V>{sum_values(), total_err, panels};
}

template <class V, class F>
QuadratureResult<V> integrate(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
    const double br[2] = {a, b};
    return integrate<V>(std::forward<F>(f), std::span<const double>(br, 2), opts);
}

}  // namespace modelspace
