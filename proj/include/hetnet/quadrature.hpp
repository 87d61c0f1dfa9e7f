#pragma once

// Gauss-Kronrod 7-15 panels with adaptive bisection, plus helpers for
// semi-infinite ranges. Value type is double or std::complex<double>.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace hetnet::quad {

// QUADPACK dqk15 abscissae/weights on [-1,1].
inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kGK15WeightsK[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kGK15WeightsG[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename T>
double mag(const T& v) {
    using std::abs;
    return abs(v);
}

template <typename T>
struct PanelResult {
    T value{};
    double error = 0.0;
};

template <typename T, typename F>
PanelResult<T> gk15(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    T fc = f(c);
    T resk = kGK15WeightsK[7] * fc;
    T resg = kGK15WeightsG[3] * fc;
    for (int i = 0; i < 7; ++i) {
        double x = h * kGK15Nodes[i];
        T f1 = f(c - x);
        T f2 = f(c + x);
        resk += kGK15WeightsK[i] * (f1 + f2);
        if (i % 2 == 1) resg += kGK15WeightsG[i / 2] * (f1 + f2);
    }
    T value = resk * h;
    double err = mag((resk - resg) * h);
    return {value, err};
}

template <typename T>
struct AdaptiveResult {
    T value{};
    double error = 0.0;
    bool converged = false;
    std::size_t panels = 0;
};

// Error-driven bisection; splits the worst panel first.
template <typename T, typename F>
AdaptiveResult<T> adaptive(F&& f, double a, double b, double abs_tol, double rel_tol,
                           int max_subdivisions, int initial_panels = 1) {
    struct Seg {
        double a, b, err;
        T val;
        bool operator<(const Seg& o) const { return err < o.err; }
    };
    std::priority_queue<Seg> heap;
    T total{};
    double total_err = 0.0;
    initial_panels = std::max(initial_panels, 1);
    for (int i = 0; i < initial_panels; ++i) {
        double x0 = a + (b - a) * i / initial_panels;
        double x1 = a + (b - a) * (i + 1) / initial_panels;
        auto r = gk15<T>(f, x0, x1);
        heap.push({x0, x1, r.error, r.value});
        total += r.value;
        total_err += r.error;
    }
    int splits = 0;
    while (splits < max_subdivisions) {
        double goal = std::max(abs_tol, rel_tol * mag(total));
        if (total_err <= goal) break;
        Seg s = heap.top();
        heap.pop();
        double mid = 0.5 * (s.a + s.b);
        if (mid <= s.a || mid >= s.b) {  // panel at rounding limit
            total_err = std::max(0.0, total_err);
            heap.push(s);
            break;
        }
        auto r1 = gk15<T>(f, s.a, mid);
        auto r2 = gk15<T>(f, mid, s.b);
        total += r1.value + r2.value - s.val;
        total_err += r1.error + r2.error - s.err;
        heap.push({s.a, mid, r1.error, r1.value});
        heap.push({mid, s.b, r2.error, r2.value});
        ++splits;
    }
    double goal = std::max(abs_tol, rel_tol * mag(total));
    return {total, total_err, total_err <= goal, heap.size()};
}

// Integral over [a, inf) via x = a + t/(1-t). Deep subdivision can round a
// node onto t = 1 exactly; the limit is 0 for any absolutely convergent
// integrand.
template <typename T, typename F>
AdaptiveResult<T> adaptive_semi_infinite(F&& f, double a, double abs_tol, double rel_tol,
                                         int max_subdivisions) {
    auto g = [&](double t) -> T {
        double om = 1.0 - t;
        if (!(om > 1e-300)) return T{};
        double x = a + t / om;
        if (!std::isfinite(x)) return T{};
        return f(x) / (om * om);
    };
    return adaptive<T>(g, 0.0, 1.0, abs_tol, rel_tol, max_subdivisions, 8);
}

// Smallest u with g(u) >= target, for g increasing; geometric bracket + bisection.
template <typename G>
double solve_increasing(G&& g, double target, double u0 = 1.0) {
    double lo = u0, hi = u0;
    if (g(lo) >= target) {
        while (lo > 1e-280 && g(lo * 0.5) >= target) lo *= 0.5;
        return lo;
    }
    for (int i = 0; i < 2000 && g(hi) < target; ++i) hi *= 2.0;
    lo = hi * 0.5;
    for (int i = 0; i < 100; ++i) {
        double mid = 0.5 * (lo + hi);
        (g(mid) < target ? lo : hi) = mid;
    }
    return hi;
}

}  // namespace hetnet::quad
