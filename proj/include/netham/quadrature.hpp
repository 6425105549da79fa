#pragma once
// quadrature.hpp — small numeric helpers shared by the mode-spectrum and bath
// modules: composite Gauss-Legendre panels (optionally log-spaced), pairwise
// (cascade) summation for deterministic reductions, and a principal-value
// integral with symmetric excision plus an analytic correction for the two
// panels adjacent to the singularity.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace netham {

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1], computed
// by Newton iteration on the Legendre recurrence.
struct GaussRule {
    std::vector<double> x, w;
    explicit GaussRule(int n);
};

inline GaussRule::GaussRule(int n) {
    if (n < 1) throw std::invalid_argument("gauss rule order must be positive");
    x.resize(static_cast<size_t>(n));
    w.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (t * p1 - p0) / (t * t - 1.0);
        x[static_cast<size_t>(i)] = t;
        w[static_cast<size_t>(i)] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

// Deterministic pairwise summation.
inline double pairwise_sum(std::vector<double> v) {
    if (v.empty()) return 0.0;
    size_t n = v.size();
    while (n > 1) {
        size_t half = (n + 1) / 2;
        for (size_t i = 0; i < n / 2; ++i) v[i] = v[2 * i] + v[2 * i + 1];
        if (n % 2) v[n / 2] = v[n - 1];
        n = half;
    }
    return v[0];
}

// ∫_a^b f, composite Gauss-Legendre with `panels` equal panels.
inline double integrate(const std::function<double(double)>& f, double a,
                        double b, int panels = 64, int order = 16) {
    GaussRule gr(order);
    std::vector<double> parts;
    parts.reserve(static_cast<size_t>(panels));
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double lo = a + p * h, mid = lo + 0.5 * h;
        double s = 0;
        for (size_t i = 0; i < gr.x.size(); ++i)
            s += gr.w[i] * f(mid + 0.5 * h * gr.x[i]);
        parts.push_back(0.5 * h * s);
    }
    return pairwise_sum(std::move(parts));
}

// ∫_a^b f with panels geometrically spaced (a > 0 required); good for
// integrands varying over decades.
inline double integrate_log(const std::function<double(double)>& f, double a,
                            double b, int panels = 64, int order = 16) {
    if (a <= 0 || b <= a) throw std::invalid_argument("bad log-grid bounds");
    return integrate([&](double u) { double t = std::exp(u); return f(t) * t; },
                     std::log(a), std::log(b), panels, order);
}

// Principal value of ∫_a^b f(t)/(t - s) dt with s strictly inside (a, b).
// Symmetric excision of [s-h, s+h] removes the divergent part of the two
// adjacent panels; the remainder over the excised window is f(s)·log(...) = 0
// for the symmetric window plus the regular part, integrated with the
// singularity subtracted: ∫ (f(t)-f(s))/(t-s) over [s-h, s+h].
inline double principal_value(const std::function<double(double)>& f, double a,
                              double b, double s, int panels = 64,
                              int order = 16) {
    if (!(a < s && s < b)) throw std::invalid_argument("pv pole outside range");
    double h = 0.5 * std::min(s - a, b - s);
    auto g = [&](double t) { return f(t) / (t - s); };
    double outer = 0;
    if (a < s - h) outer += integrate(g, a, s - h, panels, order);
    if (s + h < b) outer += integrate(g, s + h, b, panels, order);
    // regularized inner window; (f(t)-f(s))/(t-s) is smooth for smooth f
    double fs = f(s);
    auto reg = [&](double t) {
        double d = t - s;
        if (std::abs(d) < 1e-300) return 0.0;  // removable point
        return (f(t) - fs) / d;
    };
    double inner = integrate(reg, s - h, s + h, panels, order);
    return outer + inner;
}

}  // namespace netham
