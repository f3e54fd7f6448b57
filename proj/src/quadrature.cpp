#include "nipaths/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "nipaths/error.hpp"

namespace nipaths {

namespace {

GaussRule build_rule(int n)
{
    GaussRule rule;
    rule.nodes.resize(static_cast<size_t>(n));
    rule.weights.resize(static_cast<size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int m = 2; m <= n; ++m) {
                const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16)
                break;
        }
        // Refresh the derivative at the converged node.
        double p0 = 1.0, p1 = x;
        for (int m = 2; m <= n; ++m) {
            const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<size_t>(i)] = -x;
        rule.nodes[static_cast<size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<size_t>(i)] = w;
        rule.weights[static_cast<size_t>(n - 1 - i)] = w;
    }
    return rule;
}

cplx arc_estimate(const ComplexFn& f, const ArcSpec& arc, int n)
{
    const auto& rule = gauss_legendre(n);
    cplx acc{0.0, 0.0};
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        const double theta = arc.half_angle * rule.nodes[i];
        const cplx z = std::polar(arc.radius, theta);
        acc += rule.weights[i] * f(z) * z;
    }
    // dz = i z dtheta, and dtheta = half_angle dt.
    return acc * arc.half_angle / (2.0 * std::numbers::pi);
}

}  // namespace

ArcSpec arc_for_spacing(int k, double radius)
{
    return ArcSpec{std::numbers::pi / k, radius};
}

const GaussRule& gauss_legendre(int n)
{
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot)
        slot = std::make_unique<GaussRule>(build_rule(n));
    return *slot;
}

QuadResult arc_integral(const ComplexFn& f, const ArcSpec& arc, double tol, int node_cap)
{
    int n = 16;
    cplx prev = arc_estimate(f, arc, n);
    while (2 * n <= node_cap) {
        n *= 2;
        const cplx cur = arc_estimate(f, arc, n);
        const double diff = std::abs(cur - prev);
        if (diff < tol)
            return {cur, diff, n};
        prev = cur;
    }
    throw Error(ErrorCode::NoConvergence, "arc integral not converged at node cap");
}

QuadResult circle_integral(const ComplexFn& f, const CircleSpec& circle, double tol, int node_cap)
{
    // Trapezoid sums S_n = sum f(w_j)(w_j - c) over n equispaced nodes; the
    // doubled rule reuses S_n and adds the n midpoints.
    auto sample = [&](int j, int n) {
        const cplx offset = std::polar(circle.radius, 2.0 * std::numbers::pi * j / n);
        return f(circle.center + offset) * offset;
    };
    int n = 16;
    cplx sum{0.0, 0.0};
    for (int j = 0; j < n; ++j)
        sum += sample(j, n);
    cplx prev = sum / static_cast<double>(n);
    while (2 * n <= node_cap) {
        for (int j = 1; j < 2 * n; j += 2)
            sum += sample(j, 2 * n);
        n *= 2;
        const cplx cur = sum / static_cast<double>(n);
        const double diff = std::abs(cur - prev);
        if (diff < tol)
            return {cur, diff, n};
        prev = cur;
    }
    throw Error(ErrorCode::NoConvergence, "circle integral not converged at node cap");
}

}  // namespace nipaths
