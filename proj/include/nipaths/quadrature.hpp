#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace nipaths {

using cplx = std::complex<double>;
using ComplexFn = std::function<cplx(cplx)>;

// Arc radius*e^{i theta}, theta in [-half_angle, half_angle], crossing the
// positive real axis once at z = radius.
struct ArcSpec {
    double half_angle = 3.14159265358979323846;
    double radius = 1.0;
};

ArcSpec arc_for_spacing(int k, double radius = 1.0);

struct CircleSpec {
    cplx center{0.0, 0.0};
    double radius = 1.0;
};

struct QuadResult {
    cplx value{0.0, 0.0};
    double error = 0.0;  // difference of the last two doubling estimates
    int nodes = 0;
};

inline constexpr double default_tol = 1e-10;
inline constexpr int default_node_cap = 1 << 14;

// (1/2 pi i) times the integral of f dz along the arc, Gauss-Legendre in theta.
QuadResult arc_integral(const ComplexFn& f, const ArcSpec& arc, double tol = default_tol,
                        int node_cap = default_node_cap);

// (1/2 pi i) times the closed counterclockwise integral, trapezoid rule.
QuadResult circle_integral(const ComplexFn& f, const CircleSpec& circle, double tol = default_tol,
                           int node_cap = default_node_cap);

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Nodes and weights on [-1, 1]; cached, thread-safe.
const GaussRule& gauss_legendre(int n);

}  // namespace nipaths
