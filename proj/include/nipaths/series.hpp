#pragma once

// Exact power-series and alternant algebra. Closed contour integrals around
// the origin of rational integrands are evaluated here as coefficients.

#include <vector>

namespace nipaths {

// coeffs[m] is the coefficient of z^m.
using PolyCoeffs = std::vector<double>;

void trim(PolyCoeffs& p);
double evaluate(const PolyCoeffs& p, double z);
PolyCoeffs multiply(const PolyCoeffs& a, const PolyCoeffs& b);

// [z^m] prod_j (1 - rates_j z)^{-1}; 0 for m < 0.
double complete_homogeneous(long m, const std::vector<double>& rates);

// h_0..h_max for the same product.
std::vector<double> homogeneous_sequence(long max_degree, const std::vector<double>& rates);

// [z^m] P(z) prod_j (1 - rates_j z)^{-1}.
double coeff_of_poly_times_geometric(const PolyCoeffs& poly, const std::vector<double>& rates, long m);

// [z^d] prod_a (1 - a z)^{-1} prod_b (1 - b/z)^{-1}, the Laurent expansion
// valid on |z| = 1 when all |a|, |b| < 1. With both lists nonempty this is a
// convergent series summed to full double precision.
double laurent_coefficient(const std::vector<double>& up, const std::vector<double>& down, long d);

struct AlternantValue {
    double value = 0.0;
    double rel_error = 0.0;  // estimated relative error of value
    bool condition_warning = false;
};

// det(gamma_j^{k_i}) by pivoted LU; for exponents 0, k, .., (N-1)k the
// product of (gamma_j^k - gamma_i^k) over i < j is returned instead and the
// LU value is only used for the cross-check recorded in rel_error.
AlternantValue alternant(const std::vector<int>& exponents, const std::vector<double>& gamma);

// z -> det with column j (1-based) replaced by z^{k_i}, expanded along that
// column. Throws DegenerateBeta when the betas are not pairwise distinct.
PolyCoeffs substituted_alternant(const std::vector<int>& exponents, const std::vector<double>& beta, int j);

}  // namespace nipaths
