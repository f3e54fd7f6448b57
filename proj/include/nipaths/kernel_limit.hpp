#pragma once

// Limit kernels on the lattice N x Z: the interpolating kernel K_k^gamma,
// its continuous-time analogue, the extended discrete sine kernel and the
// saturating kernel of the double scaling limit.
//
// Open arcs are integrated numerically; closed contours around the origin
// are always evaluated as exact series coefficients.

#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "nipaths/model.hpp"
#include "nipaths/quadrature.hpp"

namespace nipaths {

struct LimitParams {
    int k = 1;
    std::vector<double> gamma;  // gamma_1, gamma_2, ... (prefix)
    double tol = 1e-12;
};

// Throws InvalidParams for k < 1, GammaOutOfRange for gamma outside [0, 1).
void validate_limit(const LimitParams& lp);

double limit_kernel(const LimitParams& lp, GridPoint p1, GridPoint p2);
double limit_density(const LimitParams& lp, int s, long x);

// Equal-time values depend on (x1 mod k, x1 - x2) only; this caches them.
class EqualTimeLimitTable {
public:
    EqualTimeLimitTable(LimitParams lp, int s);
    double operator()(long x1, long x2) const;
    int s() const { return s_; }

private:
    LimitParams lp_;
    int s_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<long, long>, double> cache_;
};

// c in (0, pi]; gamma indexed from 1 as above; points (s, x) and (t, y).
double extended_sine(double c, const std::vector<double>& gamma, GridPoint p1, GridPoint p2,
                     double tol = 1e-12);

double continuous_limit_kernel(int k, double sigma1, double sigma2, long x1, long x2, double tol = 1e-12);

// Single walker limit of the conjugated kernel for k -> infinity, and the
// conjugating factor prod_{r<=s1}(1-gamma_r) / prod_{r<=s2}(1-gamma_r).
double single_walker_kernel(const std::vector<double>& gamma, GridPoint p1, GridPoint p2);
double single_walker_conjugation(const std::vector<double>& gamma, int s1, int s2);

struct SaturationParams {
    double d = 1.0;
    double series_tol = 1e-16;
};

void validate_saturation(const SaturationParams& sp);

// d from the scaling parameters: 2 pi sigma gamma / (1 - gamma)^2.
double saturation_d(double sigma, double gamma);

double johansson_kernel(const SaturationParams& sp, double eta1, double eta2);
// Terms j = 0, 1 only, and a bound on the remaining terms.
double johansson_two_term(double d, double eta1, double eta2);
double johansson_two_term_bound(double d);

}  // namespace nipaths
