#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "nipaths/model.hpp"

namespace nipaths {

struct KernelHandle {
    std::function<double(GridPoint, GridPoint)> evaluator;
    std::string label;

    double operator()(GridPoint a, GridPoint b) const { return evaluator(a, b); }
};

struct IntervalSpec {
    int s = 0;
    long lo = 0;
    long hi = -1;  // inclusive; hi < lo is the empty interval
};

// det(K(p_i, p_j)); throws DuplicatePoints on repeated points.
double correlation(const KernelHandle& kh, const std::vector<GridPoint>& points);

// Variance of the number of points in [lo, hi] on line s:
// sum_x K(x,x) - sum_{x,y} K(x,y) K(y,x).
double number_variance(const KernelHandle& kh, const IntervalSpec& iv, int threads = 1);

// G(p) K(p, q) / G(q); throws ZeroGauge when G vanishes at a queried point.
KernelHandle gauge_conjugate(const KernelHandle& kh, std::function<double(GridPoint)> gauge);

std::vector<std::pair<long, double>> density_profile(const KernelHandle& kh, int s, long lo, long hi,
                                                     int threads = 1);

}  // namespace nipaths
