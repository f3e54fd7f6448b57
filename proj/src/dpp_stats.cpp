#include "nipaths/dpp_stats.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <set>

#include "nipaths/error.hpp"
#include "nipaths/parallel.hpp"

namespace nipaths {

double correlation(const KernelHandle& kh, const std::vector<GridPoint>& points)
{
    if (std::set<GridPoint>(points.begin(), points.end()).size() != points.size())
        throw Error(ErrorCode::DuplicatePoints, "correlation points must be distinct");
    const auto n = static_cast<Eigen::Index>(points.size());
    if (n == 0)
        return 1.0;
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = kh(points[static_cast<size_t>(i)], points[static_cast<size_t>(j)]);
    }
    if (n == 1)
        return m(0, 0);
    return m.partialPivLu().determinant();
}

double number_variance(const KernelHandle& kh, const IntervalSpec& iv, int threads)
{
    if (iv.hi < iv.lo)
        return 0.0;
    const size_t len = static_cast<size_t>(iv.hi - iv.lo + 1);
    Eigen::MatrixXd k(static_cast<Eigen::Index>(len), static_cast<Eigen::Index>(len));
    parallel_for(len, threads, [&](size_t i) {
        for (size_t j = 0; j < len; ++j) {
            k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                kh({iv.s, iv.lo + static_cast<long>(i)}, {iv.s, iv.lo + static_cast<long>(j)});
        }
    });
    std::vector<double> rows(len);
    for (size_t i = 0; i < len; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        double r = k(ii, ii);
        for (size_t j = 0; j < len; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            r -= k(ii, jj) * k(jj, ii);
        }
        rows[i] = r;
    }
    return pairwise_sum(rows);
}

KernelHandle gauge_conjugate(const KernelHandle& kh, std::function<double(GridPoint)> gauge)
{
    KernelHandle out;
    out.label = kh.label + " (conjugated)";
    out.evaluator = [inner = kh.evaluator, gauge = std::move(gauge)](GridPoint a, GridPoint b) {
        const double ga = gauge(a), gb = gauge(b);
        if (ga == 0.0 || gb == 0.0 || !std::isfinite(ga) || !std::isfinite(gb))
            throw Error(ErrorCode::ZeroGauge, "gauge vanishes or is not finite at a queried point");
        return ga / gb * inner(a, b);
    };
    return out;
}

std::vector<std::pair<long, double>> density_profile(const KernelHandle& kh, int s, long lo, long hi, int threads)
{
    if (hi < lo)
        return {};
    std::vector<std::pair<long, double>> out(static_cast<size_t>(hi - lo + 1));
    parallel_for(out.size(), threads, [&](size_t i) {
        const GridPoint p{s, lo + static_cast<long>(i)};
        out[i] = {p.x, kh(p, p)};
    });
    return out;
}

}  // namespace nipaths
