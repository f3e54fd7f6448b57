#include "nipaths/kernel_limit.hpp"

#include <cmath>
#include <numbers>

#include "nipaths/error.hpp"
#include "nipaths/series.hpp"

namespace nipaths {

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> slice(const std::vector<double>& gamma, int from, int to)
{
    // gamma_{from+1..to}, 1-based.
    if (to <= from)
        return {};
    return {gamma.begin() + from, gamma.begin() + to};
}

void require_prefix(const std::vector<double>& gamma, int s)
{
    if (s < 0)
        throw Error(ErrorCode::IndexError, "negative time index");
    if (static_cast<size_t>(s) > gamma.size())
        throw Error(ErrorCode::IndexError, "gamma prefix shorter than the queried time");
}

cplx unit_root(int k, long j)
{
    const long r = ((j % k) + k) % k;
    return std::polar(1.0, 2.0 * pi * static_cast<double>(r) / k);
}

}  // namespace

void validate_limit(const LimitParams& lp)
{
    if (lp.k < 1)
        throw Error(ErrorCode::InvalidParams, "spacing k must be positive");
    if (!(lp.tol > 0.0))
        throw Error(ErrorCode::InvalidParams, "tolerance must be positive");
    for (double g : lp.gamma) {
        if (!(g >= 0.0 && g < 1.0))
            throw Error(ErrorCode::GammaOutOfRange, "gamma must lie in [0, 1)");
    }
}

double limit_kernel(const LimitParams& lp, GridPoint p1, GridPoint p2)
{
    validate_limit(lp);
    require_prefix(lp.gamma, p1.s);
    require_prefix(lp.gamma, p2.s);
    const long m = p1.x - p2.x;
    const int k = lp.k;

    double indicator = 0.0;
    if (p1.s > p2.s)
        indicator = -complete_homogeneous(m, slice(lp.gamma, p2.s, p1.s));

    const ArcSpec arc = arc_for_spacing(k);
    const auto num = slice(lp.gamma, 0, p2.s);
    const auto den = slice(lp.gamma, 0, p1.s);
    cplx total{0.0, 0.0};
    for (int j = 0; j < k; ++j) {
        const cplx w = unit_root(k, j);
        const auto f = [&](cplx z) {
            cplx v{1.0, 0.0};
            for (double g : num)
                v *= 1.0 - g * z;
            for (double g : den)
                v /= 1.0 - g * w * z;
            return v * std::pow(z, -static_cast<double>(m + 1));
        };
        // omega^{-j x1}, reduced mod k so large x stay exact.
        const cplx phase = unit_root(k, -static_cast<long>(j) * (((p1.x % k) + k) % k));
        total += phase * arc_integral(f, arc, lp.tol).value;
    }
    if (std::fabs(total.imag()) >= 10.0 * lp.tol * std::max(1.0, std::fabs(total.real())))
        throw Error(ErrorCode::ImaginaryResidue, "assembled limit kernel is not real");
    return indicator + total.real();
}

double limit_density(const LimitParams& lp, int s, long x)
{
    validate_limit(lp);
    require_prefix(lp.gamma, s);
    const int k = lp.k;
    const ArcSpec arc = arc_for_spacing(k);
    const auto g = slice(lp.gamma, 0, s);
    cplx total{1.0 / k, 0.0};
    for (int j = 1; j < k; ++j) {
        const cplx w = unit_root(k, j);
        const auto f = [&](cplx z) {
            cplx v{1.0, 0.0};
            for (double gr : g)
                v *= (1.0 - gr * z) / (1.0 - gr * w * z);
            return v / z;
        };
        const cplx phase = unit_root(k, -static_cast<long>(j) * (((x % k) + k) % k));
        total += phase * arc_integral(f, arc, lp.tol).value;
    }
    if (std::fabs(total.imag()) >= 10.0 * lp.tol)
        throw Error(ErrorCode::ImaginaryResidue, "assembled density is not real");
    return total.real();
}

EqualTimeLimitTable::EqualTimeLimitTable(LimitParams lp, int s) : lp_(std::move(lp)), s_(s)
{
    validate_limit(lp_);
    require_prefix(lp_.gamma, s_);
}

double EqualTimeLimitTable::operator()(long x1, long x2) const
{
    const long r = ((x1 % lp_.k) + lp_.k) % lp_.k;
    const auto key = std::make_pair(r, x1 - x2);
    {
        std::lock_guard lock(mu_);
        const auto it = cache_.find(key);
        if (it != cache_.end())
            return it->second;
    }
    const double v = limit_kernel(lp_, {s_, r}, {s_, r - (x1 - x2)});
    std::lock_guard lock(mu_);
    cache_.emplace(key, v);
    return v;
}

double extended_sine(double c, const std::vector<double>& gamma, GridPoint p1, GridPoint p2, double tol)
{
    if (!(c > 0.0 && c <= pi))
        throw Error(ErrorCode::InvalidParams, "sine kernel parameter must lie in (0, pi]");
    require_prefix(gamma, p1.s);
    require_prefix(gamma, p2.s);
    const long m = p1.x - p2.x;
    if (p1.s == p2.s) {
        if (m == 0)
            return c / pi;
        return std::sin(c * static_cast<double>(m)) / (pi * static_cast<double>(m));
    }
    const ArcSpec arc{c, 1.0};
    if (p1.s < p2.s) {
        const auto g = slice(gamma, p1.s, p2.s);
        const auto f = [&](cplx z) {
            cplx v{1.0, 0.0};
            for (double gr : g)
                v *= 1.0 - gr * z;
            return v * std::pow(z, -static_cast<double>(m + 1));
        };
        return arc_integral(f, arc, tol).value.real();
    }
    // Contour crossing left of the origin: right arc minus the closed circle.
    const auto g = slice(gamma, p2.s, p1.s);
    const auto f = [&](cplx z) {
        cplx v{1.0, 0.0};
        for (double gr : g)
            v /= 1.0 - gr * z;
        return v * std::pow(z, -static_cast<double>(m + 1));
    };
    return arc_integral(f, arc, tol).value.real() - complete_homogeneous(m, g);
}

double continuous_limit_kernel(int k, double sigma1, double sigma2, long x1, long x2, double tol)
{
    if (k < 1)
        throw Error(ErrorCode::InvalidParams, "spacing k must be positive");
    if (sigma1 < 0.0 || sigma2 < 0.0)
        throw Error(ErrorCode::InvalidParams, "times must be nonnegative");
    const long m = x1 - x2;
    double indicator = 0.0;
    if (sigma1 > sigma2 && m >= 0) {
        const double ds = sigma1 - sigma2;
        indicator = -std::exp(static_cast<double>(m) * std::log(ds) - std::lgamma(static_cast<double>(m) + 1.0));
    }
    const ArcSpec arc = arc_for_spacing(k);
    cplx total{0.0, 0.0};
    for (int j = 0; j < k; ++j) {
        const cplx w = unit_root(k, j);
        const auto f = [&](cplx z) {
            return std::exp((w * sigma1 - sigma2) * z) * std::pow(z, -static_cast<double>(m + 1));
        };
        const cplx phase = unit_root(k, -static_cast<long>(j) * (((x1 % k) + k) % k));
        total += phase * arc_integral(f, arc, tol).value;
    }
    if (std::fabs(total.imag()) >= 10.0 * tol * std::max(1.0, std::fabs(total.real())))
        throw Error(ErrorCode::ImaginaryResidue, "assembled continuous kernel is not real");
    return indicator + total.real();
}

double single_walker_conjugation(const std::vector<double>& gamma, int s1, int s2)
{
    require_prefix(gamma, s1);
    require_prefix(gamma, s2);
    double v = 1.0;
    for (int r = 0; r < s1; ++r)
        v *= 1.0 - gamma[static_cast<size_t>(r)];
    for (int r = 0; r < s2; ++r)
        v /= 1.0 - gamma[static_cast<size_t>(r)];
    return v;
}

double single_walker_kernel(const std::vector<double>& gamma, GridPoint p1, GridPoint p2)
{
    require_prefix(gamma, p1.s);
    require_prefix(gamma, p2.s);
    double v = 0.0;
    if (p1.s > p2.s) {
        const auto g = slice(gamma, p2.s, p1.s);
        double w = 1.0;
        for (double gr : g)
            w *= 1.0 - gr;
        v -= w * complete_homogeneous(p1.x - p2.x, g);
    }
    const auto g = slice(gamma, 0, p1.s);
    double w = 1.0;
    for (double gr : g)
        w *= 1.0 - gr;
    return v + w * complete_homogeneous(p1.x, g);
}

void validate_saturation(const SaturationParams& sp)
{
    if (!(sp.d > 0.0))
        throw Error(ErrorCode::InvalidParams, "d must be positive");
    if (!(sp.series_tol > 0.0))
        throw Error(ErrorCode::InvalidParams, "series tolerance must be positive");
}

double saturation_d(double sigma, double gamma)
{
    return 2.0 * pi * sigma * gamma / ((1.0 - gamma) * (1.0 - gamma));
}

double johansson_kernel(const SaturationParams& sp, double eta1, double eta2)
{
    validate_saturation(sp);
    // Term j of the bilateral sum rewritten as
    //   Re[exp(-2 pi i eta1 j - pi d j^2) sinh(a)/a],  a = pi (d j + i (eta1 - eta2)),
    // which sums to the same value and has no removable singularity.
    const double d = sp.d;
    const auto term = [&](long j) {
        const cplx a = pi * cplx(d * static_cast<double>(j), eta1 - eta2);
        const cplx sinhc = std::abs(a) < 1e-8 ? 1.0 + a * a / 6.0 : std::sinh(a) / a;
        const double jd = static_cast<double>(j);
        return (std::exp(cplx(-pi * d * jd * jd, -2.0 * pi * eta1 * jd)) * sinhc).real();
    };
    double sum = term(0);
    for (long j = 1;; ++j) {
        sum += term(j) + term(-j);
        // Magnitude of term j is at most exp(-pi d j (j-1)) cosh-bounded; stop once negligible.
        const double jd = static_cast<double>(j);
        if (std::exp(-pi * d * jd * (jd - 1.0)) < sp.series_tol && j >= 2)
            break;
        if (j > 100000)
            throw Error(ErrorCode::NoConvergence, "saturation kernel series");
    }
    return sum;
}

double johansson_two_term(double d, double eta1, double eta2)
{
    const double de = eta1 - eta2;
    const double sine = std::fabs(de) < 1e-300 ? 1.0 : std::sin(pi * de) / (pi * de);
    return sine + (d * std::cos(pi * (eta1 + eta2)) - de * std::sin(pi * (eta1 + eta2))) / (pi * (d * d + de * de));
}

double johansson_two_term_bound(double d)
{
    // |term j| <= exp(-pi d j (j-1)) / (pi d |j|) for the omitted j.
    double b = 0.0;
    for (long j = 2; j < 1000; ++j) {
        const double jd = static_cast<double>(j);
        const double t = std::exp(-pi * d * jd * (jd - 1.0)) / (pi * d * jd);
        const double tn = std::exp(-pi * d * (-jd + 1.0) * (-jd)) / (pi * d * (jd - 1.0));  // j' = -(j-1)
        b += t + tn;
        if (t + tn < 1e-300)
            break;
    }
    return b;
}

}  // namespace nipaths
