#include "nipaths/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nipaths/dpp_stats.hpp"
#include "nipaths/error.hpp"
#include "nipaths/kernel_finite.hpp"
#include "nipaths/parallel.hpp"

namespace nipaths {

namespace {

struct Query {
    GridPoint a, b;
};

double sup_error(const std::vector<Query>& qs, int threads, const std::function<double(const Query&)>& err)
{
    std::vector<double> e(qs.size());
    parallel_for(qs.size(), threads, [&](size_t i) { e[i] = err(qs[i]); });
    double m = 0.0;
    for (double v : e)
        m = std::max(m, v);
    return m;
}

void fill_ratios(ConvergenceReport& r)
{
    r.ratios.clear();
    for (size_t i = 1; i < r.errors.size(); ++i)
        r.ratios.push_back(r.errors[i - 1] > 0.0 ? r.errors[i] / r.errors[i - 1] : 0.0);
}

}  // namespace

bool strictly_decreasing(const std::vector<double>& errors, double floor)
{
    for (size_t i = 1; i < errors.size(); ++i) {
        if (errors[i] < floor && errors[i - 1] < floor)
            continue;
        if (!(errors[i] < errors[i - 1]))
            return false;
    }
    return true;
}

double thm3_gamma_scale(int k, double xi, double beta) { return std::pow(xi / (1.0 - xi), 1.0 / k) * beta; }

long thm3_offset(int k, double xi, int n) { return static_cast<long>(k) * std::lround(xi * n); }

ConvergenceReport thm3_convergence(const Thm3Config& cfg)
{
    if (!(cfg.xi > 0.0 && cfg.xi < 1.0))
        throw Error(ErrorCode::InvalidParams, "xi must lie in (0, 1)");
    const int radius = cfg.x_radius < 0 ? 2 * cfg.k : cfg.x_radius;
    const double c = thm3_gamma_scale(cfg.k, cfg.xi, cfg.beta);
    LimitParams lp{cfg.k, std::vector<double>(static_cast<size_t>(cfg.s_max), c * cfg.alpha), 1e-12};
    validate_limit(lp);

    std::vector<Query> qs;
    for (int s1 = 0; s1 <= cfg.s_max; ++s1)
        for (int s2 = 0; s2 <= cfg.s_max; ++s2)
            for (long x1 = -radius; x1 <= radius; ++x1)
                for (long x2 = -radius; x2 <= radius; ++x2)
                    qs.push_back({{s1, x1}, {s2, x2}});
    std::vector<double> limit(qs.size());
    parallel_for(qs.size(), cfg.threads, [&](size_t i) { limit[i] = limit_kernel(lp, qs[i].a, qs[i].b); });

    ConvergenceReport r;
    r.experiment = "thm3";
    r.parameter = "N";
    for (int n : cfg.n_list) {
        if (cfg.s_max > n)
            throw Error(ErrorCode::InvalidParams, "window lines exceed N");
        ModelParams p;
        p.n = n;
        for (int j = 0; j < n; ++j) {
            p.k.push_back(cfg.k * j);
            p.l.push_back(j);
        }
        p.alpha.assign(static_cast<size_t>(n), cfg.alpha);
        p.beta.assign(static_cast<size_t>(n), cfg.beta);
        const FiniteKernel kernel(validate(p));
        const long off = thm3_offset(cfg.k, cfg.xi, n);
        if (off - radius < 0)
            throw Error(ErrorCode::InvalidParams, "query window reaches below height 0");
        std::vector<double> e(qs.size());
        parallel_for(qs.size(), cfg.threads, [&](size_t i) {
            const auto& q = qs[i];
            const double gauge = std::pow(c, static_cast<double>(q.a.x - q.b.x));
            const double f = gauge * kernel({q.a.s, off + q.a.x}, {q.b.s, off + q.b.x});
            e[i] = std::fabs(f - limit[i]);
        });
        r.values.push_back(n);
        r.errors.push_back(*std::max_element(e.begin(), e.end()));
    }
    fill_ratios(r);
    const bool dec = strictly_decreasing(r.errors);
    const double last_over_first = r.errors.front() > 0.0 ? r.errors.back() / r.errors.front() : 0.0;
    r.extras.emplace_back("last_over_first", last_over_first);
    r.pass = dec && (cfg.ratio_bound <= 0.0 || last_over_first <= cfg.ratio_bound);
    r.rule = "errors strictly decrease in N";
    if (cfg.ratio_bound > 0.0)
        r.rule += " and last/first <= " + std::to_string(cfg.ratio_bound);
    return r;
}

ConvergenceReport prop1_convergence(const Prop1Config& cfg)
{
    std::vector<Query> qs;
    for (int s1 = 0; s1 <= cfg.s_max; ++s1)
        for (int s2 = 0; s2 <= cfg.s_max; ++s2)
            for (long x1 = -cfg.x_radius; x1 <= cfg.x_radius; ++x1)
                for (long x2 = -cfg.x_radius; x2 <= cfg.x_radius; ++x2)
                    qs.push_back({{s1, x1}, {s2, x2}});
    if (static_cast<int>(cfg.gamma_prefix.size()) < cfg.s_max)
        throw Error(ErrorCode::IndexError, "gamma prefix shorter than the window");
    const double c = std::numbers::pi / cfg.k;

    ConvergenceReport r;
    r.experiment = "prop1";
    r.parameter = "S";
    for (int big_s : cfg.s_list) {
        LimitParams lp{cfg.k, std::vector<double>(static_cast<size_t>(big_s), cfg.gamma_bulk), 1e-12};
        lp.gamma.insert(lp.gamma.end(), cfg.gamma_prefix.begin(), cfg.gamma_prefix.end());
        validate_limit(lp);
        r.values.push_back(big_s);
        r.errors.push_back(sup_error(qs, cfg.threads, [&](const Query& q) {
            const double lhs = limit_kernel(lp, {big_s + q.a.s, q.a.x}, {big_s + q.b.s, q.b.x});
            return std::fabs(lhs - extended_sine(c, cfg.gamma_prefix, q.a, q.b));
        }));
    }
    fill_ratios(r);
    if (cfg.k == 1) {
        const double worst = *std::max_element(r.errors.begin(), r.errors.end());
        r.pass = worst <= 1e-9;
        r.rule = "k = 1 is an identity: all errors <= 1e-9";
        return r;
    }
    r.pass = strictly_decreasing(r.errors);
    r.rule = "errors strictly decrease in S";
    if (cfg.ratio_hi > 0.0) {
        for (double q : r.ratios)
            r.pass = r.pass && q >= cfg.ratio_lo && q <= cfg.ratio_hi;
        r.rule += " with every ratio in [" + std::to_string(cfg.ratio_lo) + ", " + std::to_string(cfg.ratio_hi) + "]";
    }
    return r;
}

ConvergenceReport prop2_convergence(const Prop2Config& cfg)
{
    if (static_cast<int>(cfg.gamma.size()) < cfg.s_max)
        throw Error(ErrorCode::IndexError, "gamma prefix shorter than the window");
    std::vector<Query> qs;
    for (int s1 = 0; s1 <= cfg.s_max; ++s1)
        for (int s2 = 0; s2 <= cfg.s_max; ++s2)
            for (long x1 = cfg.x_lo; x1 <= cfg.x_hi; ++x1)
                for (long x2 = cfg.x_lo; x2 <= cfg.x_hi; ++x2)
                    qs.push_back({{s1, x1}, {s2, x2}});

    ConvergenceReport r;
    r.experiment = "prop2";
    r.parameter = "k";
    for (int k : cfg.k_list) {
        LimitParams lp{k, cfg.gamma, 1e-12};
        validate_limit(lp);
        r.values.push_back(k);
        r.errors.push_back(sup_error(qs, cfg.threads, [&](const Query& q) {
            const double conj = single_walker_conjugation(cfg.gamma, q.a.s, q.b.s) * limit_kernel(lp, q.a, q.b);
            return std::fabs(conj - single_walker_kernel(cfg.gamma, q.a, q.b));
        }));
    }
    fill_ratios(r);

    // Rank one at equal times, and the diagonal as the law of one geometric walker.
    double worst_det = 0.0, worst_law = 0.0;
    for (int s = 0; s <= cfg.s_max; ++s) {
        for (long x = cfg.x_lo; x <= cfg.x_hi; ++x) {
            const GridPoint p{s, x};
            const double diag = single_walker_kernel(cfg.gamma, p, p);
            // Prob(W(s) = x) for independent geometric steps with parameters gamma_1..gamma_s.
            std::vector<double> g(cfg.gamma.begin(), cfg.gamma.begin() + s);
            double law = 0.0;
            if (x >= 0) {
                law = 1.0;
                for (double v : g)
                    law *= 1.0 - v;
                std::vector<double> h(static_cast<size_t>(x) + 1, 0.0);
                h[0] = 1.0;
                for (double v : g)
                    for (size_t m = 1; m < h.size(); ++m)
                        h[m] += v * h[m - 1];
                law *= h.back();
            }
            worst_law = std::max(worst_law, std::fabs(diag - law));
            for (long y = cfg.x_lo; y <= cfg.x_hi; ++y) {
                if (y == x)
                    continue;
                const GridPoint q{s, y};
                const double det = diag * single_walker_kernel(cfg.gamma, q, q) -
                                   single_walker_kernel(cfg.gamma, p, q) * single_walker_kernel(cfg.gamma, q, p);
                worst_det = std::max(worst_det, std::fabs(det));
            }
        }
    }
    r.extras.emplace_back("rank_one_det", worst_det);
    r.extras.emplace_back("walker_law_mismatch", worst_law);
    r.pass = strictly_decreasing(r.errors) && worst_det <= 1e-9 && worst_law <= 1e-12;
    r.rule = "errors strictly decrease in k; equal-time 2x2 determinants <= 1e-9";
    return r;
}

ConvergenceReport prop3_convergence(const Prop3Config& cfg)
{
    const double d = saturation_d(cfg.sigma, cfg.gamma);
    ConvergenceReport r;
    r.experiment = "prop3";
    r.parameter = "k";
    r.extras.emplace_back("d", d);
    std::vector<std::pair<double, double>> etas;
    for (double e1 : cfg.etas)
        for (double e2 : cfg.etas)
            etas.emplace_back(e1, e2);
    std::vector<double> target(etas.size());
    for (size_t i = 0; i < etas.size(); ++i)
        target[i] = johansson_kernel({d}, etas[i].first, etas[i].second);

    for (int k : cfg.k_list) {
        const double s_real = cfg.sigma * k * k;
        const int s = static_cast<int>(std::lround(s_real));
        if (std::fabs(s_real - s) > 1e-9)
            throw Error(ErrorCode::InvalidParams, "sigma k^2 must be an integer");
        LimitParams lp{k, std::vector<double>(static_cast<size_t>(s), cfg.gamma), 1e-12};
        validate_limit(lp);
        const double drift = s_real * cfg.gamma / (1.0 - cfg.gamma);
        std::vector<double> e(etas.size());
        parallel_for(etas.size(), cfg.threads, [&](size_t i) {
            const long x1 = static_cast<long>(std::floor(drift + k * etas[i].first));
            const long x2 = static_cast<long>(std::floor(drift + k * etas[i].second));
            e[i] = std::fabs(k * limit_kernel(lp, {s, x1}, {s, x2}) - target[i]);
        });
        r.values.push_back(k);
        r.errors.push_back(*std::max_element(e.begin(), e.end()));
    }
    fill_ratios(r);
    r.pass = strictly_decreasing(r.errors);
    r.rule = "errors strictly decrease in k";
    return r;
}

VarianceReport variance_saturation(const VarianceConfig& cfg)
{
    VarianceReport rep;
    bool bounded = true, late_ok = true;
    for (int s : cfg.s_list) {
        LimitParams lp{cfg.k, cfg.gamma, 1e-12};
        const EqualTimeLimitTable table(lp, s);
        const KernelHandle kh{[&table](GridPoint a, GridPoint b) { return table(a.x, b.x); }, "limit"};
        std::vector<VarianceRow> rows;
        for (long half : cfg.l_list) {
            const double v = number_variance(kh, {s, cfg.center, cfg.center + 2 * half}, cfg.threads);
            rows.push_back({s, half, v});
            bounded = bounded && v <= 4.0 * s * s && v >= -1e-8;
        }
        for (size_t i = 1; i < rows.size(); ++i) {
            if (rows[i - 1].half_width >= 40 && !(rows[i].variance - rows[i - 1].variance < cfg.increment_limit))
                late_ok = false;
        }
        rep.rows.insert(rep.rows.end(), rows.begin(), rows.end());
    }
    rep.saturated = bounded && late_ok;
    if (!bounded)
        rep.notes.push_back("a variance exceeds 4 s^2");
    if (!late_ok)
        rep.notes.push_back("a late increment is not below the limit");

    // Sine kernel of the same mean density 1/k.
    const double c = std::numbers::pi / cfg.k;
    const std::vector<double> none;
    const KernelHandle sine{[&](GridPoint a, GridPoint b) { return extended_sine(c, none, a, b); }, "sine"};
    for (long half : cfg.l_list)
        rep.sine_rows.push_back({0, half, number_variance(sine, {0, cfg.center, cfg.center + 2 * half}, cfg.threads)});
    bool increasing = true;
    for (size_t i = 1; i < rep.sine_rows.size(); ++i)
        increasing = increasing && rep.sine_rows[i].variance > rep.sine_rows[i - 1].variance;
    if (rep.sine_rows.size() >= 2) {
        const auto& first = rep.sine_rows.front();
        const auto& last = rep.sine_rows.back();
        const double growth = last.variance - first.variance;
        const double law = std::log((2.0 * last.half_width + 1.0) / (2.0 * first.half_width + 1.0)) /
                           (std::numbers::pi * std::numbers::pi);
        rep.sine_grows = increasing && std::fabs(growth / law - 1.0) <= 0.25;
        if (!rep.sine_grows)
            rep.notes.push_back("sine control does not follow the logarithmic law");
    }
    rep.pass = rep.saturated && rep.sine_grows;
    return rep;
}

PeriodicityVerdict detect_period(const std::vector<double>& series, int block_len, int max_period)
{
    PeriodicityVerdict v;
    const size_t n = series.size();
    if (n < static_cast<size_t>(2 * max_period + 2))
        return v;
    double mean = 0.0;
    for (double y : series)
        mean += y;
    mean /= static_cast<double>(n);
    // Pearson correlation between the series and its lag-p shift.
    const auto corr = [&](int p) {
        double xy = 0.0, xx = 0.0, yy = 0.0;
        for (size_t i = static_cast<size_t>(p); i < n; ++i) {
            const double a = series[i] - mean, b = series[i - static_cast<size_t>(p)] - mean;
            xy += a * b;
            xx += a * a;
            yy += b * b;
        }
        return xx > 0.0 && yy > 0.0 ? xy / std::sqrt(xx * yy) : 0.0;
    };
    std::vector<double> r(static_cast<size_t>(max_period + 2), 0.0);
    double best = 0.0;
    for (int p = 1; p <= max_period + 1; ++p) {
        r[static_cast<size_t>(p)] = corr(p);
        if (p >= 2 && p <= max_period)
            best = std::max(best, r[static_cast<size_t>(p)]);
    }
    // Smallest lag that is a local maximum close to the best correlation.
    for (int p = 2; p <= max_period; ++p) {
        const double rp = r[static_cast<size_t>(p)];
        if (rp >= 0.5 && rp >= 0.8 * best && rp > r[static_cast<size_t>(p - 1)] && rp >= r[static_cast<size_t>(p + 1)]) {
            v.detected_period = p;
            v.score = rp;
            break;
        }
    }
    if (block_len > 0) {
        double lo = 1e300, hi = 0.0;
        for (size_t b = 0; b + static_cast<size_t>(block_len) <= series.size(); b += static_cast<size_t>(block_len)) {
            const auto [mn, mx] = std::minmax_element(series.begin() + static_cast<long>(b),
                                                      series.begin() + static_cast<long>(b) + block_len);
            const double amp = *mx - *mn;
            lo = std::min(lo, amp);
            hi = std::max(hi, amp);
        }
        v.amplitude_variation = hi > 0.0 ? (hi - lo) / hi : 0.0;
    }
    return v;
}

DensityFigure density_figure(const DensityFigureConfig& cfg)
{
    DensityFigure fig;
    const int s_max = *std::max_element(cfg.s_list.begin(), cfg.s_list.end());
    std::vector<int> blocks;
    for (int b = 0; b <= cfg.n; ++b) {
        const double xi = static_cast<double>(b) / cfg.n;
        const double gamma = xi < 1.0 ? thm3_gamma_scale(cfg.k, xi, cfg.beta) * cfg.alpha : 1.0;
        if (!(gamma < 1.0))
            fig.skipped_blocks.push_back(b);
        else
            blocks.push_back(b);
    }
    std::vector<std::vector<DensityRow>> per_block(blocks.size());
    parallel_for(blocks.size(), cfg.threads, [&](size_t i) {
        const int b = blocks[i];
        const double xi = static_cast<double>(b) / cfg.n;
        const double gamma = thm3_gamma_scale(cfg.k, xi, cfg.beta) * cfg.alpha;
        LimitParams lp{cfg.k, std::vector<double>(static_cast<size_t>(s_max), gamma), 1e-12};
        for (int s : cfg.s_list)
            for (int x = 0; x < cfg.k; ++x)
                per_block[i].push_back({s, b, x, static_cast<long>(b) * cfg.k + x, xi, gamma, limit_density(lp, s, x)});
    });
    for (const auto& rows : per_block)
        fig.rows.insert(fig.rows.end(), rows.begin(), rows.end());
    std::stable_sort(fig.rows.begin(), fig.rows.end(), [](const DensityRow& a, const DensityRow& b) {
        return a.s != b.s ? a.s < b.s : a.axis < b.axis;
    });

    fig.pass = true;
    for (int s : cfg.s_list) {
        std::vector<double> series;
        for (const auto& r : fig.rows)
            if (r.s == s)
                series.push_back(r.density);
        auto v = detect_period(series, cfg.k);
        v.s = s;
        v.pass = v.detected_period == cfg.k && v.amplitude_variation > 0.05;
        fig.pass = fig.pass && v.pass;
        fig.verdicts.push_back(v);
    }
    return fig;
}

}  // namespace nipaths
