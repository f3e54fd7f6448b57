// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <string>

#include <fmt/core.h>

#include "helpers.hpp"
#include "nipaths/dpp_stats.hpp"
#include "nipaths/harness.hpp"
#include "nipaths/kernel_finite.hpp"
#include "nipaths/kernel_limit.hpp"
#include "nipaths/oracle.hpp"
#include "nipaths/tiling.hpp"

using namespace nipaths;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Random models for criteria 1-3: N cycles through 1, 2, 3; every other
// model has equal spacing so the equal-spacing route is exercised too.
std::vector<ValidatedModel> sweep_models(int count)
{
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> rate(0.2, 0.8);
    std::uniform_int_distribution<int> gap(1, 3);
    std::vector<ValidatedModel> out;
    for (int i = 0; i < count; ++i) {
        int n = 1 + i % 3;
        std::vector<int> k{0};
        int spacing = gap(rng);
        for (int j = 1; j < n; ++j) k.push_back(k.back() + (i % 2 == 0 ? spacing : gap(rng)));
        std::vector<double> a, b;
        for (int j = 0; j < n; ++j) {
            a.push_back(rate(rng));
            b.push_back(rate(rng));
        }
        out.push_back(testutil::model(k, a, b));
    }
    return out;
}

std::vector<std::vector<GridPoint>> random_point_sets(std::mt19937_64& rng, int n, int count)
{
    std::uniform_int_distribution<int> sd(0, 2 * n);
    std::uniform_int_distribution<long> xd(0, 6);
    std::vector<std::vector<GridPoint>> sets;
    for (int i = 0; i < count; ++i) {
        size_t size = 1 + static_cast<size_t>(i % 3);
        std::vector<GridPoint> pts;
        while (pts.size() < size) {
            GridPoint p{sd(rng), xd(rng)};
            if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(p);
        }
        sets.push_back(pts);
    }
    return sets;
}

Outcome oracle_equivalence()
{
    auto t0 = Clock::now();
    auto models = sweep_models(24);
    std::mt19937_64 rng(7);
    double worst_excess = -1e300, worst_diff = 0.0, worst_bound = 0.0;
    int sets_checked = 0;
    for (const auto& m : models) {
        FiniteKernel K(m);
        KernelHandle h{[&K](GridPoint a, GridPoint b) { return K(a, b); }, "finite"};
        Oracle orc(m, {40});
        for (const auto& pts : random_point_sets(rng, m.n(), 30)) {
            auto o = orc.correlation(pts);
            double diff = std::abs(correlation(h, pts) - o.value);
            double excess = diff - (o.error_bound + 1e-8);
            worst_diff = std::max(worst_diff, diff);
            worst_bound = std::max(worst_bound, o.error_bound);
            worst_excess = std::max(worst_excess, excess);
            ++sets_checked;
        }
    }
    double secs = seconds_since(t0);
    bool ok = worst_excess <= 0.0 && secs < 120.0;
    return {ok, fmt::format("{} models, {} point sets, max |diff| {:.3g}, max tail bound {:.3g}, "
                            "max(|diff| - bound - 1e-8) = {:.3g}, {:.1f} s",
                            models.size(), sets_checked, worst_diff, worst_bound, worst_excess, secs)};
}

Outcome route_triangulation()
{
    auto models = sweep_models(24);
    std::mt19937_64 rng(8);
    double worst_route = 0.0, worst_offdiag = 0.0;
    int equal_checked = 0;
    for (const auto& m : models) {
        std::uniform_int_distribution<int> sd(0, 2 * m.n());
        std::uniform_int_distribution<long> xd(0, 6);
        for (int q = 0; q < 20; ++q) {
            GridPoint p1{sd(rng), xd(rng)}, p2{sd(rng), xd(rng)};
            double g = kernel_general(m, p1, p2);
            worst_route = std::max(worst_route, std::abs(g - em_reference(m, p1, p2)));
            if (m.equal_spacing() && p1.s <= m.n() && p2.s <= m.n()) {
                worst_route = std::max(worst_route, std::abs(g - kernel_equal_spacing(m, p1, p2)));
                ++equal_checked;
            }
        }
        auto d = em_decomposition(m);
        for (int i = 0; i < m.n(); ++i)
            for (int j = 0; j < m.n(); ++j)
                if (i != j) worst_offdiag = std::max(worst_offdiag, std::abs(d.gramm_tilde(i, j)));
    }
    bool ok = worst_route <= 1e-8 && worst_offdiag < 1e-10;
    return {ok, fmt::format("max route disagreement {:.3g} ({} equal-spacing queries), max off-diagonal {:.3g}",
                            worst_route, equal_checked, worst_offdiag)};
}

Outcome structural_exactness()
{
    auto models = sweep_models(24);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> rate(0.2, 0.8);
    double worst_start = 0.0, worst_local = 0.0;
    int rejected = 0, attempts = 0;
    for (const auto& m : models) {
        FiniteKernel K(m);
        for (long x = 0; x <= 10; ++x) {
            bool start = false;
            for (int j = 1; j <= m.n(); ++j) start = start || m.k(j) == x;
            worst_start = std::max(worst_start, std::abs(K({0, x}, {0, x}) - (start ? 1.0 : 0.0)));
        }
        // alpha locality: perturb alpha_j for j > max(s1, s2)
        for (int smax = 0; smax < m.n(); ++smax) {
            auto p = m.params();
            for (int j = smax + 1; j <= m.n(); ++j) p.alpha[static_cast<size_t>(j - 1)] = rate(rng);
            FiniteKernel K2(validate(p));
            for (int s1 = 0; s1 <= smax; ++s1)
                for (int s2 = 0; s2 <= smax; ++s2)
                    for (long x1 = 0; x1 <= 5; ++x1)
                        for (long x2 = 0; x2 <= 5; ++x2)
                            worst_local =
                                std::max(worst_local, std::abs(K({s1, x1}, {s2, x2}) - K2({s1, x1}, {s2, x2})));
        }
        // endpoints: l_N <= N - 1 with strictly increasing nonnegative l leaves
        // only l_j = j - 1, so every perturbation must be rejected
        auto p = m.params();
        p.l.back() += 1;
        ++attempts;
        if (testutil::code_of([&] { validate(p); }) == ErrorCode::EndpointsTooHigh) ++rejected;
    }
    bool ok = worst_start <= 1e-12 && worst_local <= 1e-12 && rejected == attempts;
    return {ok, fmt::format("start line error {:.3g}, alpha-locality error {:.3g}, endpoint perturbations "
                            "rejected {}/{} (l_j = j-1 is the only admissible choice)",
                            worst_start, worst_local, rejected, attempts)};
}

std::string errors_text(const ConvergenceReport& r)
{
    std::string s;
    for (size_t i = 0; i < r.errors.size(); ++i)
        s += fmt::format("{}{}={:.3g}", i ? ", " : "", static_cast<long>(r.values[i]), r.errors[i]);
    return s;
}

Outcome theorem_three()
{
    auto t0 = Clock::now();
    Thm3Config cfg;
    auto r = thm3_convergence(cfg);
    double secs = seconds_since(t0);
    double lof = r.errors.back() / r.errors.front();
    bool ok = r.pass && strictly_decreasing(r.errors) && lof <= 0.5 && secs < 300.0;
    return {ok, fmt::format("N: {}; error(40)/error(10) = {:.3f}; {:.1f} s", errors_text(r), lof, secs)};
}

Outcome proposition_one()
{
    LimitParams lp{1, {0.3, 0.5, 0.2, 0.6, 0.45}};
    double worst = 0.0;
    for (int s1 = 0; s1 <= 5; ++s1)
        for (int s2 = 0; s2 <= 5; ++s2)
            for (long x1 = -4; x1 <= 4; ++x1)
                for (long x2 = -4; x2 <= 4; ++x2)
                    worst = std::max(worst, std::abs(limit_kernel(lp, {s1, x1}, {s2, x2}) -
                                                     extended_sine(std::numbers::pi, lp.gamma, {s1, x1}, {s2, x2})));
    Prop1Config c2;
    auto r2 = prop1_convergence(c2);
    Prop1Config c3;
    c3.k = 3;
    auto r3 = prop1_convergence(c3);
    bool ok = worst <= 1e-9 && strictly_decreasing(r2.errors) && strictly_decreasing(r3.errors);
    return {ok, fmt::format("k=1 identity error {:.3g}; k=2 S: {}; k=3 S: {}", worst, errors_text(r2),
                            errors_text(r3))};
}

Outcome proposition_two()
{
    auto r = prop2_convergence(Prop2Config{});
    double det = 0.0;
    for (const auto& [name, v] : r.extras)
        if (name == "rank_one_det") det = v;
    bool ok = strictly_decreasing(r.errors) && det <= 1e-9;
    return {ok, fmt::format("k: {}; equal-time 2x2 determinant {:.3g}", errors_text(r), det)};
}

Outcome proposition_three()
{
    auto r = prop3_convergence(Prop3Config{});
    double worst_excess = -1e300;
    for (double d : {3.0, 5.0, 10.0})
        for (double e1 = -0.5; e1 <= 0.5; e1 += 0.25)
            for (double e2 = -0.5; e2 <= 0.5; e2 += 0.25) {
                double diff = std::abs(johansson_kernel({d}, e1, e2) - johansson_two_term(d, e1, e2));
                // the tail bound is exact arithmetic; allow for double rounding
                worst_excess = std::max(worst_excess, diff - johansson_two_term_bound(d) - 1e-15);
            }
    bool ok = strictly_decreasing(r.errors) && worst_excess <= 0.0;
    return {ok, fmt::format("k: {}; two-term max(|diff| - tail bound) at d >= 3: {:.3g}", errors_text(r),
                            worst_excess)};
}

Outcome mean_density()
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> g(0.0, 0.95);
    double worst_mean = 0.0, worst_period = 0.0;
    for (int k = 1; k <= 5; ++k)
        for (int s = 0; s <= 6; ++s) {
            LimitParams lp{k, {}};
            for (int r = 0; r < 6; ++r) lp.gamma.push_back(g(rng));
            EqualTimeLimitTable t(lp, s);
            for (long start = -3; start <= 3; ++start) {
                double sum = 0.0;
                for (long x = start; x < start + k; ++x) {
                    sum += t(x, x);
                    worst_period = std::max(worst_period, std::abs(t(x, x) - t(x + k, x + k)));
                }
                worst_mean = std::max(worst_mean, std::abs(sum / k - 1.0 / k));
            }
        }
    bool ok = worst_mean <= 1e-10 && worst_period <= 1e-10;
    return {ok, fmt::format("k <= 5, s <= 6: mean error {:.3g}, periodicity error {:.3g}", worst_mean, worst_period)};
}

Outcome figures()
{
    DensityFigureConfig f5;
    auto a = density_figure(f5);
    DensityFigureConfig f6;
    f6.k = 5;
    f6.n = 40;
    f6.s_list = {1, 5};
    auto b = density_figure(f6);
    std::string periods;
    for (const auto& v : a.verdicts) periods += fmt::format(" {}", v.detected_period);
    periods += " |";
    for (const auto& v : b.verdicts) periods += fmt::format(" {}", v.detected_period);
    return {a.pass && b.pass, fmt::format("detected periods (k=2 recipe | k=5 recipe):{}", periods)};
}

Outcome variance()
{
    auto r = variance_saturation(VarianceConfig{});
    double worst_s1 = 0.0;
    for (const auto& row : r.rows)
        if (row.s == 1) worst_s1 = std::max(worst_s1, row.variance);
    std::string sine;
    if (!r.sine_rows.empty())
        sine = fmt::format("{:.3f} -> {:.3f}", r.sine_rows.front().variance, r.sine_rows.back().variance);
    return {r.pass, fmt::format("max s=1 variance {:.3f}; saturated={}, sine control {} grows={}", worst_s1,
                                r.saturated, sine, r.sine_grows)};
}

Outcome tiling_bijection()
{
    std::vector<double> a{0.45, 0.3}, b{0.6, 0.35};
    auto m = testutil::model({0, 2}, a, b);
    TilingWeightSpec spec{a, b};
    auto base = staircase_config({0, 2});
    double w0 = tiling_weight(paths_to_tiling(base, 8), spec), p0 = path_weight(m, base);
    int count = 0, bad_trip = 0;
    double worst_ratio = 0.0;
    for (long a1 = 0; a1 <= 4; ++a1)
        for (long a2 = a1; a2 <= 4; ++a2)
            for (long a3 = 0; a3 <= a2; ++a3)
                for (long b1 = 2; b1 <= 4; ++b1)
                    for (long b2 = b1; b2 <= 4; ++b2)
                        for (long b3 = 1; b3 <= b2; ++b3) {
                            PathConfig c{{{0, a1, a2, a3, 0}, {2, b1, b2, b3, 1}}};
                            if (!is_valid_config(m, c)) continue;
                            ++count;
                            auto t = paths_to_tiling(c, 8);
                            if (!(tiling_to_paths(t) == c) || !covers_domain(t)) ++bad_trip;
                            double rt = tiling_weight(t, spec) / w0, rp = path_weight(m, c) / p0;
                            worst_ratio = std::max(worst_ratio, std::abs(rt - rp) / std::max(1.0, rp));
                        }

    const double q = 0.6;
    auto mq = testutil::model({0, 1, 3}, {0.5, 0.5, 0.5}, {0.5, 0.5, 0.5});
    Oracle o(mq, {12});
    auto qs = TilingWeightSpec::from_q(3, q);
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> jd(0, 2), sd(1, 5);
    int boxes = 0;
    double worst_q = 0.0;
    for (std::uint64_t idx = 0; boxes < 50; ++idx) {
        auto c = o.sample_one(99, idx);
        auto up = c;
        up.heights[static_cast<size_t>(jd(rng))][static_cast<size_t>(sd(rng))] += 1;
        if (!is_valid_config(mq, up)) continue;
        double ratio = std::exp(tiling_log_weight(paths_to_tiling(up, 20), qs) -
                                tiling_log_weight(paths_to_tiling(c, 20), qs));
        worst_q = std::max(worst_q, std::abs(ratio - q));
        ++boxes;
    }
    bool ok = bad_trip == 0 && worst_ratio <= 1e-10 && worst_q <= 1e-10;
    return {ok, fmt::format("{} configurations, {} round-trip failures, ratio error {:.3g}; {} box additions, "
                            "max |ratio - q| {:.3g}",
                            count, bad_trip, worst_ratio, boxes, worst_q)};
}

std::string capture(const std::string& args, int& code)
{
    std::string cmd = std::string(NIPATHS_CLI) + " " + args + " 2>&1";
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) {
        code = -1;
        return out;
    }
    std::array<char, 4096> buf{};
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), got);
    int status = pclose(p);
    code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

Outcome determinism()
{
    const std::string model = std::string(NIPATHS_TEST_DATA) + "/two_walkers.json";
    std::vector<std::string> commands{
        "kernel --model " + model + " --query 1,0,1,2 --query 3,1,2,4",
        "sample --model " + model + " --count 20",
        "converge prop2 --k-list 5,10",
        "density --kernel limit --k 3 --gamma 0.3,0.6 --s 2 --x-range -5:5",
        "tile render --staircase --starts 0,2,4 --format svg --overlay",
    };
    int identical = 0;
    for (const auto& c : commands) {
        int c1 = 0, c2 = 0, c3 = 0;
        auto a = capture(c, c1), b = capture(c, c2), t = capture("--threads 3 " + c, c3);
        if (c1 == 0 && c2 == 0 && c3 == 0 && a == b && a == t && !a.empty()) ++identical;
    }
    auto m = testutil::model({0, 2}, {0.4, 0.6}, {0.35, 0.55});
    Oracle o(m, {30});
    auto s1 = o.sample(2024, 50), s2 = o.sample(2024, 50);
    bool same = s1 == s2 && o.sample_one(2024, 37) == s1[37];
    bool ok = identical == static_cast<int>(commands.size()) && same;
    return {ok, fmt::format("{}/{} CLI commands byte-identical across runs and thread counts; seeded samples {}",
                            identical, commands.size(), same ? "reproducible" : "differ")};
}

}  // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> criteria{
        {1, "oracle equivalence", oracle_equivalence},
        {2, "route triangulation", route_triangulation},
        {3, "structural exactness", structural_exactness},
        {4, "finite-N convergence to the limit kernel", theorem_three},
        {5, "k=1 sine identity and shifted-kernel convergence", proposition_one},
        {6, "single-walker limit and rank one", proposition_two},
        {7, "saturating kernel limit and two-term approximation", proposition_three},
        {8, "mean density and periodicity", mean_density},
        {9, "density figure periodicity", figures},
        {10, "number variance saturation", variance},
        {11, "tiling bijection and q-volume", tiling_bijection},
        {12, "determinism", determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << fmt::format("[{}] {:2d} {}: {} ({:.1f} s)", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail,
                                 seconds_since(t0))
                  << std::endl;
        failed += o.pass ? 0 : 1;
    }
    std::cout << fmt::format("{} of {} criteria passed", criteria.size() - failed, criteria.size()) << std::endl;
    return failed == 0 ? 0 : 1;
}
