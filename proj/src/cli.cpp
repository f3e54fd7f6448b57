#include "nipaths/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "nipaths/dpp_stats.hpp"
#include "nipaths/error.hpp"
#include "nipaths/harness.hpp"
#include "nipaths/io.hpp"
#include "nipaths/kernel_finite.hpp"
#include "nipaths/kernel_limit.hpp"
#include "nipaths/oracle.hpp"
#include "nipaths/tiling.hpp"

namespace nipaths::cli {

namespace {

using io::fmt17;
using io::json;

struct VerdictFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

double to_double(const std::string& s)
{
    try {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidParams, "not a number: '" + s + "'");
    }
}

long to_long(const std::string& s)
{
    try {
        size_t used = 0;
        const long v = std::stol(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidParams, "not an integer: '" + s + "'");
    }
}

std::vector<double> number_list(const std::string& s)
{
    std::vector<double> out;
    if (s.empty())
        return out;
    for (const auto& t : split(s, ','))
        out.push_back(to_double(t));
    return out;
}

std::pair<long, long> range(const std::string& s)
{
    const auto parts = split(s, ':');
    if (parts.size() != 2)
        throw Error(ErrorCode::InvalidParams, "range must look like lo:hi");
    return {to_long(parts[0]), to_long(parts[1])};
}

GridPoint point(const std::string& s)
{
    const auto parts = split(s, ',');
    if (parts.size() != 2)
        throw Error(ErrorCode::InvalidParams, "point must look like s,x");
    return {static_cast<int>(to_long(parts[0])), to_long(parts[1])};
}

// Shared kernel selection flags.
struct KernelOpts {
    std::string model_path;
    std::string selector;
    std::string route = "auto";
    int k = 1;
    std::string gamma;
    double c = std::numbers::pi;
    double d = 1.0;
    double tol = 1e-12;
    json model_json;

    void add(CLI::App* app)
    {
        app->add_option("--model", model_path, "model JSON file");
        app->add_option("--kernel", selector,
                        "finite | finite-general | finite-equal | limit | sine-ext | continuous | johansson");
        app->add_option("--route", route, "finite route: auto, general, general-full, equal-distinct, "
                                          "equal-quadrature, equal-confluent, eynard-mehta");
        app->add_option("--k", k, "spacing for limit kernels");
        app->add_option("--gamma", gamma, "comma separated gamma_1, gamma_2, ...; the last value repeats");
        app->add_option("--c", c, "sine kernel parameter in (0, pi]");
        app->add_option("--d", d, "saturation parameter d > 0");
        app->add_option("--tol", tol, "quadrature tolerance");
    }

    // Values in the model file fill in flags that were not given.
    void load(const CLI::App* app)
    {
        if (model_path.empty())
            return;
        model_json = io::read_json_file(model_path);
        if (selector.empty() && model_json.contains("kernel"))
            selector = model_json.at("kernel").get<std::string>();
        if (app->count("--tol") == 0 && model_json.contains("tol"))
            tol = model_json.at("tol").get<double>();
    }

    ValidatedModel model() const
    {
        if (model_path.empty())
            throw Error(ErrorCode::InvalidParams, "--model is required for finite kernels");
        return validate(io::model_from_json(model_json));
    }

    std::vector<double> gammas(int needed) const
    {
        auto g = number_list(gamma);
        if (g.empty()) {
            if (needed > 0)
                throw Error(ErrorCode::InvalidParams, "--gamma is required");
            return g;
        }
        while (static_cast<int>(g.size()) < needed)
            g.push_back(g.back());
        return g;
    }

    bool finite() const { return selector.empty() || selector.rfind("finite", 0) == 0; }

    KernelHandle handle(int max_s) const
    {
        if (finite()) {
            FiniteRoute r = route_from_name(route);
            if (selector == "finite-general")
                r = FiniteRoute::General;
            const auto m = model();
            if (selector == "finite-equal")
                r = m.equal_beta() ? FiniteRoute::EqualConfluent : FiniteRoute::EqualDistinct;
            auto kernel = std::make_shared<FiniteKernel>(m, r, tol);
            return {[kernel](GridPoint a, GridPoint b) { return kernel->evaluate(a, b).value; },
                    std::string("finite/") + route_name(kernel->route())};
        }
        if (selector == "limit") {
            LimitParams lp{k, gammas(max_s), tol};
            validate_limit(lp);
            return {[lp](GridPoint a, GridPoint b) { return limit_kernel(lp, a, b); }, "limit"};
        }
        if (selector == "sine-ext") {
            const auto g = gammas(0).empty() ? std::vector<double>(static_cast<size_t>(max_s), 0.0) : gammas(max_s);
            return {[g, c = c, tol = tol](GridPoint a, GridPoint b) { return extended_sine(c, g, a, b, tol); },
                    "sine-ext"};
        }
        throw Error(ErrorCode::InvalidParams, "kernel '" + selector + "' is not available for this command");
    }
};

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows)
{
    std::string out;
    for (size_t i = 0; i < header.size(); ++i)
        out += (i ? "," : "") + header[i];
    out += '\n';
    for (const auto& r : rows) {
        for (size_t i = 0; i < r.size(); ++i)
            out += (i ? "," : "") + r[i];
        out += '\n';
    }
    return out;
}

json report_json(const ConvergenceReport& r)
{
    json extras = json::object();
    for (const auto& [k, v] : r.extras)
        extras[k] = v;
    return json{{"experiment", r.experiment}, {"parameter", r.parameter}, {"values", r.values},
                {"errors", r.errors},         {"ratios", r.ratios},       {"pass", r.pass},
                {"rule", r.rule},             {"extras", extras}};
}

std::string report_csv(const ConvergenceReport& r)
{
    std::vector<std::vector<std::string>> rows;
    for (size_t i = 0; i < r.values.size(); ++i)
        rows.push_back({fmt17(r.values[i]), fmt17(r.errors[i]), i ? fmt17(r.ratios[i - 1]) : ""});
    return csv({r.parameter, "error", "ratio"}, rows);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

int run(int argc, char** argv)
{
    CLI::App app{"Nonintersecting geometric walks: kernels, statistics, oracle and tilings"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand
    int threads = 1;
    app.add_option("--threads", threads, "upper bound on worker threads (outputs do not depend on it)")
        ->check(CLI::PositiveNumber);

    std::string out_path;
    std::function<void()> action;

    // validate
    auto* cmd_validate = app.add_subcommand("validate", "check a model file");
    std::string validate_model;
    cmd_validate->add_option("--model", validate_model, "model JSON file")->required();
    cmd_validate->callback([&] {
        action = [&] {
            const auto m = validate(io::model_from_json(io::read_json_file(validate_model)));
            json j{{"valid", true},
                   {"n", m.n()},
                   {"distinct_beta", m.distinct_beta()},
                   {"equal_beta", m.equal_beta()},
                   {"equal_spacing", m.equal_spacing() ? json(*m.equal_spacing()) : json(nullptr)},
                   {"default_route", route_name(default_route(m))}};
            io::write_text("", dump(j));
        };
    });

    // kernel
    auto* cmd_kernel = app.add_subcommand("kernel", "evaluate kernel values");
    KernelOpts kopt;
    kopt.add(cmd_kernel);
    std::vector<std::string> queries;
    cmd_kernel->add_option("--query", queries,
                           "s1,x1,s2,x2 (continuous: sigma1,x1,sigma2,x2; johansson: eta1,eta2); repeatable");
    cmd_kernel->add_option("--out", out_path, "output CSV (default stdout)");
    cmd_kernel->callback([&] {
        action = [&] {
            kopt.load(cmd_kernel);
            std::vector<std::vector<double>> qs;
            for (const auto& q : queries)
                qs.push_back(number_list(q));
            if (qs.empty() && kopt.model_json.contains("query")) {
                for (const auto& q : kopt.model_json.at("query"))
                    qs.push_back(q.get<std::vector<double>>());
            }
            if (qs.empty())
                throw Error(ErrorCode::InvalidParams, "no --query given");
            std::sort(qs.begin(), qs.end());
            std::vector<std::vector<std::string>> rows;
            if (kopt.selector == "johansson") {
                for (const auto& q : qs) {
                    if (q.size() != 2)
                        throw Error(ErrorCode::InvalidParams, "johansson queries are eta1,eta2");
                    rows.push_back({fmt17(q[0]), fmt17(q[1]), fmt17(johansson_kernel({kopt.d}, q[0], q[1]))});
                }
                io::write_text(out_path, csv({"eta1", "eta2", "value"}, rows));
                return;
            }
            for (const auto& q : qs) {
                if (q.size() != 4)
                    throw Error(ErrorCode::InvalidParams, "queries are s1,x1,s2,x2");
            }
            if (kopt.selector == "continuous") {
                for (const auto& q : qs) {
                    const double v = continuous_limit_kernel(kopt.k, q[0], q[2], std::lround(q[1]), std::lround(q[3]), kopt.tol);
                    rows.push_back({fmt17(q[0]), fmt17(q[1]), fmt17(q[2]), fmt17(q[3]), fmt17(v)});
                }
                io::write_text(out_path, csv({"sigma1", "x1", "sigma2", "x2", "value"}, rows));
                return;
            }
            int max_s = 0;
            for (const auto& q : qs)
                max_s = std::max({max_s, static_cast<int>(q[0]), static_cast<int>(q[2])});
            const auto kh = kopt.handle(max_s);
            for (const auto& q : qs) {
                const GridPoint a{static_cast<int>(q[0]), std::lround(q[1])};
                const GridPoint b{static_cast<int>(q[2]), std::lround(q[3])};
                rows.push_back({std::to_string(a.s), std::to_string(a.x), std::to_string(b.s), std::to_string(b.x),
                                fmt17(kh(a, b))});
            }
            io::write_text(out_path, csv({"s1", "x1", "s2", "x2", "value"}, rows));
        };
    });

    // density
    auto* cmd_density = app.add_subcommand("density", "diagonal of a kernel on one line");
    KernelOpts dopt;
    dopt.add(cmd_density);
    int dens_s = 0;
    std::string dens_range = "0:10";
    cmd_density->add_option("--s", dens_s, "line")->required();
    cmd_density->add_option("--x-range", dens_range, "lo:hi inclusive");
    cmd_density->add_option("--out", out_path, "output CSV (default stdout)");
    cmd_density->callback([&] {
        action = [&] {
            dopt.load(cmd_density);
            const auto [lo, hi] = range(dens_range);
            const auto kh = dopt.handle(dens_s);
            std::vector<std::vector<std::string>> rows;
            for (const auto& [x, v] : density_profile(kh, dens_s, lo, hi, threads))
                rows.push_back({std::to_string(dens_s), std::to_string(x), fmt17(v)});
            io::write_text(out_path, csv({"s", "x", "rho"}, rows));
        };
    });

    // correlation
    auto* cmd_corr = app.add_subcommand("correlation", "determinantal correlation of a point set");
    KernelOpts copt;
    copt.add(cmd_corr);
    std::vector<std::string> corr_points;
    cmd_corr->add_option("--point", corr_points, "s,x; repeatable")->required();
    cmd_corr->add_option("--out", out_path, "output CSV (default stdout)");
    cmd_corr->callback([&] {
        action = [&] {
            copt.load(cmd_corr);
            std::vector<GridPoint> pts;
            int max_s = 0;
            for (const auto& p : corr_points) {
                pts.push_back(point(p));
                max_s = std::max(max_s, pts.back().s);
            }
            const double v = correlation(copt.handle(max_s), pts);
            std::string label;
            for (const auto& p : pts)
                label += (label.empty() ? "" : ";") + fmt::format("{}:{}", p.s, p.x);
            io::write_text(out_path, csv({"points", "value"}, {{label, fmt17(v)}}));
        };
    });

    // variance
    auto* cmd_var = app.add_subcommand("variance", "number variance of [center, center + 2L] on one line");
    KernelOpts vopt;
    vopt.add(cmd_var);
    int var_s = 1;
    long var_center = 0;
    std::string var_ls = "10,20,30,40,50";
    cmd_var->add_option("--s", var_s, "line");
    cmd_var->add_option("--center", var_center, "left end of the intervals");
    cmd_var->add_option("--L", var_ls, "comma separated half widths");
    cmd_var->add_option("--out", out_path, "output CSV (default stdout)");
    cmd_var->callback([&] {
        action = [&] {
            vopt.load(cmd_var);
            KernelHandle kh;
            std::shared_ptr<EqualTimeLimitTable> table;
            if (vopt.selector == "limit") {
                table = std::make_shared<EqualTimeLimitTable>(LimitParams{vopt.k, vopt.gammas(var_s), vopt.tol}, var_s);
                kh = {[table](GridPoint a, GridPoint b) { return (*table)(a.x, b.x); }, "limit"};
            } else {
                kh = vopt.handle(var_s);
            }
            std::vector<std::vector<std::string>> rows;
            for (double l : number_list(var_ls)) {
                const long half = std::lround(l);
                rows.push_back({std::to_string(half), fmt17(number_variance(kh, {var_s, var_center, var_center + 2 * half}, threads))});
            }
            io::write_text(out_path, csv({"L", "variance"}, rows));
        };
    });

    // sample
    auto* cmd_sample = app.add_subcommand("sample", "exact samples from the truncated path measure");
    std::string sample_model;
    int sample_m = 40, sample_count = 1;
    std::optional<std::uint64_t> sample_seed;
    cmd_sample->add_option("--model", sample_model, "model JSON file")->required();
    cmd_sample->add_option("--max-height", sample_m, "truncation height M");
    cmd_sample->add_option("--seed", sample_seed, "seed (or \"seed\" in the model file)");
    cmd_sample->add_option("--count", sample_count, "number of samples")->check(CLI::NonNegativeNumber);
    cmd_sample->add_option("--out", out_path, "output JSON lines (default stdout)");
    cmd_sample->callback([&] {
        action = [&] {
            const auto j = io::read_json_file(sample_model);
            std::uint64_t seed = 0;
            if (sample_seed)
                seed = *sample_seed;
            else if (j.contains("seed"))
                seed = j.at("seed").get<std::uint64_t>();
            const Oracle oracle(validate(io::model_from_json(j)), {sample_m});
            std::string text;
            for (int i = 0; i < sample_count; ++i) {
                auto line = io::config_to_json(oracle.sample_one(seed, static_cast<std::uint64_t>(i)));
                line["seed"] = seed;
                line["index"] = i;
                text += line.dump() + "\n";
            }
            io::write_text(out_path, text);
        };
    });

    // tile
    auto* cmd_tile = app.add_subcommand("tile", "lozenge tilings");
    cmd_tile->require_subcommand(1);
    auto* cmd_convert = cmd_tile->add_subcommand("convert", "paths to tiling JSON or back");
    std::string tile_config, tile_tiling, render_format = "svg";
    bool staircase = false, overlay = false;
    std::string staircase_k;
    cmd_convert->add_option("--config", tile_config, "path configuration JSON ({\"heights\": ...})");
    cmd_convert->add_option("--tiling", tile_tiling, "tiling JSON");
    cmd_convert->add_option("--out", out_path, "output JSON (default stdout)");
    cmd_convert->callback([&] {
        action = [&] {
            if (tile_config.empty() == tile_tiling.empty())
                throw Error(ErrorCode::InvalidParams, "give exactly one of --config and --tiling");
            if (!tile_config.empty()) {
                const auto t = paths_to_tiling(io::config_from_json(io::read_json_file(tile_config)));
                io::write_text(out_path, dump(io::tiling_to_json(t)));
            } else {
                const auto c = tiling_to_paths(io::tiling_from_json(io::read_json_file(tile_tiling)));
                io::write_text(out_path, dump(io::config_to_json(c)));
            }
        };
    });
    auto* cmd_render = cmd_tile->add_subcommand("render", "draw a tiling");
    cmd_render->add_option("--config", tile_config, "path configuration JSON");
    cmd_render->add_option("--tiling", tile_tiling, "tiling JSON");
    cmd_render->add_flag("--staircase", staircase, "render the staircase configuration for --starts");
    cmd_render->add_option("--starts", staircase_k, "comma separated starting heights k_j");
    cmd_render->add_option("--format", render_format, "svg or ascii")->check(CLI::IsMember({"svg", "ascii"}));
    cmd_render->add_flag("--overlay", overlay, "draw the paths over the tiling");
    cmd_render->add_option("--out", out_path, "output file (default stdout)");
    cmd_render->callback([&] {
        action = [&] {
            Tiling t;
            if (staircase) {
                std::vector<int> k;
                for (double v : number_list(staircase_k))
                    k.push_back(static_cast<int>(v));
                if (k.empty())
                    throw Error(ErrorCode::InvalidParams, "--staircase needs --starts");
                t = paths_to_tiling(staircase_config(k));
            } else if (!tile_config.empty()) {
                t = paths_to_tiling(io::config_from_json(io::read_json_file(tile_config)));
            } else if (!tile_tiling.empty()) {
                t = io::tiling_from_json(io::read_json_file(tile_tiling));
                tiling_to_paths(t);
            } else {
                throw Error(ErrorCode::InvalidParams, "give --config, --tiling or --staircase");
            }
            io::write_text(out_path, render_format == "svg" ? render_svg(t, {overlay}) : render_ascii(t));
        };
    });

    // oracle-check
    auto* cmd_oracle = app.add_subcommand("oracle-check", "compare kernel correlations with the transfer-matrix oracle");
    std::string oracle_model, oracle_route = "auto";
    int oracle_m = 40, oracle_max_x = 6;
    std::vector<std::string> oracle_sets;
    cmd_oracle->add_option("--model", oracle_model, "model JSON file")->required();
    cmd_oracle->add_option("--route", oracle_route, "finite route");
    cmd_oracle->add_option("--max-height", oracle_m, "truncation height M");
    cmd_oracle->add_option("--set", oracle_sets, "point set s,x;s,x;...; repeatable (default: all single points)");
    cmd_oracle->add_option("--max-x", oracle_max_x, "largest height in the default sweep");
    cmd_oracle->add_option("--out", out_path, "output CSV (default stdout)");
    cmd_oracle->callback([&] {
        action = [&] {
            const auto m = validate(io::model_from_json(io::read_json_file(oracle_model)));
            const FiniteKernel kernel(m, route_from_name(oracle_route));
            const Oracle oracle(m, {oracle_m});
            const KernelHandle kh{[&](GridPoint a, GridPoint b) { return kernel(a, b); }, "finite"};
            std::vector<std::vector<GridPoint>> sets;
            for (const auto& s : oracle_sets) {
                std::vector<GridPoint> pts;
                for (const auto& p : split(s, ';'))
                    pts.push_back(point(p));
                sets.push_back(pts);
            }
            if (sets.empty()) {
                for (int s = 0; s <= 2 * m.n(); ++s)
                    for (long x = 0; x <= oracle_max_x; ++x)
                        sets.push_back({{s, x}});
            }
            bool ok = true;
            std::vector<std::vector<std::string>> rows;
            for (const auto& pts : sets) {
                const double det = correlation(kh, pts);
                const auto ref = oracle.correlation(pts);
                const double diff = std::fabs(det - ref.value);
                const bool pass = diff <= ref.error_bound + 1e-8;
                ok = ok && pass;
                std::string label;
                for (const auto& p : pts)
                    label += (label.empty() ? "" : ";") + fmt::format("{}:{}", p.s, p.x);
                rows.push_back({label, fmt17(det), fmt17(ref.value), fmt17(diff), fmt17(ref.error_bound), pass ? "1" : "0"});
            }
            io::write_text(out_path, csv({"points", "kernel", "oracle", "difference", "tail_bound", "pass"}, rows));
            if (!ok)
                throw VerdictFailure("kernel and oracle disagree beyond the tail bound");
        };
    });

    // converge
    auto* cmd_conv = app.add_subcommand("converge", "convergence experiments and figure recipes");
    cmd_conv->require_subcommand(1);
    std::string csv_path;
    const auto emit = [&](const ConvergenceReport& r) {
        io::write_text(out_path, dump(report_json(r)));
        if (!csv_path.empty())
            io::write_text(csv_path, report_csv(r));
        if (!r.pass)
            throw VerdictFailure(r.experiment + " verdict failed: " + r.rule);
    };
    const auto common = [&](CLI::App* a) {
        a->add_option("--out", out_path, "report JSON (default stdout)");
        a->add_option("--csv", csv_path, "also write a CSV table");
    };

    Thm3Config thm3;
    std::string thm3_ns = "10,20,40";
    auto* c_thm3 = cmd_conv->add_subcommand("thm3", "finite N kernel against the limit kernel");
    c_thm3->add_option("--k", thm3.k, "spacing");
    c_thm3->add_option("--xi", thm3.xi, "relative height in (0, 1)");
    c_thm3->add_option("--alpha", thm3.alpha, "common alpha");
    c_thm3->add_option("--beta", thm3.beta, "common beta");
    c_thm3->add_option("--s-max", thm3.s_max, "largest line in the window");
    c_thm3->add_option("--x-radius", thm3.x_radius, "window half width (default 2k)");
    c_thm3->add_option("--N", thm3_ns, "comma separated N values");
    c_thm3->add_option("--ratio-bound", thm3.ratio_bound, "bound on last/first error (<= 0 disables)");
    common(c_thm3);
    c_thm3->callback([&] {
        action = [&] {
            thm3.n_list.clear();
            for (double v : number_list(thm3_ns))
                thm3.n_list.push_back(static_cast<int>(v));
            thm3.threads = threads;
            emit(thm3_convergence(thm3));
        };
    });

    Prop1Config p1;
    std::string p1_s = "8,16,32,64", p1_prefix = "0.3,0.5,0.2";
    auto* c_p1 = cmd_conv->add_subcommand("prop1", "shifted limit kernel against the extended sine kernel");
    c_p1->add_option("--k", p1.k, "spacing");
    c_p1->add_option("--gamma-bulk", p1.gamma_bulk, "gamma repeated S times");
    c_p1->add_option("--gamma", p1_prefix, "comma separated gamma prefix after the bulk");
    c_p1->add_option("--S", p1_s, "comma separated S values");
    c_p1->add_option("--ratio-lo", p1.ratio_lo, "lower bound on error ratios");
    c_p1->add_option("--ratio-hi", p1.ratio_hi, "upper bound on error ratios (<= 0 disables)");
    common(c_p1);
    c_p1->callback([&] {
        action = [&] {
            p1.s_list.clear();
            for (double v : number_list(p1_s))
                p1.s_list.push_back(static_cast<int>(v));
            p1.gamma_prefix = number_list(p1_prefix);
            p1.s_max = std::min<int>(p1.s_max, static_cast<int>(p1.gamma_prefix.size()));
            p1.threads = threads;
            emit(prop1_convergence(p1));
        };
    });

    Prop2Config p2;
    std::string p2_k = "5,10,20,40", p2_gamma = "0.4";
    auto* c_p2 = cmd_conv->add_subcommand("prop2", "conjugated limit kernel against one geometric walker");
    c_p2->add_option("--gamma", p2_gamma, "comma separated gammas; the last value repeats");
    c_p2->add_option("--k-list", p2_k, "comma separated k values");
    common(c_p2);
    c_p2->callback([&] {
        action = [&] {
            p2.k_list.clear();
            for (double v : number_list(p2_k))
                p2.k_list.push_back(static_cast<int>(v));
            p2.gamma = number_list(p2_gamma);
            if (p2.gamma.empty())
                throw Error(ErrorCode::InvalidParams, "--gamma is empty");
            while (static_cast<int>(p2.gamma.size()) < p2.s_max)
                p2.gamma.push_back(p2.gamma.back());
            p2.threads = threads;
            emit(prop2_convergence(p2));
        };
    });

    Prop3Config p3;
    std::string p3_k = "8,16,32", p3_eta = "-0.5,-0.25,0,0.25,0.5";
    auto* c_p3 = cmd_conv->add_subcommand("prop3", "scaled limit kernel against the saturating kernel");
    c_p3->add_option("--gamma", p3.gamma, "common gamma");
    c_p3->add_option("--sigma", p3.sigma, "time scale; sigma k^2 must be an integer");
    c_p3->add_option("--eta", p3_eta, "comma separated eta values");
    c_p3->add_option("--k-list", p3_k, "comma separated k values");
    common(c_p3);
    c_p3->callback([&] {
        action = [&] {
            p3.k_list.clear();
            for (double v : number_list(p3_k))
                p3.k_list.push_back(static_cast<int>(v));
            p3.etas = number_list(p3_eta);
            p3.threads = threads;
            emit(prop3_convergence(p3));
        };
    });

    VarianceConfig vc;
    std::string vc_gamma = "0.4", vc_s = "1,2,3", vc_l = "10,20,30,40,50";
    auto* c_var = cmd_conv->add_subcommand("variance", "number variance saturation with a sine kernel control");
    c_var->add_option("--k", vc.k, "spacing");
    c_var->add_option("--gamma", vc_gamma, "comma separated gammas; the last value repeats");
    c_var->add_option("--s", vc_s, "comma separated lines");
    c_var->add_option("--L", vc_l, "comma separated half widths");
    common(c_var);
    c_var->callback([&] {
        action = [&] {
            vc.s_list.clear();
            vc.l_list.clear();
            for (double v : number_list(vc_s))
                vc.s_list.push_back(static_cast<int>(v));
            for (double v : number_list(vc_l))
                vc.l_list.push_back(std::lround(v));
            vc.gamma = number_list(vc_gamma);
            if (vc.gamma.empty())
                throw Error(ErrorCode::InvalidParams, "--gamma is empty");
            const int need = *std::max_element(vc.s_list.begin(), vc.s_list.end());
            while (static_cast<int>(vc.gamma.size()) < need)
                vc.gamma.push_back(vc.gamma.back());
            vc.threads = threads;
            const auto rep = variance_saturation(vc);
            json rows = json::array();
            std::vector<std::vector<std::string>> table;
            for (const auto& r : rep.rows) {
                rows.push_back(json{{"s", r.s}, {"L", r.half_width}, {"variance", r.variance}});
                table.push_back({"limit", std::to_string(r.s), std::to_string(r.half_width), fmt17(r.variance)});
            }
            json sine = json::array();
            for (const auto& r : rep.sine_rows) {
                sine.push_back(json{{"L", r.half_width}, {"variance", r.variance}});
                table.push_back({"sine", "", std::to_string(r.half_width), fmt17(r.variance)});
            }
            io::write_text(out_path, dump(json{{"experiment", "variance"}, {"rows", rows}, {"sine_control", sine},
                                               {"saturated", rep.saturated}, {"sine_grows", rep.sine_grows},
                                               {"pass", rep.pass}, {"notes", rep.notes}}));
            if (!csv_path.empty())
                io::write_text(csv_path, csv({"kernel", "s", "L", "variance"}, table));
            if (!rep.pass)
                throw VerdictFailure("variance saturation verdict failed");
        };
    });

    const auto figure = [&](const std::string name, DensityFigureConfig defaults) {
        auto* c = cmd_conv->add_subcommand(name, "density figure recipe");
        auto cfg = std::make_shared<DensityFigureConfig>(defaults);
        auto s_text = std::make_shared<std::string>();
        for (int s : defaults.s_list)
            *s_text += (s_text->empty() ? "" : ",") + std::to_string(s);
        c->add_option("--k", cfg->k, "spacing");
        c->add_option("--alpha", cfg->alpha, "common alpha");
        c->add_option("--beta", cfg->beta, "common beta");
        c->add_option("--N", cfg->n, "number of walkers (xi = j / N)");
        c->add_option("--s", *s_text, "comma separated lines");
        common(c);
        c->callback([&, cfg, s_text, name] {
            action = [&, cfg, s_text, name] {
                cfg->s_list.clear();
                for (double v : number_list(*s_text))
                    cfg->s_list.push_back(static_cast<int>(v));
                cfg->threads = threads;
                const auto fig = density_figure(*cfg);
                std::vector<std::vector<std::string>> table;
                for (const auto& r : fig.rows)
                    table.push_back({std::to_string(r.s), std::to_string(r.block), std::to_string(r.x),
                                     std::to_string(r.axis), fmt17(r.xi), fmt17(r.gamma), fmt17(r.density)});
                if (!csv_path.empty())
                    io::write_text(csv_path, csv({"s", "block", "x", "axis", "xi", "gamma", "density"}, table));
                json verdicts = json::array();
                for (const auto& v : fig.verdicts)
                    verdicts.push_back(json{{"s", v.s}, {"period", v.detected_period}, {"score", v.score},
                                            {"amplitude_variation", v.amplitude_variation}, {"pass", v.pass}});
                io::write_text(out_path, dump(json{{"experiment", name}, {"skipped_blocks", fig.skipped_blocks},
                                                   {"verdicts", verdicts}, {"pass", fig.pass}}));
                if (!fig.pass)
                    throw VerdictFailure(name + " periodicity verdict failed");
            };
        });
    };
    figure("density-k2", DensityFigureConfig{2, 2.0 / 3.0, 2.0 / 3.0, 50, {1, 3, 5, 7}, 1});
    figure("density-k5", DensityFigureConfig{5, 2.0 / 3.0, 2.0 / 3.0, 40, {1, 5}, 1});

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_validation;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_numerical(e.code()) ? exit_numerical : exit_validation;
    }
    try {
        if (action)
            action();
    } catch (const VerdictFailure& e) {
        std::cerr << "verdict: " << e.what() << "\n";
        return exit_verdict;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_numerical(e.code()) ? exit_numerical : exit_validation;
    } catch (const io::json::exception& e) {
        std::cerr << "error: InvalidParams: " << e.what() << "\n";
        return exit_validation;
    }
    return exit_ok;
}

}  // namespace nipaths::cli
