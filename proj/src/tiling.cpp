#include "nipaths/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <map>
#include <sstream>

#include "nipaths/error.hpp"

namespace nipaths {

namespace {

// Model used only for the structural checks; the rates are irrelevant.
ValidatedModel structural_model(const std::vector<int>& k)
{
    const int n = static_cast<int>(k.size());
    ModelParams p;
    p.n = n;
    p.k = k;
    for (int j = 0; j < n; ++j)
        p.l.push_back(j);
    p.alpha.assign(static_cast<size_t>(n), 0.5);
    p.beta.assign(static_cast<size_t>(n), 0.5);
    return validate(p);
}

// Grid of U-triangle owners, strips 0..2N-1, rows 0..height.
struct Grid {
    int n;
    long height;
    std::vector<std::vector<int>> owner;  // -1 unset, otherwise LozengeType

    Grid(int n_, long h) : n(n_), height(h), owner(static_cast<size_t>(2 * n_), std::vector<int>(static_cast<size_t>(h + 1), -1)) {}

    void set(int c, long r, LozengeType t)
    {
        if (r < 0 || r > height)
            return;
        auto& cell = owner[static_cast<size_t>(c)][static_cast<size_t>(r)];
        if (cell != -1)
            throw Error(ErrorCode::InconsistentTiling, fmt::format("triangle U({}, {}) covered twice", c, r));
        cell = static_cast<int>(t);
    }
};

// Height of walker j (0-based) at vertical line i, sheared on the right half.
long tile_height(const PathConfig& c, int n, int j, int i)
{
    const long h = c.heights[static_cast<size_t>(j)][static_cast<size_t>(i + n)];
    return i > 0 ? h - i : h;
}

long default_height(const PathConfig& c, int n)
{
    long top = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = -n; i <= n; ++i)
            top = std::max(top, tile_height(c, n, j, i));
    }
    return top + 2;
}

}  // namespace

char lozenge_letter(LozengeType t)
{
    switch (t) {
    case LozengeType::A: return 'a';
    case LozengeType::B: return 'b';
    case LozengeType::C: return 'c';
    }
    return '?';
}

Tiling paths_to_tiling(const PathConfig& config)
{
    if (config.heights.empty())
        throw Error(ErrorCode::InvalidConfig, "empty configuration");
    return paths_to_tiling(config, default_height(config, static_cast<int>(config.heights.size())));
}

Tiling paths_to_tiling(const PathConfig& config, long height)
{
    const int n = static_cast<int>(config.heights.size());
    if (n == 0)
        throw Error(ErrorCode::InvalidConfig, "empty configuration");
    for (const auto& row : config.heights) {
        if (row.size() != static_cast<size_t>(2 * n + 1))
            throw Error(ErrorCode::InvalidConfig, "each walker needs 2N+1 heights");
    }
    for (int j = 0; j < n; ++j) {
        if (config.heights[static_cast<size_t>(j)].back() != j)
            throw Error(ErrorCode::EndpointsNotPacked, "tilings need end points 0..N-1");
    }
    std::vector<int> k;
    for (int j = 0; j < n; ++j)
        k.push_back(static_cast<int>(config.heights[static_cast<size_t>(j)][0]));
    const auto model = structural_model(k);
    validate_config(model, config);
    if (height < default_height(config, n))
        throw Error(ErrorCode::InvalidParams, "clip height below the paths");

    Grid g(n, height);
    // c lozenges: one per walker per interior line, except walkers pinned on the right.
    for (int i = -n + 1; i <= n - 1; ++i) {
        for (int j = std::max(0, i); j < n; ++j) {
            const long r = tile_height(config, n, j, i);
            g.set(i + n - 1, r, LozengeType::C);
        }
    }
    for (int c = 0; c < 2 * n; ++c) {
        const int left = c - n, right = left + 1;
        if (right <= 0) {
            // Left half: b for each unit of rise, a elsewhere.
            for (int j = 0; j < n; ++j) {
                const long from = tile_height(config, n, j, left);
                const long to = tile_height(config, n, j, right);
                for (long r = from; r < to; ++r)
                    g.set(c, r, LozengeType::B);
            }
            for (long r = 0; r <= height; ++r) {
                if (g.owner[static_cast<size_t>(c)][static_cast<size_t>(r)] == -1)
                    g.set(c, r, LozengeType::A);
            }
        } else {
            // Right half (sheared): a for each unit of drop, b elsewhere.
            for (int j = std::max(0, left); j < n; ++j) {
                const long from = tile_height(config, n, j, left);
                const long to = j < right ? -1 : tile_height(config, n, j, right);
                for (long r = to + 1; r < from; ++r)
                    g.set(c, r, LozengeType::A);
            }
            for (long r = 0; r <= height; ++r) {
                if (g.owner[static_cast<size_t>(c)][static_cast<size_t>(r)] == -1)
                    g.set(c, r, LozengeType::B);
            }
        }
    }

    Tiling t;
    t.n = n;
    t.k = k;
    t.height = height;
    for (int c = 0; c < 2 * n; ++c) {
        for (long r = 0; r <= height; ++r) {
            const auto type = static_cast<LozengeType>(g.owner[static_cast<size_t>(c)][static_cast<size_t>(r)]);
            const int i = type == LozengeType::C ? c - n + 1 : c - n;
            t.lozenges.push_back({type, i, r});
        }
    }
    return t;
}

PathConfig tiling_to_paths(const Tiling& t)
{
    const int n = t.n;
    if (n < 1 || static_cast<int>(t.k.size()) != n)
        throw Error(ErrorCode::InconsistentTiling, "domain size does not match the notches");
    // Collect c lozenges per line.
    std::map<int, std::vector<long>> rows;
    for (const auto& lz : t.lozenges) {
        if (lz.j < 0 || lz.j > t.height)
            throw Error(ErrorCode::InconsistentTiling, "lozenge outside the stored rows");
        if (lz.type == LozengeType::C) {
            if (lz.i < -n + 1 || lz.i > n - 1)
                throw Error(ErrorCode::InconsistentTiling, "c lozenge on a boundary line");
            rows[lz.i].push_back(lz.j);
        } else if (lz.i < -n || lz.i > n - 1) {
            throw Error(ErrorCode::InconsistentTiling, "lozenge outside the domain");
        }
    }
    PathConfig c;
    c.heights.assign(static_cast<size_t>(n), std::vector<long>(static_cast<size_t>(2 * n + 1), 0));
    for (int j = 0; j < n; ++j) {
        c.heights[static_cast<size_t>(j)][0] = t.k[static_cast<size_t>(j)];
        c.heights[static_cast<size_t>(j)][static_cast<size_t>(2 * n)] = j;
    }
    for (int i = -n + 1; i <= n - 1; ++i) {
        auto& line = rows[i];
        std::sort(line.begin(), line.end());
        const int pinned = std::max(0, i);
        if (static_cast<int>(line.size()) != n - pinned)
            throw Error(ErrorCode::InconsistentTiling, fmt::format("line {} has {} c lozenges", i, line.size()));
        for (int j = 0; j < n; ++j) {
            long h;
            if (j < pinned)
                h = j;
            else
                h = line[static_cast<size_t>(j - pinned)] + (i > 0 ? i : 0);
            c.heights[static_cast<size_t>(j)][static_cast<size_t>(i + n)] = h;
        }
    }
    Tiling back;
    try {
        back = paths_to_tiling(c, t.height);
    } catch (const Error& e) {
        throw Error(ErrorCode::InconsistentTiling, std::string("recovered paths are invalid: ") + e.what());
    }
    if (!(back == t))
        throw Error(ErrorCode::InconsistentTiling, "lozenges disagree with the recovered paths");
    return c;
}

bool covers_domain(const Tiling& t)
{
    const int n = t.n;
    const auto rows = static_cast<size_t>(t.height + 1);
    std::vector<std::vector<int>> u(static_cast<size_t>(2 * n), std::vector<int>(rows, 0));
    auto l = u;
    const auto mark = [&](std::vector<std::vector<int>>& g, int c, long r) {
        if (c < 0 || c >= 2 * n || r < 0)
            return false;
        if (r > t.height)
            return true;  // continuation above the clip
        ++g[static_cast<size_t>(c)][static_cast<size_t>(r)];
        return true;
    };
    for (const auto& lz : t.lozenges) {
        const int c = (lz.type == LozengeType::C ? lz.i - 1 : lz.i) + n;
        bool ok = mark(u, c, lz.j);
        switch (lz.type) {
        case LozengeType::A: ok = ok && mark(l, c, lz.j); break;
        case LozengeType::B: ok = ok && mark(l, c, lz.j + 1); break;
        case LozengeType::C: ok = ok && mark(l, c + 1, lz.j); break;
        }
        if (!ok)
            return false;
    }
    for (int c = 0; c < 2 * n; ++c) {
        for (long r = 0; r <= t.height; ++r) {
            const bool notch = c == 0 && std::find(t.k.begin(), t.k.end(), r) != t.k.end();
            if (u[static_cast<size_t>(c)][static_cast<size_t>(r)] != 1)
                return false;
            if (l[static_cast<size_t>(c)][static_cast<size_t>(r)] != (notch ? 0 : 1))
                return false;
        }
    }
    return true;
}

PathConfig staircase_config(const std::vector<int>& k)
{
    const int n = static_cast<int>(k.size());
    PathConfig c;
    c.heights.assign(static_cast<size_t>(n), std::vector<long>(static_cast<size_t>(2 * n + 1), 0));
    for (int j = 0; j < n; ++j) {
        for (int s = 0; s <= n; ++s)
            c.heights[static_cast<size_t>(j)][static_cast<size_t>(s)] = k[static_cast<size_t>(j)];
    }
    for (int s = n + 1; s <= 2 * n; ++s) {
        for (int j = 0; j < n; ++j) {
            c.heights[static_cast<size_t>(j)][static_cast<size_t>(s)] =
                j == 0 ? 0 : c.heights[static_cast<size_t>(j - 1)][static_cast<size_t>(s - 1)] + 1;
        }
    }
    return c;
}

TilingWeightSpec TilingWeightSpec::from_q(int n, double q)
{
    if (!(q > 0.0 && q < 1.0))
        throw Error(ErrorCode::ParameterOutOfRange, "q must lie in (0, 1)");
    TilingWeightSpec s;
    for (int i = 1; i <= n; ++i) {
        const double v = std::pow(q, 0.5 + n - i);
        s.alpha.push_back(v);
        s.beta.push_back(v);
    }
    return s;
}

double tiling_log_weight(const Tiling& t, const TilingWeightSpec& spec)
{
    const int n = t.n;
    if (static_cast<int>(spec.alpha.size()) != n || static_cast<int>(spec.beta.size()) != n)
        throw Error(ErrorCode::InvalidParams, "weight spec needs N alphas and N betas");
    const auto a = [&](int idx) { return spec.alpha[static_cast<size_t>(idx - 1)]; };
    const auto b = [&](int idx) { return spec.beta[static_cast<size_t>(idx - 1)]; };
    double lw = 0.0;
    for (const auto& lz : t.lozenges) {
        if (lz.type != LozengeType::C || lz.j == 0)
            continue;
        const int i = lz.i;
        double factor;
        if (i < 0)
            factor = a(n + i) / a(n + i + 1);
        else if (i == 0)
            factor = a(n) * b(n);
        else
            factor = b(n - i) / b(n - i + 1);
        lw += static_cast<double>(lz.j) * std::log(factor);
    }
    return lw;
}

double tiling_weight(const Tiling& t, const TilingWeightSpec& spec) { return std::exp(tiling_log_weight(t, spec)); }

namespace {

struct Pt {
    double s, h;
};

// Lattice (s, h) to the plane; keeps all three edge directions at unit length.
std::pair<double, double> embed(Pt p, double unit, double top)
{
    const double x = p.s * std::sqrt(3.0) / 2.0;
    const double y = p.h + p.s / 2.0;
    return {x * unit, (top - y) * unit};
}

std::vector<Pt> polygon(const Lozenge& lz)
{
    const double x0 = lz.type == LozengeType::C ? lz.i - 1 : lz.i;
    const double r = static_cast<double>(lz.j);
    switch (lz.type) {
    case LozengeType::A: return {{x0, r - 0.5}, {x0 + 1, r - 0.5}, {x0 + 1, r + 0.5}, {x0, r + 0.5}};
    case LozengeType::B: return {{x0 + 1, r - 0.5}, {x0 + 1, r + 0.5}, {x0, r + 1.5}, {x0, r + 0.5}};
    case LozengeType::C: return {{x0, r + 0.5}, {x0 + 1, r - 0.5}, {x0 + 2, r - 0.5}, {x0 + 1, r + 0.5}};
    }
    return {};
}

std::string num(double v) { return fmt::format("{:.3f}", v); }

}  // namespace

std::string render_svg(const Tiling& t, const RenderOptions& opt)
{
    const int n = t.n;
    const double top = static_cast<double>(t.height) + 1.5 + n / 2.0;
    const double bottom = -0.5 - n / 2.0;
    const double width = 2.0 * n * std::sqrt(3.0) / 2.0;
    const double pad = 1.0;
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\">\n",
        num((width + 2 * pad) * opt.unit), num((top - bottom + 2 * pad) * opt.unit), num(-(n * std::sqrt(3.0) / 2.0 + pad) * opt.unit),
        num(-pad * opt.unit), num((width + 2 * pad) * opt.unit), num((top - bottom + 2 * pad) * opt.unit));
    out << "<style>.a{fill:#d9d9d9}.b{fill:#8c8c8c}.c{fill:#f2f2f2}"
           "polygon{stroke:#000;stroke-width:0.5}.path{fill:none;stroke:#c00;stroke-width:2}</style>\n";
    out << "<g id=\"tiling\">\n";
    for (const auto& lz : t.lozenges) {
        out << "<polygon class=\"" << lozenge_letter(lz.type) << "\" points=\"";
        bool first = true;
        for (const auto& p : polygon(lz)) {
            const auto [x, y] = embed(p, opt.unit, top);
            out << (first ? "" : " ") << num(x) << "," << num(y);
            first = false;
        }
        out << "\"/>\n";
    }
    out << "</g>\n";
    if (opt.overlay_paths) {
        const auto c = tiling_to_paths(t);
        out << "<g id=\"paths\">\n";
        for (int j = 0; j < n; ++j) {
            out << "<polyline class=\"path\" points=\"";
            bool first = true;
            for (int i = -n; i <= n; ++i) {
                long h = c.heights[static_cast<size_t>(j)][static_cast<size_t>(i + n)];
                if (i > 0)
                    h -= i;
                if (h < 0)
                    break;
                const auto [x, y] = embed({static_cast<double>(i), static_cast<double>(h)}, opt.unit, top);
                out << (first ? "" : " ") << num(x) << "," << num(y);
                first = false;
            }
            out << "\"/>\n";
        }
        out << "</g>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string render_ascii(const Tiling& t)
{
    // One character per U triangle: rows top to bottom, strips left to right.
    const int strips = 2 * t.n;
    std::vector<std::string> grid(static_cast<size_t>(t.height + 1), std::string(static_cast<size_t>(strips), ' '));
    for (const auto& lz : t.lozenges) {
        const int c = (lz.type == LozengeType::C ? lz.i - 1 : lz.i) + t.n;
        grid[static_cast<size_t>(lz.j)][static_cast<size_t>(c)] = lozenge_letter(lz.type);
    }
    std::string out;
    for (long r = t.height; r >= 0; --r) {
        out += fmt::format("{:>4} ", r);
        out += grid[static_cast<size_t>(r)];
        out += '\n';
    }
    return out;
}

}  // namespace nipaths
