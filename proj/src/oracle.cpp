#include "nipaths/oracle.hpp"

#include <cmath>
#include <functional>

#include "nipaths/error.hpp"
#include "nipaths/series.hpp"

namespace nipaths {

std::uint64_t SplitMix64::mix(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

SplitMix64 SplitMix64::stream(std::uint64_t seed, std::uint64_t index)
{
    return SplitMix64(mix(seed) + index * 0x9E3779B97F4A7C15ULL);
}

std::uint64_t SplitMix64::next()
{
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
}

double SplitMix64::uniform()
{
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

Oracle::Oracle(const ValidatedModel& model, TruncationSpec spec)
    : model_(model), n_(model.n()), m_(spec.max_height), side_(static_cast<size_t>(spec.max_height) + 1)
{
    if (m_ < model_.k(n_))
        throw Error(ErrorCode::InvalidParams, "truncation height below the starting configuration");
    double states = 1.0;
    for (int i = 0; i < n_; ++i)
        states *= static_cast<double>(side_);
    if (states > static_cast<double>(spec.state_cap))
        throw Error(ErrorCode::StateSpaceTooLarge, "(M+1)^N exceeds the configured state cap");

    stride_.resize(static_cast<size_t>(n_));
    size_t st = 1;
    for (int i = 0; i < n_; ++i) {
        stride_[static_cast<size_t>(i)] = st;
        st *= side_;
    }

    forward_.push_back(start_tensor());
    for (int step = 1; step <= 2 * n_; ++step) {
        Tensor t = forward_.back();
        apply_step(t, step);
        forward_.push_back(std::move(t));
    }
    std::vector<long> l(model_.params().l.begin(), model_.params().l.end());
    z_ = forward_.back()[index_of(l)];

    // Tail: any discarded configuration has its top walker above M on line N.
    // Bound by independent walkers: prod_{j<N} Z_j times the top walker's
    // weight restricted to peak heights > M.
    std::vector<double> alphas, betas;
    for (int j = 1; j <= n_; ++j) {
        alphas.push_back(model_.alpha(j));
        betas.push_back(model_.beta(j));
    }
    double others = 1.0;
    for (int j = 1; j < n_; ++j)
        others *= laurent_coefficient(alphas, betas, model_.l(j) - model_.k(j));
    const long kn = model_.k(n_), ln = model_.l(n_);
    long len = m_ + 256;
    double top_tail = 0.0;
    for (;;) {
        const auto ha = homogeneous_sequence(len - kn, alphas);
        const auto hb = homogeneous_sequence(len - ln, betas);
        double sum = 0.0, last = 0.0;
        for (long h = m_ + 1; h <= len; ++h) {
            last = ha[static_cast<size_t>(h - kn)] * hb[static_cast<size_t>(h - ln)];
            sum += last;
        }
        // Remaining terms decay at least geometrically once the ratio is below 1.
        const double ratio = ha.back() * hb.back() / (ha[ha.size() - 2] * hb[hb.size() - 2]);
        if (ratio < 1.0 && last * ratio / (1.0 - ratio) < 1e-6 * sum + 1e-300) {
            top_tail = sum + last * ratio / (1.0 - ratio);
            break;
        }
        len *= 2;
        if (len > 1'000'000)
            throw Error(ErrorCode::NoConvergence, "tail series of the truncation bound");
    }
    tail_ = others * top_tail;
}

size_t Oracle::index_of(const std::vector<long>& x) const
{
    size_t idx = 0;
    for (int i = 0; i < n_; ++i)
        idx += static_cast<size_t>(x[static_cast<size_t>(i)]) * stride_[static_cast<size_t>(i)];
    return idx;
}

Oracle::Tensor Oracle::start_tensor() const
{
    Tensor t(stride_.back() * side_, 0.0);
    std::vector<long> k(model_.params().k.begin(), model_.params().k.end());
    t[index_of(k)] = 1.0;
    return t;
}

void Oracle::apply_step(Tensor& t, int step) const
{
    const double rate = model_.step_rate(step);
    const bool up = model_.step_is_up(step);
    const size_t total = t.size();
    std::vector<double> fiber(side_), out(side_);

    auto pass = [&](int i) {
        const size_t st = stride_[static_cast<size_t>(i)];
        for (size_t base = 0; base < total; ++base) {
            if ((base / st) % side_ != 0)
                continue;
            // Bound set by the neighbouring coordinate that is already on the new line.
            long lo = 0, hi = m_;
            if (up && i > 0)
                lo = static_cast<long>((base / stride_[static_cast<size_t>(i - 1)]) % side_) + 1;
            if (!up && i + 1 < n_)
                hi = static_cast<long>((base / stride_[static_cast<size_t>(i + 1)]) % side_) - 1;
            for (size_t y = 0; y < side_; ++y)
                fiber[y] = t[base + y * st];
            std::fill(out.begin(), out.end(), 0.0);
            if (up) {
                // out(y) = sum_{x=lo}^{y} rate^{y-x} fiber(x)
                double acc = 0.0;
                for (long y = lo; y <= m_; ++y) {
                    acc = rate * acc + fiber[static_cast<size_t>(y)];
                    out[static_cast<size_t>(y)] = acc;
                }
            } else {
                // out(y) = sum_{x=y}^{hi} rate^{x-y} fiber(x)
                double acc = 0.0;
                for (long y = hi; y >= 0; --y) {
                    acc = rate * acc + fiber[static_cast<size_t>(y)];
                    out[static_cast<size_t>(y)] = acc;
                }
            }
            for (size_t y = 0; y < side_; ++y)
                t[base + y * st] = out[y];
        }
    };
    if (up) {
        for (int i = 0; i < n_; ++i)
            pass(i);
    } else {
        for (int i = n_ - 1; i >= 0; --i)
            pass(i);
    }
}

OracleEstimate Oracle::correlation(const std::vector<GridPoint>& points) const
{
    for (const auto& p : points) {
        if (p.s < 0 || p.s > 2 * n_)
            throw Error(ErrorCode::IndexError, "point line outside [0, 2N]");
    }
    auto mask = [&](Tensor& t, int s) {
        std::vector<long> need;
        for (const auto& p : points) {
            if (p.s == s)
                need.push_back(p.x);
        }
        if (need.empty())
            return;
        for (long x : need) {
            if (x < 0 || x > m_) {
                std::fill(t.begin(), t.end(), 0.0);
                return;
            }
        }
        for (size_t idx = 0; idx < t.size(); ++idx) {
            if (t[idx] == 0.0)
                continue;
            bool all = true;
            for (long x : need) {
                bool found = false;
                for (int i = 0; i < n_ && !found; ++i)
                    found = static_cast<long>((idx / stride_[static_cast<size_t>(i)]) % side_) == x;
                all = all && found;
            }
            if (!all)
                t[idx] = 0.0;
        }
    };
    Tensor t = start_tensor();
    mask(t, 0);
    for (int step = 1; step <= 2 * n_; ++step) {
        apply_step(t, step);
        mask(t, step);
    }
    std::vector<long> l(model_.params().l.begin(), model_.params().l.end());
    const double zp = t[index_of(l)];
    return {zp / z_, tail_ / z_};
}

PathConfig Oracle::sample_one(std::uint64_t seed, std::uint64_t index) const
{
    auto rng = SplitMix64::stream(seed, index);
    PathConfig c;
    c.heights.assign(static_cast<size_t>(n_), std::vector<long>(static_cast<size_t>(2 * n_ + 1), 0));
    std::vector<long> y(model_.params().l.begin(), model_.params().l.end());
    for (int j = 0; j < n_; ++j)
        c.heights[static_cast<size_t>(j)][static_cast<size_t>(2 * n_)] = y[static_cast<size_t>(j)];

    std::vector<long> x(static_cast<size_t>(n_));
    std::vector<std::pair<double, std::vector<long>>> cand;
    for (int step = 2 * n_; step >= 1; --step) {
        const bool up = model_.step_is_up(step);
        const double rate = model_.step_rate(step);
        const auto& f = forward_[static_cast<size_t>(step - 1)];
        cand.clear();
        double total = 0.0;
        // Enumerate x interlacing with y, in lexicographic order.
        std::function<void(int, double)> rec = [&](int i, double w) {
            if (i == n_) {
                const double v = f[index_of(x)] * w;
                if (v > 0.0) {
                    total += v;
                    cand.emplace_back(total, x);
                }
                return;
            }
            const size_t ui = static_cast<size_t>(i);
            long lo, hi;
            if (up) {
                lo = i > 0 ? y[ui - 1] + 1 : 0;
                hi = y[ui];
            } else {
                lo = y[ui];
                hi = i + 1 < n_ ? y[ui + 1] - 1 : m_;
            }
            for (long v = lo; v <= hi; ++v) {
                x[ui] = v;
                const long jump = up ? y[ui] - v : v - y[ui];
                rec(i + 1, w * std::pow(rate, static_cast<double>(jump)));
            }
        };
        rec(0, 1.0);
        if (cand.empty())
            throw Error(ErrorCode::InvalidConfig, "sampler reached a state of zero weight");
        const double u = rng.uniform() * total;
        size_t pick = 0;
        while (pick + 1 < cand.size() && cand[pick].first <= u)
            ++pick;
        y = cand[pick].second;
        for (int j = 0; j < n_; ++j)
            c.heights[static_cast<size_t>(j)][static_cast<size_t>(step - 1)] = y[static_cast<size_t>(j)];
    }
    return c;
}

std::vector<PathConfig> Oracle::sample(std::uint64_t seed, int count) const
{
    std::vector<PathConfig> out;
    out.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i)
        out.push_back(sample_one(seed, static_cast<std::uint64_t>(i)));
    return out;
}

}  // namespace nipaths
