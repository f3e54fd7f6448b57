#include <boost/multiprecision/cpp_bin_float.hpp>
#include <map>
#include <mutex>

#include "nipaths/error.hpp"
#include "nipaths/kernel_finite.hpp"

namespace nipaths {

namespace {

using mp = boost::multiprecision::cpp_bin_float_100;
using Series = std::vector<mp>;

// Coefficients of (1+t)^a up to t^degree.
Series binomial_series(const mp& a, int degree)
{
    Series c(static_cast<size_t>(degree) + 1);
    c[0] = 1;
    for (int n = 1; n <= degree; ++n)
        c[static_cast<size_t>(n)] = c[static_cast<size_t>(n - 1)] * (a - (n - 1)) / n;
    return c;
}

Series truncated_product(const Series& a, const Series& b, int degree)
{
    Series c(static_cast<size_t>(degree) + 1, mp(0));
    for (int i = 0; i <= degree && i < static_cast<int>(a.size()); ++i) {
        for (int j = 0; i + j <= degree && j < static_cast<int>(b.size()); ++j)
            c[static_cast<size_t>(i + j)] += a[static_cast<size_t>(i)] * b[static_cast<size_t>(j)];
    }
    return c;
}

}  // namespace

// With all beta equal the sum over simple poles degenerates into the Hermite
// interpolant of H(u) = prod_{r<=s2}(1 - alpha_r u^{1/k}) u^{x2/k} at
// u0 = beta^k: the rank-N part equals [z^{x1}] A_{s1}(z) sum_{n<N} c_n (z^k-u0)^n
// with c_n the Taylor coefficients of H at u0.
struct ConfluentKernel::Impl {
    ValidatedModel m;
    int n;
    int k;
    mp beta;
    mp u0;

    mutable std::mutex mu;
    mutable std::map<std::pair<int, long>, Series> q_cache;
    mutable std::map<int, Series> h_cache;

    explicit Impl(const ValidatedModel& model) : m(model), n(model.n()), k(*model.equal_spacing())
    {
        beta = mp(m.beta(1));
        u0 = pow(beta, k);
    }

    Series build_q(int s2, long x2) const
    {
        const int deg = n - 1;
        const Series root = binomial_series(mp(1) / k, deg);
        Series h = binomial_series(mp(x2) / k, deg);
        const mp bx = pow(beta, static_cast<int>(x2));
        for (auto& c : h)
            c *= bx;
        for (int r = 1; r <= s2; ++r) {
            const mp ab = mp(m.alpha(r)) * beta;
            Series f(root.size());
            for (size_t i = 0; i < root.size(); ++i)
                f[i] = -ab * root[i];
            f[0] += 1;
            h = truncated_product(h, f, deg);
        }
        // c_n in powers of (u - u0) is h_n / u0^n.
        Series c(h.size());
        mp scale = 1;
        for (size_t i = 0; i < h.size(); ++i) {
            c[i] = h[i] / scale;
            scale *= u0;
        }
        // Horner in w = z^k - u0, expanded in monomials of z.
        Series q{c.back()};
        for (int i = deg - 1; i >= 0; --i) {
            Series next(q.size() + static_cast<size_t>(k), mp(0));
            for (size_t a = 0; a < q.size(); ++a) {
                next[a + static_cast<size_t>(k)] += q[a];
                next[a] -= u0 * q[a];
            }
            next[0] += c[static_cast<size_t>(i)];
            q.swap(next);
        }
        return q;
    }

    const Series& q_for(int s2, long x2) const
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = q_cache.find({s2, x2});
        if (it == q_cache.end())
            it = q_cache.emplace(std::make_pair(s2, x2), build_q(s2, x2)).first;
        return it->second;
    }

    Series h_for(int s1, long degree) const
    {
        std::lock_guard<std::mutex> lock(mu);
        auto& h = h_cache[s1];
        if (static_cast<long>(h.size()) <= degree) {
            h.assign(static_cast<size_t>(degree) + 1, mp(0));
            h[0] = 1;
            for (int r = 1; r <= s1; ++r) {
                const mp a = mp(m.alpha(r));
                for (size_t i = 1; i < h.size(); ++i)
                    h[i] += a * h[i - 1];
            }
        }
        return Series(h.begin(), h.begin() + degree + 1);
    }
};

ConfluentKernel::ConfluentKernel(const ValidatedModel& model)
{
    if (!model.equal_beta() || !model.equal_spacing())
        throw Error(ErrorCode::InvalidParams, "confluent evaluation needs equal beta and equal spacing");
    impl_ = std::make_unique<Impl>(model);
}

ConfluentKernel::~ConfluentKernel() = default;

ConfluentValue ConfluentKernel::rank_part(GridPoint p1, GridPoint p2) const
{
    const Series& q = impl_->q_for(p2.s, p2.x);
    const Series h = impl_->h_for(p1.s, p1.x);
    mp sum = 0, abs_sum = 0;
    const long top = std::min<long>(p1.x, static_cast<long>(q.size()) - 1);
    for (long i = 0; i <= top; ++i) {
        const mp t = q[static_cast<size_t>(i)] * h[static_cast<size_t>(p1.x - i)];
        sum += t;
        abs_sum += abs(t);
    }
    // 100 decimal digits of working precision; cancellation costs log10(abs_sum/|sum|).
    const double err = static_cast<double>(abs_sum * mp(1e-95)) + 1e-16 * std::fabs(static_cast<double>(sum));
    return {static_cast<double>(sum), err};
}

}  // namespace nipaths
