#include "nipaths/series.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "nipaths/error.hpp"

namespace nipaths {

void trim(PolyCoeffs& p)
{
    while (!p.empty() && p.back() == 0.0)
        p.pop_back();
}

double evaluate(const PolyCoeffs& p, double z)
{
    double acc = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it)
        acc = acc * z + *it;
    return acc;
}

PolyCoeffs multiply(const PolyCoeffs& a, const PolyCoeffs& b)
{
    if (a.empty() || b.empty())
        return {};
    PolyCoeffs c(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i) {
        for (size_t j = 0; j < b.size(); ++j)
            c[i + j] += a[i] * b[j];
    }
    return c;
}

std::vector<double> homogeneous_sequence(long max_degree, const std::vector<double>& rates)
{
    if (max_degree < 0)
        return {};
    std::vector<double> h(static_cast<size_t>(max_degree) + 1, 0.0);
    h[0] = 1.0;
    // Multiply by one geometric factor at a time: h_m += r h_{m-1}.
    for (double r : rates) {
        for (size_t m = 1; m < h.size(); ++m)
            h[m] += r * h[m - 1];
    }
    return h;
}

double complete_homogeneous(long m, const std::vector<double>& rates)
{
    if (m < 0)
        return 0.0;
    if (rates.empty())
        return m == 0 ? 1.0 : 0.0;
    return homogeneous_sequence(m, rates).back();
}

double coeff_of_poly_times_geometric(const PolyCoeffs& poly, const std::vector<double>& rates, long m)
{
    if (m < 0 || poly.empty())
        return 0.0;
    const auto h = homogeneous_sequence(m, rates);
    double acc = 0.0;
    const long top = std::min<long>(m, static_cast<long>(poly.size()) - 1);
    for (long i = 0; i <= top; ++i)
        acc += poly[static_cast<size_t>(i)] * h[static_cast<size_t>(m - i)];
    return acc;
}

namespace {

// Streams h_0, h_1, ... of prod (1 - r z)^{-1} one degree at a time.
class HomogeneousStream {
public:
    explicit HomogeneousStream(std::vector<double> rates) : rates_(std::move(rates)), partial_(rates_.size(), 0.0) {}

    double next()
    {
        if (degree_ == 0) {
            ++degree_;
            std::fill(partial_.begin(), partial_.end(), 1.0);
            return 1.0;
        }
        // partial_[i] holds h_{deg}(r_0..r_i); update in place to degree+1.
        double below = 0.0;
        for (size_t i = 0; i < rates_.size(); ++i) {
            partial_[i] = below + rates_[i] * partial_[i];
            below = partial_[i];
        }
        ++degree_;
        return rates_.empty() ? 0.0 : partial_.back();
    }

    void skip(long count)
    {
        for (long i = 0; i < count; ++i)
            next();
    }

private:
    std::vector<double> rates_;
    std::vector<double> partial_;
    long degree_ = 0;
};

std::vector<double> absolute(const std::vector<double>& v)
{
    std::vector<double> a(v.size());
    std::transform(v.begin(), v.end(), a.begin(), [](double x) { return std::fabs(x); });
    return a;
}

}  // namespace

double laurent_coefficient(const std::vector<double>& up, const std::vector<double>& down, long d)
{
    if (down.empty())
        return complete_homogeneous(d, up);
    if (up.empty())
        return complete_homogeneous(-d, down);

    // sum_{m >= max(0,-d)} h_m(down) h_{d+m}(up)
    const long m0 = std::max<long>(0, -d);
    HomogeneousStream hb(down), ha(up), hb_abs(absolute(down)), ha_abs(absolute(up));
    hb.skip(m0);
    hb_abs.skip(m0);
    ha.skip(d + m0);
    ha_abs.skip(d + m0);

    double sum = 0.0, abs_sum = 0.0, prev_abs = -1.0;
    constexpr long max_terms = 1000000;
    for (long m = m0; m < m0 + max_terms; ++m) {
        const double t = hb.next() * ha.next();
        const double ta = hb_abs.next() * ha_abs.next();
        sum += t;
        abs_sum += ta;
        if (prev_abs > 0.0 && ta < prev_abs) {
            // Ratios of these terms decrease, so the tail is a dominated geometric series.
            const double ratio = ta / prev_abs;
            const double tail = ta * ratio / (1.0 - ratio);
            if (tail <= 1e-18 * abs_sum || abs_sum == 0.0)
                return sum;
        }
        if (ta == 0.0 && prev_abs == 0.0)
            return sum;
        prev_abs = ta;
    }
    throw Error(ErrorCode::NoConvergence, "Laurent coefficient series did not converge");
}

AlternantValue alternant(const std::vector<int>& exponents, const std::vector<double>& gamma)
{
    const auto n = static_cast<Eigen::Index>(exponents.size());
    if (static_cast<size_t>(n) != gamma.size() || n == 0)
        throw Error(ErrorCode::InvalidParams, "alternant needs equally many exponents and variables");
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j)
            a(i, j) = std::pow(gamma[static_cast<size_t>(j)], exponents[static_cast<size_t>(i)]);
    }
    const auto lu = a.partialPivLu();
    const double lu_det = lu.determinant();
    const double rcond = lu.rcond();
    const double eps = std::numeric_limits<double>::epsilon();

    AlternantValue out;
    out.value = lu_det;
    out.rel_error = rcond > 0.0 ? static_cast<double>(n) * eps / rcond : std::numeric_limits<double>::infinity();

    bool equal_spacing = n > 1 && exponents[0] == 0;
    const int step = n > 1 ? exponents[1] : 0;
    for (Eigen::Index i = 0; i < n && equal_spacing; ++i)
        equal_spacing = exponents[static_cast<size_t>(i)] == step * static_cast<int>(i);
    if (equal_spacing) {
        double prod = 1.0;
        for (size_t i = 0; i < gamma.size(); ++i) {
            for (size_t j = i + 1; j < gamma.size(); ++j)
                prod *= std::pow(gamma[j], step) - std::pow(gamma[i], step);
        }
        out.value = prod;
        // Product form is accurate to a few ulps per factor.
        const double disagreement = prod != 0.0 ? std::fabs(lu_det - prod) / std::fabs(prod) : 0.0;
        out.rel_error = std::min(out.rel_error, std::max(disagreement, static_cast<double>(n * n) * eps));
    }
    out.condition_warning = out.rel_error > 1e-8;
    return out;
}

PolyCoeffs substituted_alternant(const std::vector<int>& exponents, const std::vector<double>& beta, int j)
{
    const auto n = static_cast<int>(exponents.size());
    if (static_cast<size_t>(n) != beta.size() || j < 1 || j > n)
        throw Error(ErrorCode::IndexError, "substituted column out of range");
    for (size_t a = 0; a < beta.size(); ++a) {
        for (size_t b = a + 1; b < beta.size(); ++b) {
            if (beta[a] == beta[b])
                throw Error(ErrorCode::DegenerateBeta, "betas must be pairwise distinct");
        }
    }
    const int col = j - 1;
    PolyCoeffs poly(static_cast<size_t>(exponents.back()) + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        double cof = 1.0;
        if (n > 1) {
            Eigen::MatrixXd minor(n - 1, n - 1);
            for (int r = 0, rr = 0; r < n; ++r) {
                if (r == i)
                    continue;
                for (int c = 0, cc = 0; c < n; ++c) {
                    if (c == col)
                        continue;
                    minor(rr, cc++) = std::pow(beta[static_cast<size_t>(c)], exponents[static_cast<size_t>(r)]);
                }
                ++rr;
            }
            cof = minor.partialPivLu().determinant();
        }
        if ((i + col) % 2 == 1)
            cof = -cof;
        poly[static_cast<size_t>(exponents[static_cast<size_t>(i)])] += cof;
    }
    return poly;
}

}  // namespace nipaths
