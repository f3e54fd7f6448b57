#include "nipaths/model.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "nipaths/error.hpp"

namespace nipaths {

const char* error_name(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::StartNotAtZero: return "StartNotAtZero";
    case ErrorCode::StartsNotIncreasing: return "StartsNotIncreasing";
    case ErrorCode::EndsNotIncreasing: return "EndsNotIncreasing";
    case ErrorCode::EndpointsTooHigh: return "EndpointsTooHigh";
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorCode::IndexError: return "IndexError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DegenerateBeta: return "DegenerateBeta";
    case ErrorCode::NotEqualSpacing: return "NotEqualSpacing";
    case ErrorCode::GammaOutOfRange: return "GammaOutOfRange";
    case ErrorCode::DuplicatePoints: return "DuplicatePoints";
    case ErrorCode::ZeroGauge: return "ZeroGauge";
    case ErrorCode::EndpointsNotPacked: return "EndpointsNotPacked";
    case ErrorCode::InconsistentTiling: return "InconsistentTiling";
    case ErrorCode::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::SingularTerm: return "SingularTerm";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ImaginaryResidue: return "ImaginaryResidue";
    case ErrorCode::SingularGramm: return "SingularGramm";
    }
    return "Unknown";
}

bool is_numerical(ErrorCode code)
{
    return code == ErrorCode::NoConvergence || code == ErrorCode::ImaginaryResidue ||
           code == ErrorCode::SingularGramm || code == ErrorCode::SingularTerm;
}

ValidatedModel validate(const ModelParams& p)
{
    const auto n = static_cast<size_t>(p.n);
    if (p.n < 1)
        throw Error(ErrorCode::InvalidParams, "n must be positive");
    if (p.k.size() != n || p.l.size() != n || p.alpha.size() != n || p.beta.size() != n)
        throw Error(ErrorCode::InvalidParams, "k, l, alpha, beta must each have n entries");
    if (p.k[0] != 0)
        throw Error(ErrorCode::StartNotAtZero, "k_1 must be 0");
    for (size_t j = 0; j + 1 < n; ++j) {
        if (p.k[j] >= p.k[j + 1])
            throw Error(ErrorCode::StartsNotIncreasing, "k must be strictly increasing");
        if (p.l[j] >= p.l[j + 1])
            throw Error(ErrorCode::EndsNotIncreasing, "l must be strictly increasing");
    }
    if (p.l[0] < 0)
        throw Error(ErrorCode::InvalidParams, "l_1 must be nonnegative");
    if (p.l[n - 1] > p.n - 1)
        throw Error(ErrorCode::EndpointsTooHigh,
                    "l_N = " + std::to_string(p.l[n - 1]) + " exceeds N-1 = " + std::to_string(p.n - 1));
    for (size_t j = 0; j < n; ++j) {
        for (double v : {p.alpha[j], p.beta[j]}) {
            if (!(v > 0.0 && v < 1.0))
                throw Error(ErrorCode::ParameterOutOfRange, "alpha and beta must lie in (0,1)");
        }
    }
    return ValidatedModel(p);
}

ValidatedModel::ValidatedModel(ModelParams p) : p_(std::move(p))
{
    const auto n = p_.beta.size();
    distinct_beta_ = true;
    equal_beta_ = true;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            if (p_.beta[i] == p_.beta[j])
                distinct_beta_ = false;
        }
        if (p_.beta[i] != p_.beta[0])
            equal_beta_ = false;
    }
    if (n == 1) {
        spacing_ = 1;
    } else {
        const int d = p_.k[1];
        bool eq = true;
        for (size_t j = 0; j < n; ++j)
            eq = eq && p_.k[j] == d * static_cast<int>(j);
        if (eq)
            spacing_ = d;
    }
}

double ValidatedModel::step_rate(int step) const
{
    if (step < 1 || step > 2 * p_.n)
        throw Error(ErrorCode::IndexError, "step " + std::to_string(step) + " outside [1, 2N]");
    return step <= p_.n ? alpha(step) : beta(2 * p_.n - step + 1);
}

std::vector<double> ValidatedModel::up_rates(int s_lo, int s_hi) const
{
    std::vector<double> r;
    for (int step = s_lo + 1; step <= std::min(s_hi, p_.n); ++step)
        r.push_back(alpha(step));
    return r;
}

std::vector<double> ValidatedModel::down_rates(int s_lo, int s_hi) const
{
    std::vector<double> r;
    for (int step = std::max(s_lo, p_.n) + 1; step <= s_hi; ++step)
        r.push_back(beta(2 * p_.n - step + 1));
    return r;
}

double transition_weight(const ValidatedModel& m, int step, long x1, long x2)
{
    const double rate = m.step_rate(step);
    const long jump = m.step_is_up(step) ? x2 - x1 : x1 - x2;
    if (jump < 0)
        return 0.0;
    return std::pow(rate, static_cast<double>(jump));
}

std::vector<long> PathConfig::column(int s) const
{
    std::vector<long> c;
    c.reserve(heights.size());
    for (const auto& row : heights)
        c.push_back(row[static_cast<size_t>(s)]);
    return c;
}

namespace {

std::string where(int j, int s)
{
    return "walker " + std::to_string(j + 1) + ", line " + std::to_string(s);
}

void check_shape(const ValidatedModel& m, const PathConfig& c)
{
    const int n = m.n();
    if (static_cast<int>(c.heights.size()) != n)
        throw Error(ErrorCode::InvalidConfig, "expected N rows of heights");
    for (const auto& row : c.heights) {
        if (static_cast<int>(row.size()) != 2 * n + 1)
            throw Error(ErrorCode::InvalidConfig, "expected 2N+1 columns of heights");
    }
    for (int j = 0; j < n; ++j) {
        if (c.heights[j][0] != m.k(j + 1))
            throw Error(ErrorCode::InvalidConfig, "column 0 must equal k at " + where(j, 0));
        if (c.heights[j][2 * n] != m.l(j + 1))
            throw Error(ErrorCode::InvalidConfig, "column 2N must equal l at " + where(j, 2 * n));
    }
    for (int s = 0; s <= 2 * n; ++s) {
        for (int j = 0; j + 1 < n; ++j) {
            if (c.heights[j][s] >= c.heights[j + 1][s])
                throw Error(ErrorCode::InvalidConfig, "columns must be strictly increasing at " + where(j, s));
        }
    }
}

}  // namespace

void validate_config(const ValidatedModel& m, const PathConfig& c)
{
    check_shape(m, c);
    const int n = m.n();
    for (int step = 1; step <= 2 * n; ++step) {
        const auto x = c.column(step - 1);
        const auto y = c.column(step);
        for (int j = 0; j < n; ++j) {
            if (step <= n) {
                // x_j <= y_j < x_{j+1}
                if (y[j] < x[j])
                    throw Error(ErrorCode::InvalidConfig, "upward half must not descend at " + where(j, step));
                if (j + 1 < n && y[j] >= x[j + 1])
                    throw Error(ErrorCode::InvalidConfig, "paths intersect at " + where(j, step));
            } else {
                // y_j <= x_j < y_{j+1}
                if (y[j] > x[j])
                    throw Error(ErrorCode::InvalidConfig, "downward half must not ascend at " + where(j, step));
                if (j + 1 < n && x[j] >= y[j + 1])
                    throw Error(ErrorCode::InvalidConfig, "paths intersect at " + where(j, step));
            }
        }
    }
}

bool is_valid_config(const ValidatedModel& m, const PathConfig& c)
{
    try {
        validate_config(m, c);
        return true;
    } catch (const Error&) {
        return false;
    }
}

double path_weight(const ValidatedModel& m, const PathConfig& c)
{
    validate_config(m, c);
    const int n = m.n();
    double log_w = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int step = 1; step <= 2 * n; ++step) {
            const long x1 = c.heights[j][step - 1];
            const long x2 = c.heights[j][step];
            const long jump = m.step_is_up(step) ? x2 - x1 : x1 - x2;
            log_w += static_cast<double>(jump) * std::log(m.step_rate(step));
        }
    }
    return std::exp(log_w);
}

double path_weight_lgv(const ValidatedModel& m, const PathConfig& c)
{
    check_shape(m, c);
    const int n = m.n();
    double w = 1.0;
    Eigen::MatrixXd t(n, n);
    for (int step = 1; step <= 2 * n; ++step) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j)
                t(i, j) = transition_weight(m, step, c.heights[i][step - 1], c.heights[j][step]);
        }
        w *= t.partialPivLu().determinant();
    }
    // Boundary determinants det[delta(k_i, x_j)] and det[delta(x_i, l_j)] are 1
    // here because check_shape pinned both boundary columns.
    return w;
}

}  // namespace nipaths
