#pragma once

#include <random>
#include <vector>

#include "nipaths/error.hpp"
#include "nipaths/model.hpp"

namespace testutil {

inline nipaths::ModelParams params(std::vector<int> k, std::vector<double> alpha, std::vector<double> beta)
{
    nipaths::ModelParams p;
    p.n = static_cast<int>(k.size());
    p.k = std::move(k);
    for (int j = 0; j < p.n; ++j) p.l.push_back(j);
    p.alpha = std::move(alpha);
    p.beta = std::move(beta);
    return p;
}

inline nipaths::ValidatedModel model(std::vector<int> k, std::vector<double> alpha, std::vector<double> beta)
{
    return nipaths::validate(params(std::move(k), std::move(alpha), std::move(beta)));
}

// Random model with N walkers, rates in (lo, hi), starts k_1 = 0 < k_2 < ...
inline nipaths::ModelParams random_params(std::mt19937_64& rng, int n, double lo = 0.2, double hi = 0.8,
                                          int max_gap = 3)
{
    std::uniform_real_distribution<double> rate(lo, hi);
    std::uniform_int_distribution<int> gap(1, max_gap);
    std::vector<int> k{0};
    for (int j = 1; j < n; ++j) k.push_back(k.back() + gap(rng));
    std::vector<double> a, b;
    for (int j = 0; j < n; ++j) {
        a.push_back(rate(rng));
        b.push_back(rate(rng));
    }
    return params(k, a, b);
}

template <class F>
nipaths::ErrorCode code_of(F&& f)
{
    try {
        f();
    } catch (const nipaths::Error& e) {
        return e.code();
    }
    return static_cast<nipaths::ErrorCode>(-1);
}

}  // namespace testutil
