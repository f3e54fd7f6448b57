#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "nipaths/kernel_finite.hpp"
#include "nipaths/oracle.hpp"

using namespace nipaths;

TEST_SUITE("kernel_finite")
{
    TEST_CASE("single walker closed form")
    {
        auto m = testutil::model({0}, {0.5}, {0.5});
        FiniteKernel K(m);
        for (long x = 0; x <= 6; ++x)
            CHECK(K({1, x}, {1, x}) == doctest::Approx(0.75 * std::pow(0.25, x)).epsilon(1e-12));
        CHECK(em_reference(m, {1, 0}, {1, 0}) == doctest::Approx(0.75).epsilon(1e-12));
        CHECK(kernel_general(m, {1, 3}, {1, 3}) == doctest::Approx(0.75 * std::pow(0.25, 3)).epsilon(1e-12));
    }

    TEST_CASE("starting line is deterministic")
    {
        auto m = testutil::model({0, 2, 3}, {0.3, 0.6, 0.5}, {0.4, 0.7, 0.2});
        for (auto route : {FiniteRoute::Auto, FiniteRoute::General, FiniteRoute::EynardMehta}) {
            FiniteKernel K(m, route);
            for (long x = 0; x <= 6; ++x) {
                double expect = (x == 0 || x == 2 || x == 3) ? 1.0 : 0.0;
                CHECK(std::abs(K({0, x}, {0, x}) - expect) < 1e-12);
            }
        }
    }

    TEST_CASE("agreement with brute-force vertex-disjoint path enumeration")
    {
        // Reference values from exhaustive enumeration of N=2 path pairs with
        // heights <= 13, checking vertex-disjointness of explicit lattice paths.
        auto m = testutil::model({0, 2}, {0.2, 0.25}, {0.15, 0.3});
        FiniteKernel K(m);
        auto rho1 = [&](GridPoint p) { return K(p, p); };
        auto rho2 = [&](GridPoint p, GridPoint q) { return K(p, p) * K(q, q) - K(p, q) * K(q, p); };
        CHECK(std::abs(rho1({1, 0}) - 0.98000000000000167) < 1e-9);
        CHECK(std::abs(rho1({1, 2}) - 0.9300360000001348) < 1e-9);
        CHECK(std::abs(rho1({2, 3}) - 0.13533627185158786) < 1e-9);
        CHECK(std::abs(rho1({3, 1}) - 0.62241666666669571) < 1e-9);
        CHECK(std::abs(rho2({1, 2}, {3, 1}) - 0.58507166666675783) < 1e-9);
        CHECK(std::abs(rho2({2, 0}, {2, 3}) - 0.12785644265627397) < 1e-9);
    }

    TEST_CASE("routes agree on random models")
    {
        std::mt19937_64 rng(2024);
        for (int trial = 0; trial < 12; ++trial) {
            int n = 1 + trial % 3;
            auto m = validate(testutil::random_params(rng, n));
            std::uniform_int_distribution<int> sd(0, 2 * n);
            std::uniform_int_distribution<long> xd(0, 6);
            for (int q = 0; q < 20; ++q) {
                GridPoint p1{sd(rng), xd(rng)}, p2{sd(rng), xd(rng)};
                double g = kernel_general(m, p1, p2);
                double e = em_reference(m, p1, p2);
                CHECK(std::abs(g - e) < 1e-9);
            }
        }
    }

    TEST_CASE("equal spacing formula with k=1 matches the general formula")
    {
        auto m = testutil::model({0, 1, 2}, {0.3, 0.5, 0.7}, {0.25, 0.45, 0.65});
        for (int s1 = 0; s1 <= 3; ++s1)
            for (int s2 = 0; s2 <= 3; ++s2)
                for (long x1 = 0; x1 <= 4; ++x1)
                    for (long x2 = 0; x2 <= 4; ++x2) {
                        CHECK(std::abs(kernel_equal_spacing(m, {s1, x1}, {s2, x2}) -
                                       kernel_general(m, {s1, x1}, {s2, x2})) < 1e-10);
                    }
    }

    TEST_CASE("equal spacing routes agree with each other and with Eynard-Mehta")
    {
        auto m = testutil::model({0, 2, 4}, {0.4, 0.55, 0.3}, {0.35, 0.5, 0.6});
        FiniteKernel distinct(m, FiniteRoute::EqualDistinct);
        FiniteKernel quad(m, FiniteRoute::EqualQuadrature);
        FiniteKernel em(m, FiniteRoute::EynardMehta);
        for (int s1 = 0; s1 <= 3; ++s1)
            for (int s2 = 0; s2 <= 3; ++s2)
                for (long x1 = 0; x1 <= 7; x1 += 3)
                    for (long x2 = 0; x2 <= 7; x2 += 2) {
                        double ref = em({s1, x1}, {s2, x2});
                        CHECK(std::abs(distinct({s1, x1}, {s2, x2}) - ref) < 1e-8);
                        CHECK(std::abs(quad({s1, x1}, {s2, x2}) - ref) < 1e-8);
                    }
    }

    TEST_CASE("confluent limit is continuous in the betas")
    {
        double beta = 2.0 / 3.0;
        auto mc = testutil::model({0, 2}, {beta, beta}, {beta, beta});
        FiniteKernel conf(mc, FiniteRoute::EqualConfluent);
        double eps_prev = 0.0, diff_prev = 0.0;
        for (double eps : {1e-2, 1e-3}) {
            auto md = testutil::model({0, 2}, {beta, beta}, {beta * (1 + eps), beta * (1 - eps)});
            double diff = 0.0;
            for (long x1 = 0; x1 <= 6; ++x1)
                for (long x2 = 0; x2 <= 6; ++x2)
                    diff = std::max(diff, std::abs(kernel_general(md, {1, x1}, {1, x2}) - conf({1, x1}, {1, x2})));
            CHECK(diff < 50 * eps);
            if (eps_prev > 0) CHECK(diff < diff_prev);
            eps_prev = eps;
            diff_prev = diff;
        }
    }

    TEST_CASE("equal spacing N=2 k=2 matches the oracle")
    {
        auto m = testutil::model({0, 2}, {2.0 / 3, 2.0 / 3}, {2.0 / 3, 2.0 / 3});
        FiniteKernel K(m);
        CHECK(K.route() == FiniteRoute::EqualConfluent);
        Oracle orc(m, {40});
        for (long x = 0; x <= 12; ++x) {
            auto o = orc.correlation({{1, x}});
            CHECK(std::abs(K({1, x}, {1, x}) - o.value) <= o.error_bound + 1e-8);
        }
        for (long x = 0; x <= 6; ++x)
            for (long y = x + 1; y <= 7; ++y) {
                auto o = orc.correlation({{1, x}, {1, y}});
                double det = K({1, x}, {1, x}) * K({1, y}, {1, y}) - K({1, x}, {1, y}) * K({1, y}, {1, x});
                CHECK(std::abs(det - o.value) <= o.error_bound + 1e-8);
            }
    }

    TEST_CASE("Gramm matrix after biorthogonalization is diagonal")
    {
        std::mt19937_64 rng(99);
        for (int n = 1; n <= 4; ++n) {
            auto m = validate(testutil::random_params(rng, n));
            auto d = em_decomposition(m);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j)
                    if (i != j) CHECK(std::abs(d.gramm_tilde(i, j)) < 1e-10);
                CHECK(d.gramm_tilde(i, i) == doctest::Approx(d.gramm_tilde_closed_form(i)).epsilon(1e-9));
            }
        }
        auto m1 = testutil::model({0}, {0.5}, {0.4});
        auto d1 = em_decomposition(m1);
        CHECK(d1.gramm(0, 0) == doctest::Approx(1.0 / (1 - 0.2)).epsilon(1e-13));
    }

    TEST_CASE("route selection and errors")
    {
        auto eq = testutil::model({0, 3}, {0.5, 0.5}, {0.5, 0.5});
        CHECK(default_route(eq) == FiniteRoute::EqualConfluent);
        auto gen = testutil::model({0, 1, 4}, {0.5, 0.5, 0.5}, {0.3, 0.4, 0.5});
        CHECK(default_route(gen) == FiniteRoute::General);
        auto deg = testutil::model({0, 1, 4}, {0.5, 0.5, 0.5}, {0.3, 0.3, 0.5});
        CHECK(default_route(deg) == FiniteRoute::EynardMehta);
        CHECK(testutil::code_of([&] { FiniteKernel(gen, FiniteRoute::EqualDistinct); }) ==
              ErrorCode::NotEqualSpacing);
        CHECK(testutil::code_of([&] { kernel_general(deg, {1, 0}, {1, 0}); }) == ErrorCode::DegenerateBeta);
        FiniteKernel K(gen);
        CHECK(testutil::code_of([&] { K({7, 0}, {1, 0}); }) == ErrorCode::IndexError);
        CHECK(route_from_name(route_name(FiniteRoute::EqualQuadrature)) == FiniteRoute::EqualQuadrature);
    }

    TEST_CASE("kernel depends only on alphas up to the query lines")
    {
        std::mt19937_64 rng(5);
        auto p = testutil::random_params(rng, 3);
        p.beta = {0.3, 0.5, 0.7};
        auto m = validate(p);
        auto p2 = p;
        p2.alpha[2] = 0.77;
        p2.alpha[1] = 0.21;
        auto m2 = validate(p2);
        FiniteKernel K(m), K2(m2);
        for (long x1 = 0; x1 <= 5; ++x1)
            for (long x2 = 0; x2 <= 5; ++x2)
                CHECK(std::abs(K({1, x1}, {1, x2}) - K2({1, x1}, {1, x2})) < 1e-12);
    }
}
