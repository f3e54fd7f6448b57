#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "nipaths/quadrature.hpp"
#include "nipaths/series.hpp"

using namespace nipaths;
using doctest::Approx;

TEST_SUITE("series")
{
    TEST_CASE("complete homogeneous polynomials")
    {
        CHECK(complete_homogeneous(0, {0.3, 0.7}) == 1.0);
        CHECK(complete_homogeneous(1, {0.3, 0.7}) == Approx(1.0).epsilon(1e-15));
        CHECK(complete_homogeneous(2, {0.5}) == Approx(0.25).epsilon(1e-15));
        CHECK(complete_homogeneous(-1, {0.5}) == 0.0);
        // reference values computed with exact rational series expansion
        CHECK(complete_homogeneous(5, {0.3, 0.5, 0.7}) == Approx(0.83685).epsilon(1e-14));
        CHECK(complete_homogeneous(4, {1.0 / 2, 1.0 / 3}) == Approx(211.0 / 1296).epsilon(1e-14));
        auto seq = homogeneous_sequence(6, {0.3, 0.5, 0.7});
        CHECK(seq.size() == 7);
        CHECK(seq[5] == Approx(0.83685).epsilon(1e-14));
    }

    TEST_CASE("alternants")
    {
        CHECK(alternant({0}, {0.7}).value == 1.0);
        CHECK(alternant({0, 1}, {0.2, 0.5}).value == Approx(0.3).epsilon(1e-14));
        CHECK(alternant({0, 3}, {0.2, 0.5}).value == Approx(0.117).epsilon(1e-14));
        // exact rational determinant of [g^e] for g = 1/2, 1/3, 1/5 and e = 0, 2, 5
        CHECK(alternant({0, 2, 5}, {0.5, 1.0 / 3, 0.2}).value == Approx(-71.0 / 50625).epsilon(1e-12));
    }

    TEST_CASE("substituted alternant vanishes at the other betas")
    {
        auto p1 = substituted_alternant({0}, {0.4}, 1);
        CHECK(evaluate(p1, 0.9) == Approx(1.0));

        auto p = substituted_alternant({0, 2}, {0.3, 0.6}, 2);
        CHECK(std::abs(evaluate(p, 0.3)) < 1e-14);
        CHECK(std::abs(evaluate(p, 0.6)) > 1e-3);

        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(0.1, 0.9);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> beta{u(rng), u(rng), u(rng)};
            std::vector<int> ex{0, 1 + trial % 3, 4 + trial % 2};
            for (int j = 1; j <= 3; ++j) {
                auto q = substituted_alternant(ex, beta, j);
                for (int l = 1; l <= 3; ++l)
                    if (l != j) CHECK(std::abs(evaluate(q, beta[l - 1])) < 1e-10);
            }
        }
        CHECK(testutil::code_of([] { substituted_alternant({0, 1}, {0.5, 0.5}, 1); }) ==
              ErrorCode::DegenerateBeta);
    }

    TEST_CASE("polynomial times geometric coefficients")
    {
        CHECK(coeff_of_poly_times_geometric({1.0}, {0.5}, 3) == Approx(0.125));
        CHECK(coeff_of_poly_times_geometric({0.0, 0.0, 1.0}, {0.3, 0.6}, 1) == 0.0);
        CHECK(std::abs(coeff_of_poly_times_geometric({1.0, -1.0}, {1.0}, 5)) < 1e-15);
    }

    TEST_CASE("Laurent coefficients agree with a direct double sum")
    {
        std::vector<double> up{0.5, 0.4}, down{0.3, 0.6};
        for (long d = -4; d <= 4; ++d) {
            double direct = 0.0;
            for (long n = 0; n < 200; ++n) {
                long m = n + d;
                if (m < 0) continue;
                direct += complete_homogeneous(m, up) * complete_homogeneous(n, down);
            }
            CHECK(laurent_coefficient(up, down, d) == Approx(direct).epsilon(1e-13));
        }
        CHECK(laurent_coefficient({0.5}, {}, 3) == Approx(0.125));
        CHECK(laurent_coefficient({}, {0.5}, -2) == Approx(0.25));
        CHECK(laurent_coefficient({}, {0.5}, 1) == 0.0);
    }
}

TEST_SUITE("quadrature")
{
    constexpr double pi = std::numbers::pi;

    TEST_CASE("arc integrals with closed forms")
    {
        auto r = arc_integral([](cplx z) { return 1.0 / z; }, arc_for_spacing(1), 1e-13);
        CHECK(std::abs(r.value - cplx(1.0, 0.0)) < 1e-12);

        for (int k : {2, 3, 5}) {
            auto arc = arc_for_spacing(k);
            auto one = arc_integral([](cplx) { return cplx(1.0, 0.0); }, arc, 1e-13);
            cplx zs = std::polar(1.0, -pi / k), ze = std::polar(1.0, pi / k);
            CHECK(std::abs(one.value - (ze - zs) / cplx(0.0, 2.0 * pi)) < 1e-13);
            for (int m : {-3, -1, 1, 2, 4}) {
                auto v = arc_integral([m](cplx z) { return std::pow(z, -(m + 1)); }, arc, 1e-13);
                CHECK(std::abs(v.value - std::sin(pi * m / k) / (pi * m)) < 1e-12);
            }
        }
        auto a = arc_for_spacing(4, 0.5);
        CHECK(a.half_angle == Approx(pi / 4));
        CHECK(a.radius == 0.5);
    }

    TEST_CASE("circle integrals and residues")
    {
        cplx c(0.3, 0.1);
        CircleSpec circ{{0.0, 0.0}, 1.0};
        CHECK(std::abs(circle_integral([c](cplx w) { return 1.0 / (w - c); }, circ).value - 1.0) < 1e-12);
        CHECK(std::abs(circle_integral([c](cplx w) { return 1.0 / ((w - c) * (w - c)); }, circ).value) < 1e-12);

        double beta = 0.4;
        for (int n = 1; n <= 4; ++n)
            for (int x = 0; x <= 8; ++x) {
                auto f = [=](cplx w) { return std::pow(w, x) / std::pow(w - beta, n); };
                auto r = circle_integral(f, CircleSpec{{beta, 0.0}, 0.3}, 1e-13);
                double expect = 0.0;
                if (x >= n - 1) {
                    double binom = 1.0;
                    for (int i = 0; i < n - 1; ++i) binom = binom * (x - i) / (i + 1);
                    expect = binom * std::pow(beta, x - n + 1);
                }
                CHECK(std::abs(r.value - expect) < 1e-11);
            }
    }

    TEST_CASE("circle integral is independent of radius inside the annulus")
    {
        auto f = [](cplx w) { return std::pow(w, 3) / ((w - 0.4) * (w - 0.4)); };
        auto a = circle_integral(f, CircleSpec{{0.0, 0.0}, 0.6}, 1e-13);
        auto b = circle_integral(f, CircleSpec{{0.0, 0.0}, 2.0}, 1e-13);
        CHECK(std::abs(a.value - b.value) < 1e-11);
        CHECK(std::abs(a.value - 3.0 * 0.16) < 1e-11);
    }

    TEST_CASE("Gauss-Legendre rule integrates polynomials exactly")
    {
        const auto& g = gauss_legendre(8);
        double s = 0.0;
        for (size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], 14);
        CHECK(s == Approx(2.0 / 15).epsilon(1e-14));
    }
}
