#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "nipaths/harness.hpp"
#include "nipaths/io.hpp"
#include "nipaths/tiling.hpp"

using namespace nipaths;

TEST_SUITE("harness")
{
    TEST_CASE("strict decrease with a convergence floor")
    {
        CHECK(strictly_decreasing({0.5, 0.2, 0.1}));
        CHECK_FALSE(strictly_decreasing({0.5, 0.5, 0.1}));
        CHECK_FALSE(strictly_decreasing({0.1, 0.2}));
        CHECK(strictly_decreasing({0.3, 1e-15, 2e-16}));
        CHECK(strictly_decreasing({0.3}));
    }

    TEST_CASE("scaling helpers")
    {
        CHECK(thm3_offset(2, 0.5, 40) == 40);
        CHECK(thm3_offset(3, 0.3, 10) == 9);
        CHECK(thm3_gamma_scale(1, 0.5, 0.6) == doctest::Approx(0.6));
        CHECK(thm3_gamma_scale(2, 0.2, 0.5) == doctest::Approx(0.25));
    }

    TEST_CASE("period detection on synthetic series")
    {
        for (int p : {2, 3, 5}) {
            std::vector<double> s;
            for (int i = 0; i < 200; ++i)
                s.push_back(1.0 / p + (0.1 + 0.002 * i) * std::cos(2 * std::numbers::pi * i / p));
            auto v = detect_period(s, p, 10);
            CHECK(v.detected_period == p);
            CHECK(v.amplitude_variation > 0.05);
        }
        std::vector<double> flat(100, 0.5);
        CHECK(detect_period(flat, 2, 10).detected_period == 0);
    }

    TEST_CASE("k=1 identity in the shifted kernel experiment")
    {
        Prop1Config cfg;
        cfg.k = 1;
        cfg.s_list = {8, 16};
        auto r = prop1_convergence(cfg);
        CHECK(r.pass);
        for (double e : r.errors) CHECK(e <= 1e-9);
    }

    TEST_CASE("reports are independent of the thread count")
    {
        Prop2Config a;
        a.k_list = {5, 10};
        auto b = a;
        b.threads = 3;
        auto ra = prop2_convergence(a), rb = prop2_convergence(b);
        CHECK(ra.errors == rb.errors);
    }

    TEST_CASE("small theorem-three run on the density diagonal")
    {
        Thm3Config cfg;
        cfg.k = 1;
        cfg.alpha = cfg.beta = 0.5;
        cfg.n_list = {8, 16, 32};
        cfg.s_max = 2;
        cfg.ratio_bound = 0.0;
        auto r = thm3_convergence(cfg);
        CHECK(r.pass);
    }
}

TEST_SUITE("io")
{
    TEST_CASE("model JSON")
    {
        auto p = testutil::params({0, 2}, {0.4, 0.6}, {0.35, 0.55});
        auto j = io::model_to_json(p);
        auto q = io::model_from_json(j);
        CHECK(q.k == p.k);
        CHECK(q.alpha == p.alpha);
        CHECK(q.beta == p.beta);
        CHECK(testutil::code_of([] { io::model_from_json(io::json::parse(R"({"n": 2, "k": [0]})")); }) ==
              ErrorCode::InvalidParams);
        CHECK(testutil::code_of([] { io::model_from_json(io::json::parse(R"({"n": "two"})")); }) ==
              ErrorCode::InvalidParams);
    }

    TEST_CASE("config and tiling JSON round trip")
    {
        PathConfig c{{{0, 1, 2, 0, 0}, {2, 3, 3, 3, 1}}};
        CHECK(io::config_from_json(io::config_to_json(c)) == c);
        auto t = paths_to_tiling(c);
        CHECK(io::tiling_from_json(io::tiling_to_json(t)) == t);
    }

    TEST_CASE("17 significant digits round trip")
    {
        for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23}) CHECK(std::stod(io::fmt17(v)) == v);
    }
}
