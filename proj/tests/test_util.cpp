#include <doctest.h>

#include "sgdlab/quadrature.hpp"
#include "sgdlab/rng.hpp"
#include "sgdlab/stats.hpp"

#include <cmath>
#include <numeric>
#include <vector>

using namespace sgdlab;

TEST_SUITE("rng")
{
    TEST_CASE("philox known answers")
    {
        // Reference vectors for philox4x32-10 (Random123 distribution).
        const philox::Block zero = philox::round10({0, 0, 0, 0}, 0, 0);
        CHECK(zero[0] == 0x6627e8d5u);
        CHECK(zero[1] == 0xe169c58du);
        CHECK(zero[2] == 0xbc57ac4cu);
        CHECK(zero[3] == 0x9b00dbd8u);

        const philox::Block ones = philox::round10(
            {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, 0xffffffffu, 0xffffffffu);
        CHECK(ones[0] == 0x408f276du);
        CHECK(ones[1] == 0x41c83b0eu);
        CHECK(ones[2] == 0xa20bc7c6u);
        CHECK(ones[3] == 0x6d5451fdu);
    }

    TEST_CASE("streams are reproducible and independent of draw history")
    {
        StepRng a(42, 7, 3);
        const double x1 = a.uniform01();
        const double x2 = a.uniform01();
        StepRng b(42, 7, 3);
        CHECK(b.uniform01() == x1);
        CHECK(b.uniform01() == x2);
        StepRng c(42, 7, 4);
        CHECK(c.uniform01() != x1);
        StepRng d(43, 7, 3);
        CHECK(d.uniform01() != x1);
    }

    TEST_CASE("uniform and gaussian moments")
    {
        MeanVar u, g;
        for (int i = 0; i < 200000; ++i) {
            StepRng rng(1234, 0, static_cast<std::uint64_t>(i));
            u.add(rng.uniform01());
            g.add(rng.gaussian());
        }
        CHECK(std::abs(u.mean - 0.5) < 4 * u.std_error());
        CHECK(std::abs(u.variance() - 1.0 / 12.0) < 4e-3);
        CHECK(std::abs(g.mean) < 4 * g.std_error());
        CHECK(std::abs(g.variance() - 1.0) < 2e-2);
    }

    TEST_CASE("rademacher is a fair sign")
    {
        long sum = 0;
        for (int i = 0; i < 100000; ++i) {
            StepRng rng(99, 5, static_cast<std::uint64_t>(i));
            sum += rng.rademacher();
        }
        CHECK(std::abs(sum) < 4 * std::sqrt(100000.0));
    }
}

TEST_SUITE("stats")
{
    TEST_CASE("blockwise merge equals serial accumulation")
    {
        std::vector<double> xs;
        for (int i = 0; i < 1000; ++i) xs.push_back(std::sin(0.1 * i) + 0.01 * i);
        MeanVar serial;
        for (double x : xs) serial.add(x);
        MeanVar a, b, c;
        for (int i = 0; i < 300; ++i) a.add(xs[static_cast<std::size_t>(i)]);
        for (int i = 300; i < 777; ++i) b.add(xs[static_cast<std::size_t>(i)]);
        for (int i = 777; i < 1000; ++i) c.add(xs[static_cast<std::size_t>(i)]);
        MeanVar merged = a;
        merged.merge(b);
        merged.merge(c);
        CHECK(merged.n == serial.n);
        CHECK(merged.mean == doctest::Approx(serial.mean).epsilon(1e-13));
        CHECK(merged.variance() == doctest::Approx(serial.variance()).epsilon(1e-12));
    }

    TEST_CASE("ols recovers an exact line and is affine equivariant")
    {
        const std::vector<double> x = {-1, -2, -3, -4};
        std::vector<double> y;
        for (double xi : x) y.push_back(2.0 * xi + 0.5);
        const LineFit fit = ols_line(x, y);
        CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(fit.intercept == doctest::Approx(0.5).epsilon(1e-12));

        // scaling the (linear-domain) errors by c > 0 shifts log-errors; slope unchanged
        std::vector<double> y_scaled = y;
        for (double& v : y_scaled) v += std::log2(7.0);
        CHECK(ols_line(x, y_scaled).slope == doctest::Approx(2.0).epsilon(1e-12));
    }

    TEST_CASE("decay-rate fit recovers the rate of t e^{-t}")
    {
        std::vector<double> t, r;
        for (int i = 2; i <= 10; ++i) {
            t.push_back(i);
            r.push_back(0.7 * i * std::exp(-1.3 * i));
        }
        CHECK(fit_decay_rate(t, r) == doctest::Approx(1.3).epsilon(1e-9));
    }

    TEST_CASE("ks distance of an exact uniform grid is 1/(2n)")
    {
        std::vector<double> s;
        const int n = 100;
        for (int i = 0; i < n; ++i) s.push_back((i + 0.5) / n);
        CHECK(ks_distance_uniform01(s) == doctest::Approx(0.5 / n).epsilon(1e-12));
    }

    TEST_CASE("parallel_blocks covers every block once")
    {
        std::vector<int> hits(257, 0);
        parallel_blocks(257, 4, [&](std::int64_t b) { hits[static_cast<std::size_t>(b)]++; });
        CHECK(std::accumulate(hits.begin(), hits.end(), 0) == 257);
        CHECK(*std::min_element(hits.begin(), hits.end()) == 1);
        CHECK(*std::max_element(hits.begin(), hits.end()) == 1);
    }
}

TEST_SUITE("quadrature")
{
    TEST_CASE("gauss-legendre integrates polynomials exactly")
    {
        const QuadRule& r = gauss_legendre(5);
        double acc = 0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i)
            acc += r.weights[i] * std::pow(r.nodes[i], 8);
        CHECK(acc == doctest::Approx(2.0 / 9.0).epsilon(1e-13)); // int_{-1}^1 x^8
        double w = 0;
        for (double wi : r.weights) w += wi;
        CHECK(w == doctest::Approx(2.0).epsilon(1e-13));
    }

    TEST_CASE("gauss-hermite normalization and moments")
    {
        const QuadRule& r = gauss_hermite(64);
        double m0 = 0, m2 = 0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i) {
            m0 += r.weights[i];
            m2 += r.weights[i] * r.nodes[i] * r.nodes[i];
        }
        CHECK(m0 == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
        CHECK(m2 == doctest::Approx(0.5 * std::sqrt(M_PI)).epsilon(1e-12));
    }

    TEST_CASE("composite rule matches smooth integrals")
    {
        const double v = composite_gauss_legendre(0.0, 2.0, 64, 5,
                                                  [](double s) { return std::exp(-2.0 * s); });
        CHECK(v == doctest::Approx(0.5 * (1.0 - std::exp(-4.0))).epsilon(1e-13));
    }

    TEST_CASE("adaptive gauss-kronrod handles steep inverse-cube integrands")
    {
        // int_a^b dx/x^3 = (a^{-2} - b^{-2})/2 with a near zero
        const double a = 1e-4, b = 1.5;
        const double v = adaptive_gauss_kronrod(a, b, 1e-14, 1e-11,
                                                [](double x) { return 1.0 / (x * x * x); });
        const double exact = 0.5 * (1.0 / (a * a) - 1.0 / (b * b));
        CHECK(v == doctest::Approx(exact).epsilon(1e-9));
        // orientation flips the sign
        const double vr = adaptive_gauss_kronrod(b, a, 1e-14, 1e-11,
                                                 [](double x) { return 1.0 / (x * x * x); });
        CHECK(vr == doctest::Approx(-exact).epsilon(1e-9));
    }
}
