#include <doctest.h>

#include "sgdlab/examples.hpp"
#include "sgdlab/sgd.hpp"

#include <cmath>

using namespace sgdlab;

namespace {

// Exact E_x[sin(X_n)] for the affine chain of example1:
// X_n = m_n - (eta/2) sum (1-eta)^j xi, with independent signs, so the
// characteristic function factors into a product of cosines.
double exact_sin_expectation_example1(double x, double eta, int n)
{
    const double m = 0.5 + std::pow(1.0 - eta, n) * (x - 0.5);
    double prod = 1.0;
    for (int j = 0; j < n; ++j) prod *= std::cos(0.5 * eta * std::pow(1.0 - eta, j));
    return std::sin(m) * prod;
}

TestFunction sin_phi() { return observable("sin", make_example1()); }

} // namespace

TEST_SUITE("sgd")
{
    TEST_CASE("single steps")
    {
        const Family f1 = make_example1();
        CHECK(sgd_step(f1, 1.0, 0.1, +1.0) == doctest::Approx(0.9).epsilon(1e-15));
        CHECK(sgd_step(f1, 0.37, 0.0, -1.0) == doctest::Approx(0.37).epsilon(1e-15));
        const Family f2 = make_example2();
        CHECK(sgd_step(f2, 0.0, 0.1, -1.0) == doctest::Approx(0.05).epsilon(1e-15));
    }

    TEST_CASE("empty trajectory returns the start point")
    {
        ChainConfig cfg;
        cfg.n_steps = 0;
        cfg.x0 = 1.25;
        CHECK(run_trajectory(make_example1(), cfg, 0).x_final == 1.25);
    }

    TEST_CASE("trajectory equals a straight-line recursion on the same stream")
    {
        const Family fam = make_example1();
        ChainConfig cfg;
        cfg.eta = 0.25;
        cfg.n_steps = 4;
        cfg.x0 = 1.0;
        cfg.seed = 7;
        const double got = run_trajectory(fam, cfg, 0).x_final;
        double x = 1.0;
        for (int k = 0; k < 4; ++k) {
            StepRng rng(7, 0, static_cast<std::uint64_t>(k));
            const double xi = rng.rademacher();
            x = x - cfg.eta * (x - 0.5 + 0.5 * xi);
        }
        CHECK(got == x); // bit-identical
    }

    TEST_CASE("mc_estimate of a constant observable")
    {
        TestFunction c;
        c.name = "const";
        c.phi = [](double) { return 3.25; };
        ChainConfig cfg;
        cfg.eta = 0.1;
        cfg.n_steps = 5;
        cfg.x0 = 1.0;
        const McResult r = mc_estimate(make_example1(), cfg, c, 100);
        CHECK(r.estimate.value == doctest::Approx(3.25));
        CHECK(r.estimate.std_error == 0.0);
        CHECK(r.estimate.n_samples == 100);
    }

    TEST_CASE("frozen chain at eta = 0")
    {
        ChainConfig cfg;
        cfg.eta = 0.0;
        cfg.n_steps = 50;
        cfg.x0 = 0.8;
        const McResult r = mc_estimate(make_example1(), cfg, sin_phi(), 64);
        CHECK(r.estimate.value == doctest::Approx(std::sin(0.8)).epsilon(1e-15));
    }

    TEST_CASE("enumeration oracle agrees with the closed-form expectation")
    {
        const Family fam = make_example1();
        for (int n : {1, 5, 12}) {
            const double enumerated =
                enumerate_expectation(fam, 1.0, 0.25, n, [](double v) { return std::sin(v); });
            CHECK(enumerated ==
                  doctest::Approx(exact_sin_expectation_example1(1.0, 0.25, n)).epsilon(1e-13));
        }
    }

    TEST_CASE("mc_estimate matches exhaustive enumeration within 4 standard errors")
    {
        const Family fam = make_example1();
        const int n = 12;
        ChainConfig cfg;
        cfg.eta = 0.25;
        cfg.n_steps = n;
        cfg.x0 = 1.0;
        cfg.seed = 2718;
        const double exact =
            enumerate_expectation(fam, 1.0, 0.25, n, [](double v) { return std::sin(v); });
        McOptions opts;
        opts.threads = 2;
        const McResult mc = mc_estimate(fam, cfg, sin_phi(), 200000, opts);
        CHECK(std::abs(mc.estimate.value - exact) <= 4.0 * mc.estimate.std_error);

        McOptions anti = opts;
        anti.antithetic = true;
        const McResult mca = mc_estimate(fam, cfg, sin_phi(), 200000, anti);
        CHECK(std::abs(mca.estimate.value - exact) <= 4.0 * mca.estimate.std_error);
        // the antithetic pairing should strictly reduce the noise here
        CHECK(mca.estimate.std_error < mc.estimate.std_error);
    }

    TEST_CASE("results are bit-identical across worker counts")
    {
        const Family fam = make_example2();
        ChainConfig cfg;
        cfg.eta = 0.125;
        cfg.n_steps = 40;
        cfg.x0 = 1.0;
        cfg.seed = 99;
        McOptions one;
        one.threads = 1;
        McOptions four;
        four.threads = 4;
        const McResult a = mc_estimate(fam, cfg, sin_phi(), 20000, one);
        const McResult b = mc_estimate(fam, cfg, sin_phi(), 20000, four);
        CHECK(a.estimate.value == b.estimate.value);
        CHECK(a.estimate.std_error == b.estimate.std_error);
    }

    TEST_CASE("one-step estimator is sup-norm nonexpansive under enumeration")
    {
        const Family fam = make_example1();
        const double eta = 0.2;
        const std::vector<double> points = {-2.0, -0.5, 0.5, 1.0, 3.0};
        double max_estimate = 0.0, max_reachable = 0.0;
        for (double x : points) {
            max_estimate = std::max(
                max_estimate,
                std::abs(enumerate_expectation(fam, x, eta, 1,
                                               [](double v) { return std::sin(v); })));
            for (const auto& [atom, p] : fam.support)
                max_reachable =
                    std::max(max_reachable, std::abs(std::sin(sgd_step_atom(fam, x, eta, atom))));
        }
        CHECK(max_estimate <= max_reachable + 1e-15);
    }

    TEST_CASE("confinement: no trajectory leaves the certified ball")
    {
        const Family fam = make_example1();
        const ConvexityCertificate cert = certify(fam, 3.0, 3.0);
        // exhaustive over all sign sequences, n <= 12, from center and boundary
        for (double x0 : {0.5, 3.5, -2.5, 2.0}) {
            const double worst = enumerate_max_excursion(fam, x0, cert.eta0, 12, 0.5);
            CHECK(worst <= 3.0 + 1e-12);
        }
        // statistical run with the escape counter at a longer horizon
        ChainConfig cfg;
        cfg.eta = cert.eta0;
        cfg.n_steps = 400;
        cfg.x0 = 3.2;
        cfg.seed = 321;
        cfg.track_ball = true;
        cfg.ball_center = 0.5;
        cfg.ball_radius = 3.0;
        const McResult r = mc_estimate(fam, cfg, sin_phi(), 10000);
        CHECK(r.escape_count == 0);
    }

    TEST_CASE("coupled chains: identical starts stay identical")
    {
        const auto d = coupled_pair(make_example2(), 0.1, 0.4, 0.4, 20, 100, 5);
        for (const auto& e : d) CHECK(e.value == 0.0);
    }

    TEST_CASE("coupled chains contract deterministically on the affine example")
    {
        const double eta = 0.2, y0 = 2.0, z0 = -1.0;
        const auto d = coupled_pair(make_example1(), eta, y0, z0, 15, 100, 17);
        for (int k = 0; k <= 15; ++k) {
            const double expect = std::pow(1.0 - eta, 2 * k) * (y0 - z0) * (y0 - z0);
            CHECK(d[static_cast<std::size_t>(k)].value == doctest::Approx(expect).epsilon(1e-12));
            CHECK(d[static_cast<std::size_t>(k)].std_error <= 1e-12);
        }
        // and exactly under enumeration, stepwise
        const auto exact = enumerate_coupled_sqdist(make_example1(), y0, z0, eta, 10);
        for (int k = 0; k < 10; ++k)
            CHECK(exact[static_cast<std::size_t>(k) + 1] ==
                  doctest::Approx((1.0 - eta) * (1.0 - eta) * exact[static_cast<std::size_t>(k)])
                      .epsilon(1e-13));
    }

    TEST_CASE("coupled contraction bound holds for example2")
    {
        const Family fam = make_example2();
        const LocalConstants c = registry_get("example2").constants; // gamma=0.4, L=1.6 on B(0,1)
        const double eta = 0.1, y0 = 0.5, z0 = -0.5;
        const double rho2 = 1.0 - 2.0 * c.gamma * eta + eta * eta * c.L * c.L;
        const auto d = coupled_pair(fam, eta, y0, z0, 40, 20000, 77);
        for (int k = 1; k <= 40; ++k) {
            const double bound = std::pow(rho2, k) * (y0 - z0) * (y0 - z0);
            const auto& e = d[static_cast<std::size_t>(k)];
            CHECK(e.value <= bound + 4.0 * e.std_error);
        }
    }

    TEST_CASE("stationary sampling basics")
    {
        const Family fam = make_example1();
        const auto frozen = stationary_sample(fam, 0.0, 25, 10, 4, 0.3);
        for (double s : frozen) CHECK(s == 0.3);

        const auto samples = stationary_sample(fam, 0.3, 120, 40000, 123, 1.0);
        MeanVar mv;
        for (double s : samples) mv.add(s);
        CHECK(std::abs(mv.mean - 0.5) <= 4.0 * mv.std_error());

        // at eta = 1/2 the stationary law is Uniform[0,1]
        const auto unif = stationary_sample(fam, 0.5, 100, 20000, 9, 1.0);
        CHECK(ks_distance_uniform01(unif) <= 0.02);
    }

    TEST_CASE("initial-measure sampling matches the mixture of point starts")
    {
        const Family fam = make_example1();
        ChainConfig cfg;
        cfg.eta = 0.25;
        cfg.n_steps = 10;
        cfg.seed = 5;
        InitialMeasure mu0;
        mu0.atoms = {0.25, 0.75};
        mu0.weights = {1.0, 1.0};
        const double exact =
            0.5 * (enumerate_expectation(fam, 0.25, 0.25, 10, [](double v) { return std::sin(v); }) +
                   enumerate_expectation(fam, 0.75, 0.25, 10, [](double v) { return std::sin(v); }));
        const McResult r = mc_estimate_measure(fam, cfg, mu0, sin_phi(), 200000);
        CHECK(std::abs(r.estimate.value - exact) <= 4.0 * r.estimate.std_error);
    }

    TEST_CASE("minibatch noise drives the chain")
    {
        std::vector<Component> comps;
        for (double a : {-1.0, 0.0, 1.0}) {
            comps.push_back({[a](double x) { return 0.5 * (x - a) * (x - a); },
                             [a](double x) { return x - a; }, [](double) { return 1.0; }});
        }
        const Family fam = make_minibatch_family(comps, 2, 0.0);
        ChainConfig cfg;
        cfg.eta = 0.2;
        cfg.n_steps = 6;
        cfg.x0 = 1.0;
        cfg.seed = 11;
        const double exact =
            enumerate_expectation(fam, 1.0, 0.2, 6, [](double v) { return v * v; });
        const McResult r = mc_estimate(fam, cfg, observable("square", fam), 100000);
        CHECK(std::abs(r.estimate.value - exact) <= 4.0 * r.estimate.std_error);
    }
}
