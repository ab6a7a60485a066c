#include <doctest.h>

#include "sgdlab/analysis.hpp"
#include "sgdlab/examples.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace sgdlab;

namespace {

// Brute-force optimal assignment between equal-size sample sets.
double w2_bruteforce(std::vector<double> a, std::vector<double> b)
{
    std::vector<std::size_t> perm(b.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double acc = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[perm[i]];
            acc += d * d;
        }
        best = std::min(best, acc);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::sqrt(best / static_cast<double>(a.size()));
}

} // namespace

TEST_SUITE("analysis")
{
    TEST_CASE("w2 basic identities")
    {
        CHECK(w2_empirical_1d({1.0, 2.0, 3.0}, {3.0, 1.0, 2.0}) == doctest::Approx(0.0));
        CHECK(w2_empirical_1d({0.0}, {1.0}) == doctest::Approx(1.0));
        CHECK(w2_empirical_1d({0.0, 2.0}, {1.0, 3.0}) == doctest::Approx(1.0));
        CHECK(w2_bruteforce({0.0, 2.0}, {1.0, 3.0}) == doctest::Approx(1.0));
    }

    TEST_CASE("sorted coupling equals brute-force assignment for small sets")
    {
        for (int trial = 0; trial < 50; ++trial) {
            StepRng rng(515, 0, static_cast<std::uint64_t>(trial));
            const std::size_t n = 2 + rng.below(5); // 2..6
            std::vector<double> a(n), b(n);
            for (std::size_t i = 0; i < n; ++i) {
                a[i] = 4.0 * rng.uniform01() - 2.0;
                b[i] = 4.0 * rng.uniform01() - 2.0;
            }
            CHECK(w2_empirical_1d(a, b) == doctest::Approx(w2_bruteforce(a, b)).epsilon(1e-12));
        }
    }

    TEST_CASE("unequal sizes resample deterministically")
    {
        // resampling a duplicated set changes nothing
        const std::vector<double> a = {0.0, 1.0, 2.0, 3.0};
        const std::vector<double> a2 = {0.0, 0.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0};
        CHECK(w2_empirical_1d(a, a2) == doctest::Approx(0.0));
        CHECK(w2_empirical_1d(a2, a) == w2_empirical_1d(a, a2));
    }

    TEST_CASE("synthetic quadratic errors fit slope two exactly")
    {
        std::vector<double> lx, ly;
        for (double eta : {0.5, 0.25, 0.125, 0.0625}) {
            lx.push_back(std::log2(eta));
            ly.push_back(std::log2(0.037 * eta * eta));
        }
        const LineFit fit = ols_line(lx, ly);
        CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(fit.slope_ci95 <= 1e-9);
    }

    TEST_CASE("weak-error experiment structure and reproducibility")
    {
        const RegistryEntry& e = registry_get("example1");
        const TestFunction phi = observable("sin", e.family);
        McOptions opts;
        opts.threads = 2;
        opts.antithetic = true;
        const std::vector<double> grid = {0.5, 0.25};
        const WeakErrorCurve a = weak_error_experiment(e.family, phi, 1.0, 5.0, grid, 40000,
                                                       2026, opts, e.certificate->eta0);
        const WeakErrorCurve b = weak_error_experiment(e.family, phi, 1.0, 5.0, grid, 40000,
                                                       2026, opts, e.certificate->eta0);
        REQUIRE(a.points.size() == 2);
        CHECK(a.points[0].n == 10);
        CHECK(a.points[1].n == 20);
        CHECK(a.points[0].outside_certificate); // 1/2 > 3/26
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(a.points[i].mc_value == b.points[i].mc_value);
            CHECK(a.points[i].error == b.points[i].error);
        }
        CHECK_THROWS_AS(weak_error_experiment(e.family, phi, 1.0, 5.0, {0.25, 0.5}, 100, 1, opts),
                        std::invalid_argument);
    }

    TEST_CASE("uniformity at eta = 0 gives zero errors everywhere")
    {
        const RegistryEntry& e = registry_get("example1");
        const TestFunction phi = observable("sin", e.family);
        const UniformityResult r =
            uniformity_check(e.family, phi, 0.8, 0.0, {1, 5, 20}, 1000, 7);
        CHECK(r.max_error == 0.0);
        CHECK(r.no_trend);
        CHECK(r.no_growth_after_reference);
    }

    TEST_CASE("uniformity run reports rows and flags")
    {
        const RegistryEntry& e = registry_get("example1");
        const TestFunction phi = observable("sin", e.family);
        McOptions opts;
        opts.threads = 2;
        opts.antithetic = true;
        const UniformityResult r =
            uniformity_check(e.family, phi, 1.0, 0.125, {1, 20, 200}, 200000, 31, opts);
        REQUIRE(r.rows.size() == 4); // reference n = 40 inserted
        CHECK(r.rows[2].n == 40);
        CHECK(r.rows[2].is_reference);
        CHECK(r.reference_error > 0.0);
        CHECK(r.no_growth_after_reference);
    }

    TEST_CASE("w2 decay: affine chains give exactly translated laws")
    {
        const RegistryEntry& e = registry_get("example1");
        const double eta = 0.2;
        const W2DecayCurve c = w2_decay_experiment(e.family, eta, 1.5, -0.5, {0, 1, 2, 5, 10},
                                                   4000, 99, e.certificate->gamma,
                                                   e.certificate->L);
        for (std::size_t j = 0; j < c.n_grid.size(); ++j) {
            const double expect = std::pow(1.0 - eta, static_cast<double>(c.n_grid[j])) * 2.0;
            CHECK(c.w2_values[j] == doctest::Approx(expect).epsilon(1e-10));
        }
        CHECK(c.rho_ref == doctest::Approx(std::sqrt(1.0 - 2.0 * eta + eta * eta)).epsilon(1e-12));
    }

    TEST_CASE("w2 decay on example2 is at least as fast as the contraction bound")
    {
        const RegistryEntry& e = registry_get("example2");
        const W2DecayCurve c = w2_decay_experiment(e.family, 0.1, 0.8, -0.8, {0, 5, 10, 20, 30},
                                                   20000, 17, e.constants.gamma, e.constants.L);
        CHECK(c.fitted_log_rate <= std::log(c.rho_ref) + 0.01);
    }

    TEST_CASE("identical starts give w2 at the monte carlo resolution")
    {
        const RegistryEntry& e = registry_get("example2");
        const W2DecayCurve c = w2_decay_experiment(e.family, 0.1, 0.4, 0.4, {0, 10}, 4000, 3,
                                                   e.constants.gamma, e.constants.L);
        for (double v : c.w2_values) CHECK(v <= 1.0 / std::sqrt(4000.0));
    }

    TEST_CASE("descent time: noiseless chains contract deterministically")
    {
        const Family fam = make_noiseless(make_example1());
        const DescentResult r = descent_time_experiment(fam, {0.25, 0.125}, 100, 5, 2.0);
        for (const auto& row : r.rows) {
            const double contraction =
                std::pow(1.0 - row.eta, 2.0 * static_cast<double>(row.n_star));
            const double gap0 = 0.5 * 1.5 * 1.5; // f(2) - f(1/2) for the quadratic
            CHECK(row.f_gap == doctest::Approx(contraction * gap0).epsilon(1e-10));
            CHECK(row.f_gap <= row.eta * row.eta * gap0 * 1.75);
        }
    }

    TEST_CASE("descent time: example1 gap scales linearly in eta")
    {
        const Family fam = make_example1();
        McOptions opts;
        opts.threads = 2;
        const DescentResult r =
            descent_time_experiment(fam, {0.25, 0.125, 0.0625}, 40000, 12, 1.0, opts);
        CHECK(r.ratio_spread < 3.0);
        // long after n* the gap has stabilized near the stationary level
        ChainConfig cfg;
        cfg.eta = 0.25;
        cfg.x0 = 1.0;
        cfg.seed = 12;
        cfg.n_steps = 4 * r.rows[0].n_star;
        const TestFunction phi = observable("f", fam);
        const McResult late = mc_estimate(fam, cfg, phi, 40000, opts);
        const double late_gap = late.estimate.value - fam.objective.f(0.5);
        CHECK(std::abs(late_gap - r.rows[0].f_gap) <=
              0.35 * r.rows[0].f_gap + 8.0 * late.estimate.std_error);
    }
}
