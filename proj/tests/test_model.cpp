#include <doctest.h>

#include "sgdlab/examples.hpp"
#include "sgdlab/model.hpp"

#include <cmath>

using namespace sgdlab;

namespace {

// Test-only oracle: central finite difference with h = 1e-5 max(1,|x|).
double central_fd(const ScalarFn& f, double x)
{
    const double h = 1e-5 * std::max(1.0, std::abs(x));
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

double exact_mean_grad(const Family& fam, double x)
{
    double acc = 0;
    for (const auto& [atom, p] : fam.support) acc += p * fam.grad_atom(x, atom);
    return acc;
}

} // namespace

TEST_SUITE("model")
{
    TEST_CASE("example1 values")
    {
        const Family fam = make_example1();
        CHECK(fam.grad_xi(1.0, +1.0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(exact_mean_grad(fam, 0.0) == doctest::Approx(-0.5).epsilon(1e-15));
        CHECK(fam.sigma(0.0) == doctest::Approx(0.25));
        CHECK(fam.sigma(17.3) == doctest::Approx(0.25));
        CHECK(fam.objective.minimizer == doctest::Approx(0.5));
        CHECK(fam.objective.d1(fam.objective.minimizer) == doctest::Approx(0.0).epsilon(1e-15));
    }

    TEST_CASE("example2 values")
    {
        const Family fam = make_example2();
        CHECK(fam.objective.d1(1.0) == doctest::Approx(1.3).epsilon(1e-15));
        CHECK(fam.objective.d1(0.0) == doctest::Approx(0.0));
        CHECK(fam.objective.d2(0.0) == doctest::Approx(1.0));
        CHECK(fam.objective.d3(0.7) == doctest::Approx(0.6));
        CHECK(fam.sigma(2.0) == doctest::Approx(0.25));
    }

    TEST_CASE("gradients match finite differences at random points")
    {
        for (const std::string& id : registry_ids()) {
            const RegistryEntry& entry = registry_get(id);
            const Family& fam = entry.family;
            for (int i = 0; i < 20; ++i) {
                StepRng rng(2024, 0, static_cast<std::uint64_t>(i));
                const double x =
                    fam.objective.minimizer + entry.R * (2.0 * rng.uniform01() - 1.0);
                const double fd = central_fd(fam.objective.f, x);
                const double an = fam.objective.d1(x);
                CHECK(std::abs(an - fd) <= 1e-5 * std::max(1.0, std::abs(an)));
                const double fd2 = central_fd(fam.objective.d1, x);
                CHECK(std::abs(fam.objective.d2(x) - fd2) <=
                      1e-5 * std::max(1.0, std::abs(fd2)));
            }
        }
    }

    TEST_CASE("enumerable unbiasedness is exact at random points")
    {
        for (const std::string& id : {"example1", "example2"}) {
            const Family fam = registry_get(id).family;
            for (int i = 0; i < 50; ++i) {
                StepRng rng(77, 1, static_cast<std::uint64_t>(i));
                const double x = 6.0 * rng.uniform01() - 3.0;
                CHECK(exact_mean_grad(fam, x) ==
                      doctest::Approx(fam.objective.d1(x)).epsilon(1e-13));
            }
        }
    }

    TEST_CASE("observable derivatives match finite differences")
    {
        const Family fam = make_example1();
        for (const std::string& name : observable_names()) {
            const TestFunction t = observable(name, fam);
            for (int i = 0; i < 20; ++i) {
                StepRng rng(606, 0, static_cast<std::uint64_t>(i));
                const double x = 6.0 * rng.uniform01() - 3.0;
                const double fd = central_fd(t.phi, x);
                CHECK(std::abs(t.d1(x) - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
            }
        }
    }

    TEST_CASE("sigma is nonnegative on the working ball")
    {
        for (const std::string& id : registry_ids()) {
            const RegistryEntry& e = registry_get(id);
            for (int i = 0; i <= 40; ++i) {
                const double x = e.family.objective.minimizer + e.R * (i / 20.0 - 1.0);
                CHECK(e.family.sigma(x) >= 0.0);
            }
        }
    }

    TEST_CASE("certify example1 at R=3")
    {
        const ConvexityCertificate c = certify(make_example1(), 3.0, 3.0);
        CHECK(c.gamma == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(c.b == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(c.L == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(c.R0 == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
        // min{1/2, 9/4, 3/26}
        CHECK(c.eta0 == doctest::Approx(3.0 / 26.0).epsilon(1e-12));
        CHECK_FALSE(c.b_estimated);
    }

    TEST_CASE("certify rejects radii at or below R0")
    {
        CHECK_THROWS_WITH_AS(certify(make_example1(), 2.0, 3.0), "radius too small",
                             CertifyError);
    }

    TEST_CASE("noiseless family degenerates two eta0 branches")
    {
        const Family fam = make_noiseless(make_example1());
        const ConvexityCertificate c = certify(fam, 3.0, 3.0);
        CHECK(c.b == 0.0);
        CHECK(c.R0 == 0.0);
        CHECK(c.eta0 == doctest::Approx(0.5).epsilon(1e-12));
    }

    TEST_CASE("example2 cannot be certified and reports why")
    {
        // gamma on B(0,1) is 0.4 so R0 = 20/3 exceeds R; on large balls the
        // sampled Hessian goes nonpositive.
        CHECK_THROWS_WITH_AS(certify(make_example2(), 1.0, 1.5), "radius too small",
                             CertifyError);
        CHECK_THROWS_WITH_AS(certify(make_example2(), 2.0, 2.0),
                             "not locally strongly convex", CertifyError);
        const RegistryEntry& e = registry_get("example2");
        CHECK_FALSE(e.certificate.has_value());
        CHECK(e.constants.gamma == doctest::Approx(0.4).epsilon(1e-12));
        CHECK(e.constants.L == doctest::Approx(1.6).epsilon(1e-12));
        CHECK(e.note.find("radius") != std::string::npos);
    }

    TEST_CASE("eta0 is monotone nonincreasing in b over the certifiable range")
    {
        for (int i = 0; i < 200; ++i) {
            StepRng rng(5150, 0, static_cast<std::uint64_t>(i));
            const double gamma = 0.1 + 2.0 * rng.uniform01();
            const double R = 0.5 + 4.0 * rng.uniform01();
            // R0(b) < R requires b < 3 gamma R / 16
            const double b_cap = 3.0 * gamma * R / 16.0;
            double b1 = b_cap * rng.uniform01();
            double b2 = b_cap * rng.uniform01();
            if (b1 > b2) std::swap(b1, b2);
            CHECK(confinement_eta0(gamma, b2, R) <= confinement_eta0(gamma, b1, R) + 1e-15);
        }
    }

    TEST_CASE("recentering moves the minimizer to the origin and nothing else")
    {
        const Family fam = make_example1();
        const Family rec = recenter(fam);
        CHECK(rec.objective.minimizer == 0.0);
        CHECK(rec.objective.f(0.3) == doctest::Approx(fam.objective.f(0.8)).epsilon(1e-15));
        CHECK(rec.grad_xi(0.0, 1.0) == doctest::Approx(fam.grad_xi(0.5, 1.0)).epsilon(1e-15));
        CHECK(rec.char_intercept(1.0, 2.0) ==
              doctest::Approx(fam.char_intercept(1.5, 2.0) - 0.5).epsilon(1e-14));
    }

    TEST_CASE("minibatch family: exact unbiasedness and covariance")
    {
        // four quadratic components centered at -1.5, -0.5, 0.5, 1.5
        std::vector<Component> comps;
        for (double a : {-1.5, -0.5, 0.5, 1.5}) {
            comps.push_back({[a](double x) { return 0.5 * (x - a) * (x - a); },
                             [a](double x) { return x - a; }, [](double) { return 1.0; }});
        }
        const Family fam = make_minibatch_family(comps, 2, 0.0);
        CHECK(fam.support.size() == 6); // C(4,2)
        for (double x : {-1.0, 0.0, 0.4, 2.0}) {
            CHECK(exact_mean_grad(fam, x) == doctest::Approx(x).epsilon(1e-13));
            // population variance 1.25, batch 2 of 4 without replacement
            double var = 0;
            for (const auto& [atom, p] : fam.support) {
                const double d = fam.grad_atom(x, atom) - x;
                var += p * d * d;
            }
            CHECK(fam.sigma(x) == doctest::Approx(var).epsilon(1e-12));
            CHECK(fam.sigma(x) == doctest::Approx(1.25 / 2.0 * 2.0 / 3.0).epsilon(1e-12));
        }
        // draws produce valid distinct indices
        StepRng rng(31, 2, 9);
        const NoiseAtom atom = fam.draw_atom(rng);
        REQUIRE(atom.batch.size() == 2);
        CHECK(atom.batch[0] != atom.batch[1]);
        CHECK(atom.batch[0] >= 0);
        CHECK(atom.batch[0] < 4);
    }

    TEST_CASE("registry lists the three example families")
    {
        CHECK(registry_has("example1"));
        CHECK(registry_has("example2"));
        CHECK(registry_has("ou"));
        const RegistryEntry& e1 = registry_get("example1");
        REQUIRE(e1.certificate.has_value());
        CHECK(e1.certificate->eta0 == doctest::Approx(3.0 / 26.0));
        CHECK(registry_get("ou").constants.b_estimated);
        CHECK_THROWS_AS(registry_get("nonsense"), std::invalid_argument);
    }

    TEST_CASE("vector view is consistent and symmetric")
    {
        const VecObjective v = as_vec(make_example2().objective);
        Eigen::VectorXd x(1);
        x[0] = 0.7;
        CHECK(v.grad(x)[0] == doctest::Approx(0.7 + 0.3 * 0.49).epsilon(1e-14));
        const Eigen::MatrixXd h = v.hess(x);
        CHECK((h - h.transpose()).norm() <= 1e-12);
    }
}
