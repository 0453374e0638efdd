#include "nehari/discretization.hpp"
#include "nehari/extremal.hpp"
#include "nehari/rng.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace nehari;

namespace {

ProblemSpec degenerate_spec(int n = 64) {
    ProblemSpec s;  // a=0, b=1, theta=2, gamma=3, p=5, s=0.4, (-1,1), f=1, g=1-2x^2
    s.domain.n_interior = n;
    return s;
}

ProblemSpec nondegenerate_spec(int n = 64) {
    ProblemSpec s;
    s.a = 1.0;
    s.gamma = 1.5;
    s.domain.n_interior = n;
    return s;
}

Eigen::VectorXd random_vector(int n, std::uint64_t stream) {
    CounterRng rng(7, stream);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.normal();
    return v;
}

double interpolant_seminorm(int n, double s_frac) {
    ProblemSpec spec = degenerate_spec(n);
    spec.s = s_frac;
    Discretization disc = Discretization::build(spec);
    Eigen::VectorXd u(n);
    for (int i = 0; i < n; ++i) {
        const double x = disc.nodes()[i];
        u(i) = std::max(0.0, 1.0 - x * x);
    }
    return disc.seminorm_sq(u);
}

} // namespace

TEST_CASE("stiffness matrix is symmetric and positive definite") {
    for (int n : {3, 64}) {
        Discretization disc = Discretization::build(degenerate_spec(n));
        const auto& A = disc.stiffness();
        CHECK(A.rows() == n);
        CHECK((A - A.transpose()).cwiseAbs().maxCoeff() == 0.0);

        Eigen::VectorXd e0 = Eigen::VectorXd::Zero(n);
        e0(0) = 1.0;
        CHECK(disc.seminorm_sq(e0) > 0.0);
        for (int k = 0; k < 20; ++k)
            CHECK(disc.seminorm_sq(random_vector(n, 10 + k)) > 0.0);
    }
}

TEST_CASE("zero function has zero seminorm and zero weighted integrals") {
    ProblemSpec spec = degenerate_spec();
    Discretization disc = Discretization::build(spec);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(disc.size());
    const ScalarTriple t = disc.reduce(spec, zero);
    CHECK(t.p2 == 0.0);
    CHECK(t.f_int == 0.0);
    CHECK(t.g_int == 0.0);
}

TEST_CASE("quadrature weights are positive and sum to |Omega|") {
    Discretization disc = Discretization::build(degenerate_spec());
    CHECK(disc.quad_weights().minCoeff() > 0.0);
    CHECK(std::abs(disc.quad_weights().sum() - disc.domain_length()) <=
          1e-12 * disc.domain_length());
}

TEST_CASE("seminorm scales quadratically") {
    Discretization disc = Discretization::build(degenerate_spec());
    const Eigen::VectorXd u = random_vector(disc.size(), 3);
    const double s1 = disc.seminorm_sq((3.0 * u).eval());
    const double s2 = 9.0 * disc.seminorm_sq(u);
    CHECK(std::abs(s1 - s2) <= 1e-12 * std::abs(s2));
}

TEST_CASE("parallelogram law holds to machine precision") {
    Discretization disc = Discretization::build(degenerate_spec());
    for (int k = 0; k < 20; ++k) {
        const Eigen::VectorXd u = random_vector(disc.size(), 100 + k);
        const Eigen::VectorXd v = random_vector(disc.size(), 200 + k);
        const double lhs = disc.seminorm_sq(u + v) + disc.seminorm_sq(u - v);
        const double rhs = 2.0 * disc.seminorm_sq(u) + 2.0 * disc.seminorm_sq(v);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("single-hat seminorm matches the double-integral quadrature oracle") {
    // spacing 1/32 on (-1,1) means 63 interior nodes; hat at the center node
    ProblemSpec spec = degenerate_spec(63);
    Discretization disc = Discretization::build(spec);
    REQUIRE(disc.spacing() == doctest::Approx(1.0 / 32.0).epsilon(1e-14));
    const int mid = 31;
    Eigen::VectorXd hat = Eigen::VectorXd::Zero(63);
    hat(mid) = 1.0;
    const double computed = disc.seminorm_sq(hat);

    const double h = disc.spacing();
    const double c = disc.nodes()[mid];
    auto f = [&](double x) { return std::max(0.0, 1.0 - std::abs(x - c) / h); };
    const double brute =
        oracle::gagliardo_seminorm_sq(f, c - h, c + h, spec.s, 600);
    CHECK(std::abs(computed - brute) / brute < 0.02);
    // frozen reference from an independent adaptive integrator
    CHECK(computed == doctest::Approx(2.8162564378).epsilon(1e-4));
}

TEST_CASE("mesh refinement of a fixed profile is Cauchy and approaches the oracle") {
    const double s_frac = 0.4;
    const double s32 = interpolant_seminorm(32, s_frac);
    const double s64 = interpolant_seminorm(64, s_frac);
    const double s128 = interpolant_seminorm(128, s_frac);
    const double d1 = std::abs(s64 - s32);
    const double d2 = std::abs(s128 - s64);
    CHECK(d2 < d1);

    auto profile = [](double x) { return std::max(0.0, 1.0 - x * x); };
    const double truth = oracle::gagliardo_seminorm_sq(profile, -1.0, 1.0, s_frac, 500);
    CHECK(std::abs(s128 - truth) < std::abs(s32 - truth));
    CHECK(std::abs(s128 - truth) / truth < 0.01);
}

TEST_CASE("weighted power integral reproduces the exact hat value for q=2") {
    ProblemSpec spec = degenerate_spec();
    Discretization disc = Discretization::build(spec);
    Eigen::VectorXd hat = Eigen::VectorXd::Zero(disc.size());
    hat(disc.size() / 2) = 1.0;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(disc.size());
    const double v = disc.weighted_power_integral(ones, hat, 2.0);
    CHECK(v == doctest::Approx(2.0 * disc.spacing() / 3.0).epsilon(1e-14));
}

TEST_CASE("weighted power integral matches refined quadrature") {
    ProblemSpec spec = degenerate_spec();
    Discretization disc = Discretization::build(spec);
    const Eigen::VectorXd u = Eigen::VectorXd::Ones(disc.size());

    SUBCASE("integer power q=3 against the sign-changing weight") {
        const double coarse = disc.weighted_power_integral(disc.g_nodes(), u, 3.0);
        const double fine =
            oracle::refined_weighted_power_integral(disc, disc.g_nodes(), u, 3.0, 10);
        CHECK(std::abs(coarse - fine) / std::abs(fine) < 1e-4);
    }
    SUBCASE("fractional power q=2.5") {
        const double coarse = disc.weighted_power_integral(disc.f_nodes(), u, 2.5);
        const double fine =
            oracle::refined_weighted_power_integral(disc, disc.f_nodes(), u, 2.5, 10);
        CHECK(std::abs(coarse - fine) / std::abs(fine) < 1e-4);
    }
}

TEST_CASE("energy vanishes at zero and equals the fibering value along rays") {
    ProblemSpec spec = degenerate_spec();
    spec.lambda = 0.35;
    Discretization disc = Discretization::build(spec);
    CHECK(disc.energy(spec, Eigen::VectorXd::Zero(disc.size())) == 0.0);

    const Eigen::VectorXd u = random_vector(disc.size(), 5).cwiseAbs();
    const ScalarTriple tr = disc.reduce(spec, u);
    const FiberingData d = fibering_data(spec, tr);
    const double t = 0.7;
    const double lhs = disc.energy(spec, (t * u).eval());
    const double rhs = eval_fibering(d, spec.lambda, t).psi;
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
}

TEST_CASE("energy gradient agrees with central finite differences in both regimes") {
    for (bool degenerate : {true, false}) {
        ProblemSpec spec = degenerate ? degenerate_spec() : nondegenerate_spec();
        spec.lambda = 0.8;
        Discretization disc = Discretization::build(spec);
        const int n = disc.size();
        for (int k = 0; k < 20; ++k) {
            Eigen::VectorXd u = random_vector(n, 300 + k).cwiseAbs();
            u.array() += 0.05;  // keep away from the gamma<2 kink
            const Eigen::VectorXd v = random_vector(n, 400 + k);
            auto [e, grad] = disc.energy_and_gradient(spec, u);
            (void)e;
            const double eps = 1e-6 * u.norm() / v.norm();
            const double fd = oracle::directional_derivative(
                [&](const Eigen::VectorXd& w) { return disc.energy(spec, w); }, u, v, eps);
            CHECK(std::abs(grad.dot(v) - fd) / std::max(1.0, std::abs(grad.dot(v))) < 1e-6);
        }
    }
}

TEST_CASE("weak residual is the energy gradient and satisfies the ray identity") {
    ProblemSpec spec = degenerate_spec();
    spec.lambda = 0.6;
    Discretization disc = Discretization::build(spec);
    const Eigen::VectorXd u = random_vector(disc.size(), 9).cwiseAbs();

    auto [r, rnorm] = disc.weak_residual(spec, u);
    auto [e, grad] = disc.energy_and_gradient(spec, u);
    (void)e;
    CHECK((r - grad).cwiseAbs().maxCoeff() == 0.0);
    CHECK(rnorm == doctest::Approx(r.norm() / std::sqrt(double(disc.size()))));

    // u . r(u) = psi'_{lambda,u}(1)
    const FiberingData d = fibering_data(spec, disc.reduce(spec, u));
    const double psi1 = eval_fibering(d, spec.lambda, 1.0).psi1;
    const double scale = std::max(1.0, std::abs(psi1));
    CHECK(std::abs(u.dot(r) - psi1) <= 1e-10 * scale);
}

TEST_CASE("ray identity at a scaled argument with lambda = 0") {
    ProblemSpec spec = degenerate_spec();
    spec.lambda = 0.0;
    Discretization disc = Discretization::build(spec);
    const Eigen::VectorXd u = random_vector(disc.size(), 11).cwiseAbs();
    const Eigen::VectorXd u2 = 2.0 * u;

    auto [r2, rn2] = disc.weak_residual(spec, u2);
    (void)rn2;
    const FiberingData d2 = fibering_data(spec, disc.reduce(spec, u2));
    const double psi1 = eval_fibering(d2, spec.lambda, 1.0).psi1;
    CHECK(std::abs(u2.dot(r2) - psi1) <= 1e-12 * std::max(1.0, std::abs(psi1)));
}

TEST_CASE("configuration errors name the violated constraint") {
    SUBCASE("degenerate regime requires 2 < gamma < 2 theta") {
        ProblemSpec s = degenerate_spec();
        s.gamma = 1.5;
        CHECK_THROWS_WITH_AS(Discretization::build(s),
                             doctest::Contains("2 < gamma < 2*theta"), std::invalid_argument);
    }
    SUBCASE("non-degenerate regime requires 1 < gamma < 2") {
        ProblemSpec s = nondegenerate_spec();
        s.gamma = 3.0;
        CHECK_THROWS_WITH_AS(Discretization::build(s),
                             doctest::Contains("1 < gamma < 2"), std::invalid_argument);
    }
    SUBCASE("fractional order must sit below one half") {
        ProblemSpec s = degenerate_spec();
        s.s = 0.6;
        CHECK_THROWS_WITH_AS(Discretization::build(s), doctest::Contains("0 < s < 1/2"),
                             std::invalid_argument);
    }
    SUBCASE("p must stay subcritical") {
        ProblemSpec s = degenerate_spec();
        s.s = 0.05;  // critical exponent 2/(1-0.1) = 2.22 < p
        CHECK_THROWS_WITH_AS(Discretization::build(s), doctest::Contains("2N/(N-2s)"),
                             std::invalid_argument);
    }
    SUBCASE("f must be strictly positive") {
        ProblemSpec s = degenerate_spec();
        s.f_weight = WeightDescriptor::quadratic(0.0, 1.0, 0.0);  // f(x) = x
        CHECK_THROWS_WITH_AS(Discretization::build(s), doctest::Contains("assumption (F)"),
                             std::invalid_argument);
    }
    SUBCASE("g must be positive somewhere") {
        ProblemSpec s = degenerate_spec();
        s.g_weight = WeightDescriptor::constant(-1.0);
        CHECK_THROWS_WITH_AS(Discretization::build(s), doctest::Contains("assumption (G)"),
                             std::invalid_argument);
    }
    SUBCASE("dimension mismatches are shape errors") {
        Discretization disc = Discretization::build(degenerate_spec());
        Eigen::VectorXd bad = Eigen::VectorXd::Zero(disc.size() + 1);
        CHECK_THROWS_AS((void)disc.seminorm_sq(bad), std::invalid_argument);
    }
}
