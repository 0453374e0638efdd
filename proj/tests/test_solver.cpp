#include "nehari/solver.hpp"
#include "nehari/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace nehari;

namespace {

ProblemSpec degenerate_spec(int n = 64) {
    ProblemSpec s;
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

// lambda* of the default problems, computed once
struct Fixture {
    Discretization disc;
    double lambda_star;
    Fixture(const ProblemSpec& spec)
        : disc(Discretization::build(spec)),
          lambda_star(estimate_lambda_star(disc, spec, 8, 0).lambda_star) {}
};

const Fixture& degenerate_fixture() {
    static Fixture f(degenerate_spec());
    return f;
}

const Fixture& nondegenerate_fixture() {
    static Fixture f(nondegenerate_spec());
    return f;
}

} // namespace

TEST_CASE("two branches below the threshold on the degenerate default") {
    const Fixture& fx = degenerate_fixture();
    ProblemSpec spec = degenerate_spec();
    spec.lambda = 0.5 * fx.lambda_star;

    auto [minus, plus] = solve_pair(fx.disc, spec, 8, 0);

    CHECK(plus.energy < 0.0);
    CHECK(minus.psi2_at_1 < 0.0);
    CHECK(plus.psi2_at_1 > 0.0);
    CHECK(minus.residual_norm < 1e-8);
    CHECK(plus.residual_norm < 1e-8);
    CHECK(discrete_l2_distance(fx.disc, minus.u.coeffs, plus.u.coeffs) > 1e-3);

    for (const NehariSolution* s : {&minus, &plus}) {
        CHECK(s->u.coeffs.minCoeff() >= -1e-12);
        CHECK(s->u.coeffs(fx.disc.size() / 2) > 0.0);  // positive at the center node
        const VerificationReport rep = verify_solution(fx.disc, spec, *s);
        CHECK(rep.all_ok());
    }
}

TEST_CASE("minimize_branch near the threshold keeps the branch signatures") {
    const Fixture& fx = degenerate_fixture();
    ProblemSpec spec = degenerate_spec();
    spec.lambda = 0.9 * fx.lambda_star;

    auto [minus, plus] = solve_pair(fx.disc, spec, 8, 0);
    CHECK(plus.energy < 0.0);
    CHECK(minus.residual_norm < 1e-8);
    CHECK(minus.psi2_at_1 < 0.0);
    REQUIRE(minus.lambda_of_dir.has_value());
    CHECK(spec.lambda < *minus.lambda_of_dir);
}

TEST_CASE("two branches on the non-degenerate default") {
    const Fixture& fx = nondegenerate_fixture();
    ProblemSpec spec = nondegenerate_spec();
    spec.lambda = 0.5 * fx.lambda_star;

    // hypothesis of the non-degenerate theorem: g = 1 - 2x^2 < 0 near +-1
    const auto& g = fx.disc.g_nodes();
    CHECK(g(0) < 0.0);
    CHECK(g(1) < 0.0);
    CHECK(g(fx.disc.size() - 1) < 0.0);
    CHECK(g(fx.disc.size() - 2) < 0.0);

    auto [minus, plus] = solve_pair(fx.disc, spec, 8, 0);
    CHECK(plus.energy < 0.0);
    CHECK(minus.psi2_at_1 < 0.0);
    CHECK(minus.residual_norm < 1e-8);
    CHECK(plus.residual_norm < 1e-8);
    CHECK(discrete_l2_distance(fx.disc, minus.u.coeffs, plus.u.coeffs) > 1e-3);
    for (const NehariSolution* s : {&minus, &plus}) {
        CHECK(s->u.coeffs.minCoeff() >= -1e-12);
        CHECK(s->u.coeffs.maxCoeff() > 0.0);
    }
}

TEST_CASE("branch energies decrease along a lambda sweep") {
    const Fixture& fx = degenerate_fixture();
    double prev_minus = 0.0, prev_plus = 0.0;
    for (int k = 1; k <= 9; ++k) {
        ProblemSpec spec = degenerate_spec();
        spec.lambda = k / 10.0 * fx.lambda_star;
        auto [minus, plus] = solve_pair(fx.disc, spec, 6, 0);
        if (k > 1) {
            CHECK(minus.energy < prev_minus);
            CHECK(plus.energy < prev_plus);
        }
        prev_minus = minus.energy;
        prev_plus = plus.energy;
    }
}

TEST_CASE("projections of a fixed admissible direction are monotone in lambda") {
    const Fixture& fx = degenerate_fixture();
    const ProblemSpec spec = degenerate_spec();
    const Eigen::VectorXd w = random_start(fx.disc, 7, 71);
    const FiberingData d = fibering_data(spec, fx.disc.reduce(spec, w));
    REQUIRE(d.g_int > 0.0);
    REQUIRE(lambda_of_direction(d) > 0.9 * fx.lambda_star);

    double prev_tm = 1e300, prev_tp = 0.0;
    for (int k = 1; k <= 9; ++k) {
        const auto pr = project(d, k / 10.0 * fx.lambda_star);
        REQUIRE(pr.branch == ProjectionResult::Branch::TwoRoots);
        CHECK(pr.t_minus < prev_tm);
        CHECK(pr.t_plus > prev_tp);
        prev_tm = pr.t_minus;
        prev_tp = pr.t_plus;
    }
}

TEST_CASE("N- iterates respect the admissible cone") {
    const Fixture& fx = degenerate_fixture();
    ProblemSpec spec = degenerate_spec();
    spec.lambda = 0.5 * fx.lambda_star;
    auto [minus, plus] = solve_pair(fx.disc, spec, 4, 1);
    (void)plus;
    REQUIRE(minus.lambda_of_dir.has_value());
    CHECK(spec.lambda < *minus.lambda_of_dir);
}

TEST_CASE("solved minima are lower bounds over random admissible directions") {
    const Fixture& fx = degenerate_fixture();
    ProblemSpec spec = degenerate_spec();
    spec.lambda = 0.5 * fx.lambda_star;
    auto [minus, plus] = solve_pair(fx.disc, spec, 8, 0);

    int n_minus = 0, n_plus = 0;
    for (int k = 0; k < 3000 && (n_minus < 1000 || n_plus < 1000); ++k) {
        const Eigen::VectorXd w = random_start(fx.disc, 555, 9000 + k);
        const FiberingData d = fibering_data(spec, fx.disc.reduce(spec, w));
        const bool cplus = classify_cone(d.g_int, fx.disc.cone_tol()) == ConeTag::CPlus;
        if (cplus && spec.lambda < lambda_of_direction(d)) {
            const auto pr = project(d, spec.lambda);
            if (pr.branch == ProjectionResult::Branch::TwoRoots) {
                if (n_minus < 1000) {
                    CHECK(eval_fibering(d, spec.lambda, pr.t_minus).psi >=
                          minus.energy - 1e-9 * std::abs(minus.energy));
                    ++n_minus;
                }
                if (n_plus < 1000) {
                    CHECK(eval_fibering(d, spec.lambda, pr.t_plus).psi >=
                          plus.energy - 1e-9 * std::abs(plus.energy));
                    ++n_plus;
                }
            }
        } else if (!cplus) {
            const auto pr = project(d, spec.lambda, 1e-9, fx.disc.cone_tol());
            if (pr.branch == ProjectionResult::Branch::SingleRoot && n_plus < 1000) {
                CHECK(eval_fibering(d, spec.lambda, pr.t_plus).psi >=
                      plus.energy - 1e-9 * std::abs(plus.energy));
                ++n_plus;
            }
        }
    }
    CHECK(n_minus == 1000);
    CHECK(n_plus >= 900);  // C- samples are rare under the default weights
}

TEST_CASE("boundedness bound: Kirchhoff growth is dominated on the N+ branch") {
    const Fixture& fx = degenerate_fixture();
    ProblemSpec spec = degenerate_spec();
    spec.lambda = 0.5 * fx.lambda_star;
    auto [minus, plus] = solve_pair(fx.disc, spec, 4, 0);
    (void)minus;

    const double crit = spec.critical_exponent();
    const double S = estimate_embedding_constant(fx.disc, crit);
    const double fq = fx.disc.lp_norm(fx.disc.f_nodes(), crit / (crit - spec.gamma));
    auto bound_holds = [&](const Eigen::VectorXd& v) {
        const double norm_x = std::sqrt(fx.disc.seminorm_sq(v));
        const double lhs = spec.a * (spec.p - 2.0) * norm_x * norm_x +
                           spec.b * (spec.p - 2.0 * spec.theta) *
                               std::pow(norm_x, 2.0 * spec.theta);
        const double rhs = spec.lambda * (spec.p - spec.gamma) *
                           std::pow(S, -spec.gamma / 2.0) * fq *
                           std::pow(norm_x, spec.gamma);
        return lhs < rhs;
    };
    CHECK(bound_holds(plus.u.coeffs));

    // random N+ projections satisfy it as well
    int done = 0;
    for (int k = 0; k < 300 && done < 50; ++k) {
        const Eigen::VectorXd w = random_start(fx.disc, 77, 300 + k);
        const FiberingData d = fibering_data(spec, fx.disc.reduce(spec, w));
        if (!(d.g_int > fx.disc.cone_tol()) || !(spec.lambda < lambda_of_direction(d)))
            continue;
        const auto pr = project(d, spec.lambda);
        if (pr.branch != ProjectionResult::Branch::TwoRoots) continue;
        CHECK(bound_holds((pr.t_plus * w).eval()));
        ++done;
    }
    CHECK(done == 50);
}

TEST_CASE("continuation approaches the extremal value with a guarded N- limit") {
    const Fixture& fx = degenerate_fixture();
    const ProblemSpec spec = degenerate_spec();
    const ContinuationResult res =
        continuation_at_extremal(fx.disc, spec, fx.lambda_star, 48, 6, 0);

    REQUIRE(res.steps.size() == 48);
    for (std::size_t i = 0; i + 1 < res.steps.size(); ++i) {
        CHECK(res.steps[i + 1].energy_minus <= res.steps[i].energy_minus + 1e-9);
        CHECK(res.steps[i + 1].energy_plus <= res.steps[i].energy_plus + 1e-9);
    }
    CHECK(res.last_cauchy_minus < 1e-6);
    CHECK(res.last_cauchy_plus < 1e-6);
    CHECK(res.psi2_separation > 0.0);
    CHECK(res.rel_gap_minus > 0.0);
    CHECK_FALSE(res.tangency_warning);

    ProblemSpec final_spec = spec;
    final_spec.lambda = res.steps.back().lambda;
    for (const NehariSolution* s : {&res.minus, &res.plus})
        CHECK(verify_solution(fx.disc, final_spec, *s).all_ok());

    SUBCASE("warm and cold solves agree at the final step") {
        auto [cold_minus, cold_plus] = solve_pair(fx.disc, final_spec, 8, 5);
        CHECK(std::abs(cold_minus.energy - res.minus.energy) <=
              1e-6 * std::abs(res.minus.energy));
        CHECK(std::abs(cold_plus.energy - res.plus.energy) <=
              1e-6 * std::abs(res.plus.energy));
    }
}

TEST_CASE("restricted minimization continues both branches past the extremal value") {
    const Fixture& fx = degenerate_fixture();
    const ProblemSpec spec = degenerate_spec();
    const ContinuationResult base =
        continuation_at_extremal(fx.disc, spec, fx.lambda_star, 12, 6, 0);
    const RestrictedSetParams params =
        RestrictedSetParams::defaults_from(base.minus, base.plus, fx.lambda_star);

    ProblemSpec beyond = spec;
    beyond.lambda = fx.lambda_star * (1.0 + 1e-3);
    const BeyondResult res = solve_beyond_extremal(fx.disc, beyond, params, base, fx.lambda_star);

    CHECK(res.minus.residual_norm < 1e-8);
    CHECK(res.plus.residual_norm < 1e-8);
    CHECK(res.margin_minus >= params.delta_margin);
    CHECK(res.margin_plus >= params.delta_margin);
    CHECK(res.minus.psi2_at_1 < 0.0);
    CHECK(res.plus.psi2_at_1 > 0.0);

    SUBCASE("shrinking the window tenfold keeps the problem solvable") {
        RestrictedSetParams tight = params;
        tight.epsilon *= 0.1;
        tight.delta_margin *= 0.1;
        ProblemSpec close = spec;
        close.lambda = fx.lambda_star * (1.0 + 1e-4);
        const BeyondResult res2 =
            solve_beyond_extremal(fx.disc, close, tight, base, fx.lambda_star);
        CHECK(res2.minus.residual_norm < 1e-8);
        CHECK(res2.plus.residual_norm < 1e-8);
    }
    SUBCASE("lambda outside the window is a domain error") {
        ProblemSpec outside = spec;
        outside.lambda = fx.lambda_star * 1.5;
        CHECK_THROWS_AS(
            (void)solve_beyond_extremal(fx.disc, outside, params, base, fx.lambda_star),
            std::domain_error);
    }
}

TEST_CASE("verification report flags injected faults") {
    const Fixture& fx = degenerate_fixture();
    ProblemSpec spec = degenerate_spec();
    spec.lambda = 0.5 * fx.lambda_star;
    auto [minus, plus] = solve_pair(fx.disc, spec, 4, 0);
    (void)plus;

    SUBCASE("the zero vector is rejected") {
        NehariSolution zero = minus;
        zero.u.coeffs.setZero();
        zero.u.cache.reset();
        const VerificationReport rep = verify_solution(fx.disc, spec, zero);
        CHECK_FALSE(rep.nonzero_ok);
        CHECK_FALSE(rep.all_ok());
    }
    SUBCASE("a negated nodal value breaks nonnegativity") {
        NehariSolution bad = minus;
        bad.u.coeffs(fx.disc.size() / 2) *= -1.0;
        bad.u.cache.reset();
        const VerificationReport rep = verify_solution(fx.disc, spec, bad);
        CHECK_FALSE(rep.nonneg_ok);
        CHECK_FALSE(rep.all_ok());
    }
    SUBCASE("the genuine solution passes") {
        CHECK(verify_solution(fx.disc, spec, minus).all_ok());
    }
}

TEST_CASE("solver preconditions are enforced") {
    const Fixture& fx = degenerate_fixture();
    ProblemSpec spec = degenerate_spec();
    spec.lambda = 0.5 * fx.lambda_star;

    SUBCASE("C- starts cannot target the N- branch") {
        ProblemSpec sp = degenerate_spec();
        sp.lambda = 0.5 * fx.lambda_star;
        sp.g_weight = WeightDescriptor::quadratic(-0.5, 0.0, 1.0);
        Discretization disc2 = Discretization::build(sp);
        Eigen::VectorXd u(disc2.size());
        const double mid = 0.5 * (disc2.x_min() + disc2.x_max());
        for (int i = 0; i < disc2.size(); ++i)
            u(i) = std::max(0.0, 0.5 - std::abs(disc2.nodes()[i] - mid));
        REQUIRE(disc2.reduce(sp, u).g_int < 0.0);
        CHECK_THROWS_WITH_AS((void)minimize_branch(disc2, sp, Branch::NMinus, u),
                             doctest::Contains("C- start"), std::invalid_argument);
    }
    SUBCASE("lambda above the direction threshold is inadmissible") {
        const Eigen::VectorXd w = random_start(fx.disc, 7, 71);
        const double lam_w =
            lambda_of_direction(fibering_data(spec, fx.disc.reduce(spec, w)));
        ProblemSpec high = spec;
        high.lambda = 2.0 * lam_w;
        CHECK_THROWS_WITH_AS((void)minimize_branch(fx.disc, high, Branch::NMinus, w),
                             doctest::Contains("inadmissible"), std::invalid_argument);
    }
    SUBCASE("the non-degenerate solve demands g < 0 near the boundary") {
        ProblemSpec nd = nondegenerate_spec();
        nd.lambda = 1.0;
        nd.g_weight = WeightDescriptor::constant(1.0);  // violates the hypothesis
        Discretization disc2 = Discretization::build(nd);
        CHECK_THROWS_WITH_AS((void)solve_pair(disc2, nd, 2, 0),
                             doctest::Contains("g < 0 near the boundary"),
                             std::invalid_argument);
    }
    SUBCASE("restricted-set parameters are validated") {
        RestrictedSetParams p;
        p.c_minus = 1.0;
        p.c_plus = 2.0;  // violates c+ < c-
        p.epsilon = 0.1;
        p.delta_margin = 0.01;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
}

TEST_CASE("the collapse-detector auxiliary function vanishes only at t = 1") {
    // m(t) = (2p-2theta-2) t^{gamma-p} + (gamma-p) t^{2-p}
    //        + (gamma-p) t^{2theta-p} + 2 - 2 gamma + 2 theta
    auto device = [](double th, double ga, double p, double t) {
        return (2.0 * p - 2.0 * th - 2.0) * std::pow(t, ga - p) +
               (ga - p) * std::pow(t, 2.0 - p) + (ga - p) * std::pow(t, 2.0 * th - p) +
               2.0 - 2.0 * ga + 2.0 * th;
    };
    for (auto [th, ga, p] : {std::tuple{2.0, 3.0, 5.0}, std::tuple{2.0, 1.5, 5.0},
                             std::tuple{1.5, 2.5, 4.0}}) {
        CHECK(std::abs(device(th, ga, p, 1.0)) < 1e-12);
        int sign_changes = 0;
        double prev = device(th, ga, p, 0.05);
        for (int i = 1; i <= 4000; ++i) {
            const double t = 0.05 * std::pow(400.0, i / 4000.0);  // log grid to 20
            const double v = device(th, ga, p, t);
            if (std::abs(t - 1.0) < 2e-3) continue;  // skip the known root's band
            if ((v > 0.0) != (prev > 0.0)) ++sign_changes;
            prev = v;
        }
        CHECK(sign_changes == 0);  // no zero besides t = 1
    }
}
