#include "nehari/checks.hpp"

#include "nehari/extremal.hpp"
#include "nehari/solver.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>

namespace nehari {

int count_projection_roots(const FiberingData& d, double lambda, int n_pts, double t_lo,
                           double t_hi) {
    const double target = lambda * d.f_int;
    const double log_lo = std::log(t_lo), log_hi = std::log(t_hi);
    int changes = 0;
    double prev = 0.0;
    bool have_prev = false;
    for (int i = 0; i < n_pts; ++i) {
        const double t = std::exp(log_lo + (log_hi - log_lo) * i / (n_pts - 1));
        const double v = eval_fibering(d, 0.0, t).phi - target;
        if (have_prev && v != 0.0 && prev != 0.0 && (v > 0.0) != (prev > 0.0)) ++changes;
        if (v != 0.0) {
            prev = v;
            have_prev = true;
        }
    }
    return changes;
}

FiberingData random_fibering_data(CounterRng& rng, bool degenerate, bool cplus) {
    FiberingData d;
    if (degenerate) {
        d.a = 0.0;
        d.theta = rng.uniform(1.5, 2.5);
        d.gamma = rng.uniform(2.3, 2.0 * d.theta - 0.3);
    } else {
        d.a = std::exp(rng.uniform(-1.0, 1.0));
        d.theta = rng.uniform(1.25, 2.5);
        d.gamma = rng.uniform(1.2, 1.8);
    }
    d.b = std::exp(rng.uniform(-1.0, 1.0));
    d.p = 2.0 * d.theta + rng.uniform(0.5, 3.0);
    d.p2 = std::exp(rng.uniform(-0.7, 0.7));
    d.f_int = std::exp(rng.uniform(-0.7, 0.7));
    d.g_int = cplus ? std::exp(rng.uniform(-1.2, 1.1)) : -std::exp(rng.uniform(-1.2, 1.1));
    return d;
}

namespace {

template <typename F>
CheckResult make_check(const std::string& name, F body) {
    CheckResult r;
    r.name = name;
    try {
        std::ostringstream detail;
        r.ok = body(detail);
        r.detail = detail.str();
    } catch (const std::exception& e) {
        r.ok = false;
        r.detail = std::string("exception: ") + e.what();
    }
    return r;
}

} // namespace

std::vector<CheckResult> run_property_suite(const Discretization& disc,
                                            const ProblemSpec& spec, std::uint64_t seed) {
    std::vector<CheckResult> out;
    const int n = disc.size();

    out.push_back(make_check("stiffness_symmetric", [&](std::ostringstream& os) {
        const double asym = (disc.stiffness() - disc.stiffness().transpose()).cwiseAbs().maxCoeff();
        os << "max |A_ij - A_ji| = " << asym;
        return asym == 0.0;
    }));

    out.push_back(make_check("stiffness_positive_definite", [&](std::ostringstream& os) {
        Eigen::LLT<Eigen::MatrixXd> llt(disc.stiffness());
        bool ok = llt.info() == Eigen::Success;
        CounterRng rng(seed, 1);
        for (int k = 0; k < 20 && ok; ++k) {
            Eigen::VectorXd v(n);
            for (int i = 0; i < n; ++i) v(i) = rng.normal();
            ok = disc.seminorm_sq(v) > 0.0;
        }
        os << "Cholesky " << (ok ? "succeeded" : "failed");
        return ok;
    }));

    out.push_back(make_check("quadrature_weights", [&](std::ostringstream& os) {
        const double sum = disc.quad_weights().sum();
        const double err = std::abs(sum - disc.domain_length()) / disc.domain_length();
        os << "sum = " << sum << ", relative gap to |Omega| = " << err;
        return disc.quad_weights().minCoeff() > 0.0 && err < 1e-12;
    }));

    out.push_back(make_check("parallelogram_law", [&](std::ostringstream& os) {
        CounterRng rng(seed, 2);
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            Eigen::VectorXd u(n), v(n);
            for (int i = 0; i < n; ++i) {
                u(i) = rng.normal();
                v(i) = rng.normal();
            }
            const double lhs = disc.seminorm_sq(u + v) + disc.seminorm_sq(u - v);
            const double rhs = 2.0 * disc.seminorm_sq(u) + 2.0 * disc.seminorm_sq(v);
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
        }
        os << "worst relative defect = " << worst;
        return worst < 1e-12;
    }));

    out.push_back(make_check("seminorm_scaling", [&](std::ostringstream& os) {
        CounterRng rng(seed, 3);
        Eigen::VectorXd u(n);
        for (int i = 0; i < n; ++i) u(i) = rng.normal();
        const double s1 = disc.seminorm_sq((3.0 * u).eval());
        const double s2 = 9.0 * disc.seminorm_sq(u);
        const double err = std::abs(s1 - s2) / std::abs(s2);
        os << "relative defect = " << err;
        return err < 1e-12;
    }));

    out.push_back(make_check("fibering_identities", [&](std::ostringstream& os) {
        CounterRng rng(seed, 4);
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const FiberingData d =
                random_fibering_data(rng, k % 2 == 0, rng.uniform() < 0.7);
            const double lambda = std::exp(rng.uniform(-2.0, 1.0));
            const double t = std::exp(rng.uniform(-2.0, 2.0));
            const FiberingValues v = eval_fibering(d, lambda, t);
            const double id1 = std::abs(v.psi1 - std::pow(t, d.gamma - 1.0) *
                                                     (v.phi - lambda * d.f_int)) /
                               std::max(1.0, std::abs(v.psi1));
            const double id2 = std::abs(v.m - t * t * v.h) / std::max(1.0, std::abs(v.m));
            worst = std::max(worst, std::max(id1, id2));
        }
        os << "worst identity defect = " << worst;
        return worst < 1e-11;
    }));

    out.push_back(make_check("projection_trichotomy", [&](std::ostringstream& os) {
        CounterRng rng(seed, 5);
        int agree = 0, total = 0;
        for (int k = 0; k < 100; ++k) {
            const bool degenerate = k % 2 == 0;
            const bool cplus = rng.uniform() < 0.7;
            const FiberingData d = random_fibering_data(rng, degenerate, cplus);
            double lambda, t_ref;
            int expected;
            if (cplus) {
                const double lam_u = lambda_of_direction(d);
                t_ref = maximizer_of_phi(d);
                if (rng.uniform() < 0.5) {
                    lambda = lam_u * rng.uniform(0.25, 0.85);
                    expected = 2;
                } else {
                    lambda = lam_u * rng.uniform(1.2, 8.0);
                    expected = 0;
                }
            } else {
                t_ref = 1.0;
                lambda = eval_fibering(d, 0.0, rng.uniform(0.5, 2.0)).phi / d.f_int;
                expected = 1;
            }
            const int counted =
                count_projection_roots(d, lambda, 20000, t_ref * 1e-6, t_ref * 1e3);
            const auto pr = project(d, lambda);
            int reported = 0;
            if (pr.branch == ProjectionResult::Branch::TwoRoots) reported = 2;
            if (pr.branch == ProjectionResult::Branch::SingleRoot) reported = 1;
            ++total;
            if (counted == expected && reported == expected) ++agree;
        }
        os << agree << "/" << total << " agree";
        return agree == total;
    }));

    out.push_back(make_check("energy_gradient_fd", [&](std::ostringstream& os) {
        CounterRng rng(seed, 6);
        double worst = 0.0;
        for (int k = 0; k < 10; ++k) {
            Eigen::VectorXd u(n), v(n);
            for (int i = 0; i < n; ++i) {
                u(i) = std::abs(rng.normal()) + 0.05;
                v(i) = rng.normal();
            }
            auto [e0, grad] = disc.energy_and_gradient(spec, u);
            (void)e0;
            const double eps = 1e-6 * u.norm() / v.norm();
            const double fd = (disc.energy(spec, u + eps * v) - disc.energy(spec, u - eps * v)) /
                              (2.0 * eps);
            const double gd = grad.dot(v);
            worst = std::max(worst, std::abs(gd - fd) / std::max(1.0, std::abs(gd)));
        }
        os << "worst relative FD defect = " << worst;
        return worst < 1e-6;
    }));

    out.push_back(make_check("lambda_gradient_euler", [&](std::ostringstream& os) {
        CounterRng rng(seed, 7);
        double worst_fd = 0.0, worst_euler = 0.0;
        int done = 0;
        for (int k = 0; k < 40 && done < 10; ++k) {
            Eigen::VectorXd u = random_start(disc, seed, 100 + k);
            const ScalarTriple tr = disc.reduce(spec, u);
            if (!(tr.g_int > disc.cone_tol())) continue;
            ++done;
            const Eigen::VectorXd grad = direction_gradient_of_lambda(disc, spec, u);
            const double lam = lambda_of_direction(fibering_data(spec, tr));
            worst_euler = std::max(worst_euler, std::abs(grad.dot(u)) / std::abs(lam));
            Eigen::VectorXd v(n);
            for (int i = 0; i < n; ++i) v(i) = rng.normal();
            const double eps = 1e-6 * u.norm() / v.norm();
            auto lam_at = [&](const Eigen::VectorXd& w) {
                return lambda_of_direction(fibering_data(spec, disc.reduce(spec, w)));
            };
            const double fd =
                (lam_at(u + eps * v) - lam_at(u - eps * v)) / (2.0 * eps);
            const double gd = grad.dot(v);
            worst_fd = std::max(worst_fd, std::abs(gd - fd) / std::max(1.0, std::abs(gd)));
        }
        os << "euler defect = " << worst_euler << ", FD defect = " << worst_fd;
        return worst_euler < 1e-8 && worst_fd < 1e-5;
    }));

    out.push_back(make_check("lambda_invariances", [&](std::ostringstream& os) {
        CounterRng rng(seed, 8);
        double worst_hom = 0.0, worst_elim = 0.0, worst_closed = 0.0;
        for (int k = 0; k < 50; ++k) {
            const bool degenerate = k % 2 == 0;
            FiberingData d = random_fibering_data(rng, degenerate, true);
            const double lam = lambda_of_direction(d);
            for (double c : {0.1, 3.0, 10.0}) {
                FiberingData dc = d;
                dc.p2 = c * c * d.p2;
                dc.f_int = std::pow(c, d.gamma) * d.f_int;
                dc.g_int = std::pow(c, d.p) * d.g_int;
                worst_hom = std::max(worst_hom,
                                     std::abs(lambda_of_direction(dc) - lam) / std::abs(lam));
            }
            const double t_ab = maximizer_of_phi(d);
            worst_elim = std::max(
                worst_elim, std::abs(lambda_eliminated_g(d, t_ab) - lam) / std::abs(lam));
            if (degenerate)
                worst_closed =
                    std::max(worst_closed,
                             std::abs(lambda_degenerate_closed_form(d) - lam) / std::abs(lam));
        }
        os << "homogeneity = " << worst_hom << ", eliminated-G = " << worst_elim
           << ", degenerate closed form = " << worst_closed;
        return worst_hom < 1e-10 && worst_elim < 1e-10 && worst_closed < 1e-10;
    }));

    out.push_back(make_check("monotone_projections", [&](std::ostringstream& os) {
        CounterRng rng(seed, 9);
        bool ok = true;
        for (int k = 0; k < 30 && ok; ++k) {
            const FiberingData d = random_fibering_data(rng, k % 2 == 0, true);
            const double lam_u = lambda_of_direction(d);
            const double l1 = 0.3 * lam_u, l2 = 0.6 * lam_u;
            const auto p1 = project(d, l1);
            const auto p2 = project(d, l2);
            ok = p1.branch == ProjectionResult::Branch::TwoRoots &&
                 p2.branch == ProjectionResult::Branch::TwoRoots &&
                 p1.t_minus > p2.t_minus && p1.t_plus < p2.t_plus;
        }
        os << (ok ? "t- decreasing, t+ increasing in lambda" : "monotonicity violated");
        return ok;
    }));

    out.push_back(make_check("rng_determinism", [&](std::ostringstream& os) {
        CounterRng r1(seed, 42), r2(seed, 42);
        bool ok = true;
        for (int i = 0; i < 100; ++i) ok = ok && r1.next_u64() == r2.next_u64();
        Eigen::VectorXd s1 = random_start(disc, seed, 7);
        Eigen::VectorXd s2 = random_start(disc, seed, 7);
        ok = ok && (s1 - s2).cwiseAbs().maxCoeff() == 0.0;
        os << (ok ? "streams reproduce exactly" : "stream mismatch");
        return ok;
    }));

    return out;
}

} // namespace nehari
