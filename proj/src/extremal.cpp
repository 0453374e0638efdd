#include "nehari/extremal.hpp"

#include "nehari/rng.hpp"

#include <cmath>
#include <future>
#include <stdexcept>

namespace nehari {

FiberingData fibering_data(const ProblemSpec& spec, const ScalarTriple& t) {
    FiberingData d;
    d.a = spec.a;
    d.b = spec.b;
    d.theta = spec.theta;
    d.gamma = spec.gamma;
    d.p = spec.p;
    d.p2 = t.p2;
    d.f_int = t.f_int;
    d.g_int = t.g_int;
    return d;
}

Eigen::VectorXd random_start(const Discretization& disc, std::uint64_t seed,
                             std::uint64_t stream) {
    CounterRng rng(seed, stream);
    const int n = disc.size();
    Eigen::VectorXd u(n);
    const double mid = 0.5 * (disc.x_min() + disc.x_max());
    const double half = 0.5 * disc.domain_length();
    for (int i = 0; i < n; ++i) {
        const double xi = (disc.nodes()[i] - mid) / half;     // in (-1, 1)
        u(i) = rng.uniform(0.05, 1.0) * (1.0 - xi * xi);
    }
    u /= std::sqrt(disc.seminorm_sq(u));
    return u;
}

Eigen::VectorXd direction_gradient_of_lambda(const Discretization& disc,
                                             const ProblemSpec& spec,
                                             const Eigen::VectorXd& u) {
    const ScalarTriple tr = disc.reduce(spec, u);
    if (!(tr.g_int > disc.cone_tol()))
        throw std::domain_error(
            "direction_gradient_of_lambda requires a C+ direction (int g |u|^p > 0)");
    const FiberingData d = fibering_data(spec, tr);
    const double t = maximizer_of_phi(d);
    const double lam = eval_fibering(d, 0.0, t).phi / d.f_int;

    // phi = a t^(2-ga) P2 + b t^(2th-ga) P2^th - t^(p-ga) G, t held fixed
    const double dphi_dp2 = spec.a * std::pow(t, 2.0 - spec.gamma) +
                            spec.b * spec.theta * std::pow(t, 2.0 * spec.theta - spec.gamma) *
                                std::pow(tr.p2, spec.theta - 1.0);
    const double dphi_dg = -std::pow(t, spec.p - spec.gamma);

    const Eigen::VectorXd grad_p2 = 2.0 * (disc.stiffness() * u);
    const Eigen::VectorXd grad_f =
        spec.gamma * disc.weighted_power_form(disc.f_nodes(), u, spec.gamma);
    const Eigen::VectorXd grad_g = spec.p * disc.weighted_power_form(disc.g_nodes(), u, spec.p);

    return (dphi_dp2 / tr.f_int) * grad_p2 + (dphi_dg / tr.f_int) * grad_g -
           (lam / tr.f_int) * grad_f;
}

namespace {

struct StartOutcome {
    double value = 0.0;
    Eigen::VectorXd minimizer;
    std::vector<std::pair<int, double>> history;
    bool converged = false;
};

// Damped Newton on grad lambda(u) = 0 with a finite-difference Jacobian.
// Zero-homogeneity makes the sphere-constrained minimizer an unconstrained
// critical point of lambda, so the full gradient vanishes there.
Eigen::VectorXd polish_minimizer(const Discretization& disc, const ProblemSpec& spec,
                                 Eigen::VectorXd u) {
    const int n = disc.size();
    const double cone_tol = disc.cone_tol();
    auto grad_of = [&](const Eigen::VectorXd& v) {
        return direction_gradient_of_lambda(disc, spec, v);
    };

    Eigen::VectorXd g = grad_of(u);
    for (int it = 0; it < 30; ++it) {
        const double gn = g.norm();
        if (gn < 1e-12) break;
        Eigen::MatrixXd hess(n, n);
        const double eps = 1e-7;
        for (int j = 0; j < n; ++j) {
            Eigen::VectorXd up = u;
            up(j) += eps;
            if (!(disc.reduce(spec, up).g_int > cone_tol)) {
                up(j) -= 2.0 * eps;
                hess.col(j) = (g - grad_of(up)) / eps;
            } else {
                hess.col(j) = (grad_of(up) - g) / eps;
            }
        }
        hess = 0.5 * (hess + hess.transpose()).eval();
        bool improved = false;
        double mu = 0.0;
        for (int trial_damp = 0; trial_damp < 6 && !improved; ++trial_damp) {
            Eigen::MatrixXd lhs = hess;
            if (mu > 0.0) lhs += mu * Eigen::MatrixXd::Identity(n, n);
            const Eigen::VectorXd delta = lhs.partialPivLu().solve(-g);
            if (delta.allFinite()) {
                double alpha = 1.0;
                for (int ls = 0; ls < 30; ++ls) {
                    const Eigen::VectorXd trial = u + alpha * delta;
                    if (disc.reduce(spec, trial).g_int > cone_tol) {
                        const Eigen::VectorXd gt = grad_of(trial);
                        if (gt.norm() < (1.0 - 1e-4 * alpha) * gn) {
                            u = trial;
                            g = gt;
                            improved = true;
                            break;
                        }
                    }
                    alpha *= 0.5;
                }
            }
            mu = (mu == 0.0) ? 1e-8 * std::abs(hess.trace()) / n : 10.0 * mu;
        }
        if (!improved) break;
    }
    return u;
}

StartOutcome run_single_start(const Discretization& disc, const ProblemSpec& spec,
                              std::uint64_t seed, std::uint64_t stream,
                              const ExtremalOptions& opts,
                              const std::function<void(const Eigen::VectorXd&)>& observer) {
    const double cone_tol = disc.cone_tol();

    Eigen::VectorXd w;
    bool found = false;
    for (int k = 0; k < opts.max_start_rejections; ++k) {
        w = random_start(disc, seed, stream * 1000003ull + k);
        if (disc.reduce(spec, w).g_int > cone_tol) {
            found = true;
            break;
        }
    }
    if (!found)
        throw std::runtime_error(
            "estimate_lambda_star: no C+ start found; check assumption (G) on g");

    auto value_of = [&](const Eigen::VectorXd& v) {
        return lambda_of_direction(fibering_data(spec, disc.reduce(spec, v)));
    };
    auto tangent_grad = [&](const Eigen::VectorXd& v) {
        const Eigen::VectorXd g = direction_gradient_of_lambda(disc, spec, v);
        const Eigen::VectorXd normal = disc.stiffness() * v;
        return (g - (g.dot(normal) / normal.squaredNorm()) * normal).eval();
    };

    StartOutcome out;
    double val = value_of(w);
    out.history.emplace_back(0, val);
    if (observer) observer(w);

    for (int it = 1; it <= opts.max_iters; ++it) {
        const Eigen::VectorXd gt = tangent_grad(w);
        const double gt_norm = gt.norm();
        if (gt_norm < opts.grad_tol) break;

        // normalized search direction: the step is an arc length on the sphere
        const Eigen::VectorXd dir = -gt / gt_norm;
        double step = opts.initial_step;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            Eigen::VectorXd trial = w + step * dir;
            const double tp2 = disc.seminorm_sq(trial);
            if (tp2 > 0.0) {
                trial /= std::sqrt(tp2);
                const ScalarTriple tt = disc.reduce(spec, trial);
                if (tt.g_int > cone_tol) {  // stay in C+
                    const double tv = lambda_of_direction(fibering_data(spec, tt));
                    if (tv <= val - opts.armijo_c * step * gt_norm) {
                        w = std::move(trial);
                        val = tv;
                        accepted = true;
                        break;
                    }
                }
            }
            step *= opts.shrink;
        }
        if (!accepted) break;  // stalled at machine precision
        out.history.emplace_back(it, val);
        if (observer) observer(w);
    }

    // Newton polish to first-order optimality
    w = polish_minimizer(disc, spec, w);
    w /= std::sqrt(disc.seminorm_sq(w));
    const double final_val = value_of(w);
    if (final_val <= val) {
        val = final_val;
        if (observer) observer(w);
        if (!out.history.empty() && val < out.history.back().second)
            out.history.emplace_back(out.history.back().first + 1, val);
    }
    out.converged = tangent_grad(w).norm() < opts.grad_tol;
    out.value = val;
    out.minimizer = w;
    return out;
}

} // namespace

ExtremalEstimate estimate_lambda_star(
    const Discretization& disc, const ProblemSpec& spec, int n_starts, std::uint64_t seed,
    const ExtremalOptions& opts,
    const std::function<void(const Eigen::VectorXd&)>& observer) {
    if (n_starts < 1) throw std::invalid_argument("estimate_lambda_star requires n_starts >= 1");

    std::vector<StartOutcome> outcomes(n_starts);
    if (observer) {
        // run sequentially so the observer sees a deterministic order
        for (int st = 0; st < n_starts; ++st)
            outcomes[st] = run_single_start(disc, spec, seed, st + 1, opts, observer);
    } else {
        std::vector<std::future<StartOutcome>> futs;
        futs.reserve(n_starts);
        for (int st = 0; st < n_starts; ++st)
            futs.push_back(std::async(std::launch::async, run_single_start, std::cref(disc),
                                      std::cref(spec), seed, st + 1, std::cref(opts), nullptr));
        for (int st = 0; st < n_starts; ++st) outcomes[st] = futs[st].get();
    }

    int best = 0;
    for (int st = 1; st < n_starts; ++st)
        if (outcomes[st].value < outcomes[best].value) best = st;

    ExtremalEstimate est;
    est.starts_used = n_starts;
    est.history = outcomes[best].history;
    est.converged = outcomes[best].converged;
    est.minimizer = outcomes[best].minimizer;
    // exact renormalization, then re-evaluate so the reported value matches
    est.minimizer /= std::sqrt(disc.seminorm_sq(est.minimizer));
    est.lambda_star =
        lambda_of_direction(fibering_data(spec, disc.reduce(spec, est.minimizer)));
    for (const auto& o : outcomes)
        if (o.value <= est.lambda_star * (1.0 + 1e-6)) est.terminal_values.push_back(o.value);
    return est;
}

} // namespace nehari
