#include "nehari/solver.hpp"

#include "nehari/rng.hpp"

#include <Eigen/LU>
#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>

namespace nehari {

const char* branch_name(Branch b) { return b == Branch::NPlus ? "nplus" : "nminus"; }

void RestrictedSetParams::validate() const {
    if (!(d_minus > 0.0 && d_plus > 0.0))
        throw std::invalid_argument("RestrictedSetParams requires d_minus, d_plus > 0");
    if (!(c_minus > 0.0 && c_plus > 0.0))
        throw std::invalid_argument("RestrictedSetParams requires c_minus, c_plus > 0");
    if (!(c_plus < c_minus))
        throw std::invalid_argument("RestrictedSetParams requires c_plus < c_minus");
    if (!(epsilon > 0.0)) throw std::invalid_argument("RestrictedSetParams requires epsilon > 0");
    if (!(delta_margin > 0.0))
        throw std::invalid_argument("RestrictedSetParams requires delta_margin > 0");
}

RestrictedSetParams RestrictedSetParams::defaults_from(const NehariSolution& minus,
                                                       const NehariSolution& plus,
                                                       double lambda_star) {
    RestrictedSetParams p;
    p.c_minus = 1.5 * minus.t_scale;  // directions live on the unit sphere
    p.c_plus = 0.5 * plus.t_scale;
    p.epsilon = 1e-2 * lambda_star;
    p.delta_margin = 1e-4 * lambda_star;
    p.d_minus = 1e-3;
    p.d_plus = 1e-3;
    return p;
}

std::string VerificationReport::summary() const {
    std::ostringstream os;
    os << "residual=" << residual_norm << (residual_ok ? " ok" : " FAIL")
       << ", |psi'(1)|=" << nehari_abs << (nehari_ok ? " ok" : " FAIL")
       << ", psi''(1)=" << psi2_at_1 << (branch_sign_ok ? " ok" : " FAIL")
       << ", min=" << min_nodal << (nonneg_ok ? " ok" : " FAIL")
       << ", max=" << max_nodal << (positivity_ok ? " ok" : " FAIL")
       << ", energy_gap=" << energy_gap << (energy_ok ? " ok" : " FAIL")
       << (nonzero_ok ? "" : ", ZERO SOLUTION");
    return os.str();
}

double discrete_l2_distance(const Discretization& disc, const Eigen::VectorXd& u,
                            const Eigen::VectorXd& v) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(disc.size());
    return std::sqrt(disc.weighted_power_integral(ones, u - v, 2.0));
}

namespace {

struct Admissibility {
    bool feasible = false;
    double t = 0.0;                        // branch projection scale
    std::optional<double> lambda_dir;      // lambda_{a,b}(w) when w in C+
};

struct BranchConstraints {
    double extra_margin = 0.0;   // lambda_{a,b}(w) - lambda >= extra_margin
    double t_max = 0.0;          // |t w|_X <= t_max (0 = unconstrained)
    double t_min = 0.0;          // |t w|_X >= t_min
};

// Projection of a unit-sphere direction onto the requested branch, with
// admissibility per the cone trichotomy and the optional restricted-set
// margin and norm bounds.
Admissibility project_branch(const Discretization& disc, const ProblemSpec& spec,
                             Branch branch, const FiberingData& d,
                             const BranchConstraints& cons) {
    Admissibility res;
    const bool cplus = classify_cone(d.g_int, disc.cone_tol()) == ConeTag::CPlus;
    if (!cplus) {
        if (branch == Branch::NMinus) return res;  // C- reaches only N+
        const auto pr = project(d, spec.lambda, 1e-9, disc.cone_tol());
        if (pr.branch != ProjectionResult::Branch::SingleRoot) return res;
        res.t = pr.t_plus;
    } else {
        const double lam_dir = lambda_of_direction(d);
        res.lambda_dir = lam_dir;
        if (!(lam_dir - spec.lambda >= std::max(cons.extra_margin, 0.0)) ||
            !(spec.lambda < lam_dir))
            return res;
        const auto pr = project(d, spec.lambda, 1e-9, disc.cone_tol());
        if (pr.branch != ProjectionResult::Branch::TwoRoots) return res;
        res.t = (branch == Branch::NMinus) ? pr.t_minus : pr.t_plus;
    }
    if (cons.t_max > 0.0 && res.t > cons.t_max) return res;
    if (cons.t_min > 0.0 && res.t < cons.t_min) return res;
    res.feasible = true;
    return res;
}

Eigen::MatrixXd residual_jacobian(const Discretization& disc, const ProblemSpec& spec,
                                  const Eigen::VectorXd& u) {
    const Eigen::VectorXd au = disc.stiffness() * u;
    const double p2 = u.dot(au);
    const double kirchhoff = spec.a + spec.b * std::pow(p2, spec.theta - 1.0);
    Eigen::MatrixXd jac = kirchhoff * disc.stiffness();
    if (spec.theta != 1.0 && p2 > 0.0)
        jac += (2.0 * spec.b * (spec.theta - 1.0) * std::pow(p2, spec.theta - 2.0)) * au *
               au.transpose();
    jac -= spec.lambda * (spec.gamma - 1.0) *
           disc.weighted_power_mass(disc.f_nodes(), u, spec.gamma);
    jac -= (spec.p - 1.0) * disc.weighted_power_mass(disc.g_nodes(), u, spec.p);
    return jac;
}

// Damped Newton on the weak residual r(u) = 0, keeping whichever iterate
// attains the smallest residual norm. Quadratic convergence takes the
// solution to the floating-point floor once the descent phase is close.
Eigen::VectorXd newton_polish(const Discretization& disc, const ProblemSpec& spec,
                              Eigen::VectorXd u, int max_iters = 40) {
    auto rnorm_of = [&](const Eigen::VectorXd& v) {
        return disc.weak_residual(spec, v).second;
    };
    Eigen::VectorXd best = u;
    double best_norm = rnorm_of(u);
    for (int it = 0; it < max_iters; ++it) {
        const auto [r, rn] = disc.weak_residual(spec, u);
        if (rn < best_norm) {
            best = u;
            best_norm = rn;
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(residual_jacobian(disc, spec, u));
        const Eigen::VectorXd delta = lu.solve(-r);
        if (!delta.allFinite()) break;
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            const Eigen::VectorXd trial = u + alpha * delta;
            const double tn = rnorm_of(trial);
            if (tn < (1.0 - 1e-4 * alpha) * rn) {
                u = trial;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
    }
    if (rnorm_of(u) < best_norm) best = u;
    return best;
}

NehariSolution assemble_solution(const Discretization& disc, const ProblemSpec& spec,
                                 Branch branch, const Eigen::VectorXd& u) {
    NehariSolution sol;
    sol.u = Direction(u);
    sol.branch = branch;
    sol.lambda = spec.lambda;
    const ScalarTriple tu = disc.reduce(spec, sol.u);
    sol.t_scale = std::sqrt(tu.p2);
    sol.energy = disc.energy(spec, u);
    sol.psi2_at_1 = eval_fibering(fibering_data(spec, tu), spec.lambda, 1.0).psi2;
    sol.residual_norm = disc.weak_residual(spec, u).second;
    if (classify_cone(tu.g_int, disc.cone_tol()) == ConeTag::CPlus) {
        FiberingData dw = fibering_data(spec, tu);
        sol.lambda_of_dir = lambda_of_direction(dw);
    }
    return sol;
}

NehariSolution minimize_branch_constrained(const Discretization& disc, const ProblemSpec& spec,
                                           Branch branch, const Eigen::VectorXd& start,
                                           const SolverOptions& opts,
                                           const BranchConstraints& cons) {
    if (!(spec.lambda > 0.0))
        throw std::domain_error("minimize_branch requires lambda > 0");

    auto normalize_clamped = [&](Eigen::VectorXd v) -> std::optional<Eigen::VectorXd> {
        v = v.cwiseMax(0.0);  // perturbed-nonlinearity device: keep u >= 0
        const double p2 = disc.seminorm_sq(v);
        if (!(p2 > 0.0)) return std::nullopt;
        v /= std::sqrt(p2);
        return v;
    };

    auto start_opt = normalize_clamped(start);
    if (!start_opt) throw std::invalid_argument("minimize_branch: start is the zero direction");
    Eigen::VectorXd w = *start_opt;
    FiberingData d = fibering_data(spec, disc.reduce(spec, w));

    if (branch == Branch::NMinus) {
        if (classify_cone(d.g_int, disc.cone_tol()) == ConeTag::CMinus)
            throw std::invalid_argument(
                "minimize_branch: a C- start reaches only the N+ branch (int g |u|^p <= 0)");
        const double lam_dir = lambda_of_direction(d);
        if (!(spec.lambda < lam_dir)) {
            std::ostringstream os;
            os << "minimize_branch: inadmissible start, lambda = " << spec.lambda
               << " >= lambda_{a,b}(start) = " << lam_dir;
            throw std::invalid_argument(os.str());
        }
    }
    Admissibility adm = project_branch(disc, spec, branch, d, cons);
    if (!adm.feasible) {
        std::ostringstream os;
        os << "minimize_branch: start violates the " << branch_name(branch)
           << " admissibility constraints at lambda = " << spec.lambda;
        if (cons.extra_margin > 0.0)
            os << " (restricted-set margin too large; decrease epsilon or delta_margin)";
        throw std::invalid_argument(os.str());
    }

    auto objective = [&](const FiberingData& dd, double t) {
        return eval_fibering(dd, spec.lambda, t).psi;
    };
    double J_val = objective(d, adm.t);

    // The polish is acceptable once it meets the residual tolerance without
    // leaving the branch or the nonnegative cone.
    auto try_polish = [&](const Eigen::VectorXd& u_scaled) -> std::optional<Eigen::VectorXd> {
        Eigen::VectorXd polished = newton_polish(disc, spec, u_scaled);
        const ScalarTriple tp = disc.reduce(spec, polished);
        if (!(tp.p2 > 0.0)) return std::nullopt;
        const double psi2 = eval_fibering(fibering_data(spec, tp), spec.lambda, 1.0).psi2;
        const bool sign_ok = (branch == Branch::NPlus) ? (psi2 > 0.0) : (psi2 < 0.0);
        if (!sign_ok || polished.minCoeff() < -1e-12) return std::nullopt;
        if (!(disc.weak_residual(spec, polished).second < opts.residual_tol))
            return std::nullopt;
        return polished;
    };

    // Projected gradient descent over unit-sphere directions with a
    // normalized search direction (step is arc length, Armijo on the
    // directional derivative), interleaved with Newton polish attempts on
    // the full weak-form system. The sphere-normal component of grad E
    // vanishes on the Nehari set, so the constrained minimizer is a genuine
    // critical point and Newton is the right local finisher.
    std::optional<Eigen::VectorXd> solution;
    int iters_done = 0;
    bool stalled = false;
    for (int chunk : {40, 160, 600, 1 << 24}) {
        const int cap = std::min(opts.max_iters, iters_done + chunk);
        for (; iters_done < cap && !stalled; ++iters_done) {
            const Eigen::VectorXd aw = disc.stiffness() * w;
            const double t = adm.t;
            const double kirchhoff =
                spec.a + spec.b * std::pow(t * t * d.p2, spec.theta - 1.0);
            const Eigen::VectorXd grad_E =
                kirchhoff * t * aw -
                spec.lambda * std::pow(t, spec.gamma - 1.0) *
                    disc.weighted_power_form(disc.f_nodes(), w, spec.gamma) -
                std::pow(t, spec.p - 1.0) *
                    disc.weighted_power_form(disc.g_nodes(), w, spec.p);
            const Eigen::VectorXd grad_J = t * grad_E;
            const Eigen::VectorXd gt = grad_J - (grad_J.dot(aw) / aw.squaredNorm()) * aw;
            const double gt_norm = gt.norm();
            if (!(gt_norm > 0.0)) {
                stalled = true;
                break;
            }
            const Eigen::VectorXd dir = -gt / gt_norm;
            double step = opts.initial_step;
            bool accepted = false;
            for (int ls = 0; ls < 70; ++ls) {
                auto trial_opt = normalize_clamped(w + step * dir);
                if (trial_opt) {
                    FiberingData dt = fibering_data(spec, disc.reduce(spec, *trial_opt));
                    Admissibility at = project_branch(disc, spec, branch, dt, cons);
                    if (at.feasible) {
                        const double J_trial = objective(dt, at.t);
                        if (J_trial <= J_val - opts.armijo_c * step * gt_norm) {
                            w = std::move(*trial_opt);
                            d = dt;
                            adm = at;
                            J_val = J_trial;
                            accepted = true;
                            break;
                        }
                    }
                }
                step *= opts.shrink;
            }
            if (!accepted) stalled = true;  // no admissible descent step at machine scale
        }
        solution = try_polish((adm.t * w).eval());
        if (solution || stalled || iters_done >= opts.max_iters) break;
    }

    const Eigen::VectorXd u_scaled = solution ? *solution : (adm.t * w).eval();
    NehariSolution sol = assemble_solution(disc, spec, branch, u_scaled);
    if (sol.residual_norm >= opts.residual_tol) {
        std::ostringstream os;
        os << "minimize_branch(" << branch_name(branch)
           << ") did not converge: residual " << sol.residual_norm << " at lambda "
           << spec.lambda << ", energy " << sol.energy << ", psi''(1) " << sol.psi2_at_1;
        throw std::runtime_error(os.str());
    }
    return sol;
}

Eigen::VectorXd admissible_start(const Discretization& disc, const ProblemSpec& spec,
                                 Branch branch, std::uint64_t seed, std::uint64_t stream,
                                 const SolverOptions& opts) {
    for (int k = 0; k < opts.max_start_rejections; ++k) {
        Eigen::VectorXd w = random_start(disc, seed, stream * 7919ull + k);
        const FiberingData d = fibering_data(spec, disc.reduce(spec, w));
        if (branch == Branch::NPlus) return w;  // every nonzero nonneg start projects onto N+
        if (classify_cone(d.g_int, disc.cone_tol()) == ConeTag::CPlus &&
            spec.lambda < lambda_of_direction(d))
            return w;
    }
    throw std::runtime_error(
        "solve_pair: no admissible start found for the N- branch; lambda may exceed the "
        "extremal value or g may violate assumption (G)");
}

NehariSolution best_of_multistart(const Discretization& disc, const ProblemSpec& spec,
                                  Branch branch, int n_starts, std::uint64_t seed,
                                  const SolverOptions& opts, std::uint64_t stream_base) {
    std::vector<std::future<NehariSolution>> futs;
    futs.reserve(n_starts);
    for (int st = 0; st < n_starts; ++st) {
        futs.push_back(std::async(std::launch::async, [&, st]() {
            const Eigen::VectorXd w0 =
                admissible_start(disc, spec, branch, seed, stream_base + st, opts);
            return minimize_branch_constrained(disc, spec, branch, w0, opts, {});
        }));
    }
    std::optional<NehariSolution> best;
    std::string last_error = "no starts";
    int failures = 0;
    for (auto& f : futs) {
        try {
            NehariSolution s = f.get();
            if (!best || s.energy < best->energy - 1e-10 ||
                (std::abs(s.energy - best->energy) <= 1e-10 &&
                 s.residual_norm < best->residual_norm))
                best = std::move(s);
        } catch (const std::exception& e) {
            ++failures;
            last_error = e.what();
        }
    }
    if (!best) {
        std::ostringstream os;
        os << "all " << failures << " starts failed for branch " << branch_name(branch)
           << "; last error: " << last_error;
        throw std::runtime_error(os.str());
    }
    return *best;
}

} // namespace

NehariSolution minimize_branch(const Discretization& disc, const ProblemSpec& spec,
                               Branch branch, const Eigen::VectorXd& start,
                               const SolverOptions& opts) {
    return minimize_branch_constrained(disc, spec, branch, start, opts, {});
}

std::pair<NehariSolution, NehariSolution> solve_pair(const Discretization& disc,
                                                     const ProblemSpec& spec, int n_starts,
                                                     std::uint64_t seed,
                                                     const SolverOptions& opts) {
    if (n_starts < 1) throw std::invalid_argument("solve_pair requires n_starts >= 1");
    if (spec.a > 0.0) {
        // non-degenerate existence hypothesis: g < 0 near the boundary
        const auto& g = disc.g_nodes();
        const int n = disc.size();
        if (!(g(0) < 0.0 && g(1) < 0.0 && g(n - 1) < 0.0 && g(n - 2) < 0.0))
            throw std::invalid_argument(
                "non-degenerate solve requires g < 0 near the boundary (g must be negative at "
                "the two nodes adjacent to each endpoint)");
    }

    NehariSolution minus =
        best_of_multistart(disc, spec, Branch::NMinus, n_starts, seed, opts, 1);
    NehariSolution plus =
        best_of_multistart(disc, spec, Branch::NPlus, n_starts, seed, opts, 100001);

    for (const NehariSolution* s : {&minus, &plus}) {
        const VerificationReport rep = verify_solution(disc, spec, *s, opts);
        if (!rep.all_ok()) {
            std::ostringstream os;
            os << "solve_pair: " << branch_name(s->branch)
               << " solution failed verification: " << rep.summary();
            throw std::runtime_error(os.str());
        }
    }
    return {std::move(minus), std::move(plus)};
}

ContinuationResult continuation_at_extremal(const Discretization& disc,
                                            const ProblemSpec& spec, double lambda_star,
                                            int n_steps, int n_starts, std::uint64_t seed,
                                            const SolverOptions& opts) {
    if (n_steps < 2)
        throw std::invalid_argument("continuation_at_extremal requires n_steps >= 2");

    ContinuationResult res;
    std::vector<double> psi2_trace;
    double prev_e_minus = 0.0, prev_e_plus = 0.0;
    for (int k = 1; k <= n_steps; ++k) {
        ProblemSpec sk = spec;
        sk.lambda = (1.0 - std::pow(2.0, -k)) * lambda_star;
        if (k == 1) {
            auto [m, p] = solve_pair(disc, sk, n_starts, seed, opts);
            res.minus = std::move(m);
            res.plus = std::move(p);
        } else {
            res.minus = minimize_branch(disc, sk, Branch::NMinus, res.minus.direction(), opts);
            res.plus = minimize_branch(disc, sk, Branch::NPlus, res.plus.direction(), opts);
        }
        res.steps.push_back({sk.lambda, res.minus.energy, res.plus.energy});
        psi2_trace.push_back(std::abs(res.minus.psi2_at_1));
        if (k > 1) {
            res.last_cauchy_minus = std::abs(res.minus.energy - prev_e_minus);
            res.last_cauchy_plus = std::abs(res.plus.energy - prev_e_plus);
        }
        prev_e_minus = res.minus.energy;
        prev_e_plus = res.plus.energy;
    }

    res.psi2_separation = -res.minus.psi2_at_1;
    if (res.minus.lambda_of_dir)
        res.rel_gap_minus = std::abs(*res.minus.lambda_of_dir - lambda_star) / lambda_star;

    // tangency collapse: |psi''| shrinking much faster than the lambda gap
    const double gap_ratio = std::pow(2.0, -(n_steps - 1));  // gap_k = 2^-k lambda*
    if (psi2_trace.front() > 0.0 &&
        psi2_trace.back() / psi2_trace.front() < 1e-2 * gap_ratio)
        res.tangency_warning = true;
    return res;
}

BeyondResult solve_beyond_extremal(const Discretization& disc, const ProblemSpec& spec,
                                   const RestrictedSetParams& params,
                                   const ContinuationResult& base, double lambda_star,
                                   const SolverOptions& opts) {
    params.validate();
    if (!(spec.lambda > lambda_star && spec.lambda < lambda_star + params.epsilon)) {
        std::ostringstream os;
        os << "solve_beyond_extremal requires lambda in (lambda*, lambda* + epsilon) = ("
           << lambda_star << ", " << lambda_star + params.epsilon << "), got " << spec.lambda;
        throw std::domain_error(os.str());
    }

    BeyondResult out;
    out.params = params;

    BranchConstraints cons_minus;
    cons_minus.extra_margin = params.delta_margin;
    cons_minus.t_max = params.c_minus;
    out.minus = minimize_branch_constrained(disc, spec, Branch::NMinus,
                                            base.minus.direction(), opts, cons_minus);

    BranchConstraints cons_plus;
    cons_plus.extra_margin = params.delta_margin;
    cons_plus.t_min = params.c_plus;
    out.plus = minimize_branch_constrained(disc, spec, Branch::NPlus, base.plus.direction(),
                                           opts, cons_plus);

    for (const NehariSolution* s : {&out.minus, &out.plus}) {
        const VerificationReport rep = verify_solution(disc, spec, *s, opts);
        if (!rep.all_ok()) {
            std::ostringstream os;
            os << "solve_beyond_extremal: " << branch_name(s->branch)
               << " solution failed verification: " << rep.summary();
            throw std::runtime_error(os.str());
        }
    }
    out.margin_minus = out.minus.lambda_of_dir ? *out.minus.lambda_of_dir - spec.lambda : 0.0;
    out.margin_plus = out.plus.lambda_of_dir ? *out.plus.lambda_of_dir - spec.lambda : 0.0;
    return out;
}

VerificationReport verify_solution(const Discretization& disc, const ProblemSpec& spec,
                                   const NehariSolution& sol, const SolverOptions& opts) {
    VerificationReport rep;
    const Eigen::VectorXd& u = sol.u.coeffs;
    rep.min_nodal = u.minCoeff();
    rep.max_nodal = u.maxCoeff();
    rep.nonzero_ok = u.cwiseAbs().maxCoeff() > 0.0;
    rep.nonneg_ok = rep.min_nodal >= -1e-12;
    rep.positivity_ok = rep.max_nodal > 0.0;
    if (!rep.nonzero_ok) return rep;

    const ScalarTriple tu = disc.reduce(spec, u);
    const FiberingData du = fibering_data(spec, tu);
    const FiberingValues fv = eval_fibering(du, spec.lambda, 1.0);
    const double scale = std::max(1.0, spec.a * tu.p2 + spec.b * std::pow(tu.p2, spec.theta) +
                                           spec.lambda * tu.f_int + std::abs(tu.g_int));
    rep.nehari_abs = std::abs(fv.psi1);
    rep.nehari_ok = rep.nehari_abs <= opts.nehari_tol * scale;
    rep.psi2_at_1 = fv.psi2;
    rep.branch_sign_ok =
        (sol.branch == Branch::NPlus) ? (fv.psi2 > 0.0) : (fv.psi2 < 0.0);

    rep.residual_norm = disc.weak_residual(spec, u).second;
    rep.residual_ok = rep.residual_norm < opts.residual_tol;

    // energy identity through the scalar fibering route for the direction
    const Eigen::VectorXd w = sol.direction();
    const FiberingData dw = fibering_data(spec, disc.reduce(spec, w));
    const double psi_at_t = eval_fibering(dw, spec.lambda, sol.t_scale).psi;
    const double e_direct = disc.energy(spec, u);
    rep.energy_gap = std::abs(e_direct - psi_at_t);
    rep.energy_ok = rep.energy_gap <= 1e-10 * std::max(1.0, std::abs(e_direct));
    return rep;
}

double estimate_embedding_constant(const Discretization& disc, double q, int n_starts,
                                   std::uint64_t seed) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(disc.size());
    auto lq_sq = [&](const Eigen::VectorXd& v) {
        return std::pow(disc.weighted_power_integral(ones, v, q), 2.0 / q);
    };

    double best = std::numeric_limits<double>::infinity();
    for (int st = 0; st < n_starts; ++st) {
        Eigen::VectorXd v = random_start(disc, seed, 31ull + st);
        double ratio = disc.seminorm_sq(v) / lq_sq(v);
        for (int it = 0; it < 300; ++it) {
            const Eigen::VectorXd av = disc.stiffness() * v;
            const double p2 = v.dot(av);
            const double nq = lq_sq(v);
            const double nq_int = disc.weighted_power_integral(ones, v, q);
            const Eigen::VectorXd grad_nq =
                2.0 * std::pow(nq_int, 2.0 / q - 1.0) * disc.weighted_power_form(ones, v, q);
            Eigen::VectorXd grad = (2.0 * av * nq - p2 * grad_nq) / (nq * nq);
            const Eigen::VectorXd gt = grad - (grad.dot(av) / av.squaredNorm()) * av;
            const double gt_norm = gt.norm();
            if (gt_norm < 1e-12) break;
            const Eigen::VectorXd dir = -gt / gt_norm;
            double step = 0.5;
            bool ok = false;
            for (int ls = 0; ls < 50; ++ls) {
                Eigen::VectorXd trial = v + step * dir;
                const double tp2 = disc.seminorm_sq(trial);
                if (tp2 > 0.0) {
                    trial /= std::sqrt(tp2);
                    const double tr = disc.seminorm_sq(trial) / lq_sq(trial);
                    if (tr < ratio - 1e-4 * step * gt_norm) {
                        v = std::move(trial);
                        ratio = tr;
                        ok = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if (!ok) break;
        }
        best = std::min(best, ratio);
    }
    return best;
}

} // namespace nehari
