#pragma once

#include "nehari/discretization.hpp"
#include "nehari/extremal.hpp"
#include "nehari/fibering.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nehari {

enum class Branch { NPlus, NMinus };

const char* branch_name(Branch b);

/// A solved branch point: the scaled minimizer t*(w) w together with the
/// quantities that certify its Nehari membership and branch sign.
struct NehariSolution {
    Direction u;                 // solution, stored post-scaling
    Branch branch = Branch::NPlus;
    double lambda = 0.0;
    double energy = 0.0;
    double t_scale = 1.0;
    double psi2_at_1 = 0.0;      // psi'' at t = 1 for the stored u
    double residual_norm = 0.0;
    std::optional<double> lambda_of_dir;  // lambda_{a,b} of the direction, if in C+

    Eigen::VectorXd direction() const { return u.coeffs / t_scale; }
};

struct SolverOptions {
    int max_iters = 2000;
    double residual_tol = 1e-8;
    double nehari_tol = 1e-10;
    double armijo_c = 1e-4;
    double shrink = 0.5;
    double initial_step = 1.0;
    int max_start_rejections = 500;
};

/// Margins and norm bounds for the restricted minimization past the
/// extremal parameter. The distance to the tangency set is certified
/// through the computable surrogate lambda_{a,b}(w) - lambda >= delta_margin.
struct RestrictedSetParams {
    double d_minus = 1e-3;
    double d_plus = 1e-3;
    double c_minus = 0.0;   // upper bound on |t^- w|_X
    double c_plus = 0.0;    // lower bound on |t^+ w|_X
    double epsilon = 0.0;   // width of the lambda window past lambda*
    double delta_margin = 0.0;

    void validate() const;
    static RestrictedSetParams defaults_from(const NehariSolution& minus,
                                             const NehariSolution& plus,
                                             double lambda_star);
};

struct VerificationReport {
    double residual_norm = 0.0;
    double nehari_abs = 0.0;      // |psi'(1)|
    double psi2_at_1 = 0.0;
    double min_nodal = 0.0;
    double max_nodal = 0.0;
    double energy_gap = 0.0;      // |E(u) - psi_dir(t_scale)|
    bool nonzero_ok = false;
    bool residual_ok = false;
    bool nehari_ok = false;
    bool branch_sign_ok = false;
    bool nonneg_ok = false;
    bool positivity_ok = false;
    bool energy_ok = false;

    bool all_ok() const {
        return nonzero_ok && residual_ok && nehari_ok && branch_sign_ok && nonneg_ok &&
               positivity_ok && energy_ok;
    }
    std::string summary() const;
};

/// Projected gradient descent for J_branch(w) = E_lambda(t_branch(w) w)
/// over nonnegative directions on the unit P2 sphere. For the N- branch
/// the iteration rejects steps that leave the admissible cone
/// {w in C+ : lambda < lambda_{a,b}(w)}.
NehariSolution minimize_branch(const Discretization& disc, const ProblemSpec& spec,
                               Branch branch, const Eigen::VectorXd& start,
                               const SolverOptions& opts = {});

/// Best N- and N+ solutions over a deterministic multistart; both verified.
std::pair<NehariSolution, NehariSolution> solve_pair(const Discretization& disc,
                                                     const ProblemSpec& spec, int n_starts,
                                                     std::uint64_t seed,
                                                     const SolverOptions& opts = {});

struct ContinuationStep {
    double lambda = 0.0;
    double energy_minus = 0.0;
    double energy_plus = 0.0;
};

struct ContinuationResult {
    NehariSolution minus;
    NehariSolution plus;
    std::vector<ContinuationStep> steps;
    double last_cauchy_minus = 0.0;  // |E_k - E_{k-1}| at the final step
    double last_cauchy_plus = 0.0;
    double rel_gap_minus = 0.0;      // |lambda_{a,b}(dir) - lambda*| / lambda*
    double psi2_separation = 0.0;    // -psi''(1) of the final N- solution
    bool tangency_warning = false;   // psi'' collapsing faster than the lambda gap
};

/// Solves at lambda_k = (1 - 2^-k) lambda_star, k = 1..n_steps, warm-starting
/// from the previous minimizers; checks that the N- limit stays away from
/// the tangency set.
ContinuationResult continuation_at_extremal(const Discretization& disc,
                                            const ProblemSpec& spec, double lambda_star,
                                            int n_steps, int n_starts, std::uint64_t seed,
                                            const SolverOptions& opts = {});

struct BeyondResult {
    NehariSolution minus;
    NehariSolution plus;
    double margin_minus = 0.0;   // lambda_{a,b}(w) - lambda at the N- output
    double margin_plus = 0.0;
    RestrictedSetParams params;
};

/// Restricted minimization for lambda in (lambda*, lambda* + epsilon),
/// started from the lambda* continuation pair. Spec.lambda carries the
/// target lambda.
BeyondResult solve_beyond_extremal(const Discretization& disc, const ProblemSpec& spec,
                                   const RestrictedSetParams& params,
                                   const ContinuationResult& base, double lambda_star,
                                   const SolverOptions& opts = {});

VerificationReport verify_solution(const Discretization& disc, const ProblemSpec& spec,
                                   const NehariSolution& sol,
                                   const SolverOptions& opts = {});

/// Discrete L2 distance between two coefficient vectors.
double discrete_l2_distance(const Discretization& disc, const Eigen::VectorXd& u,
                            const Eigen::VectorXd& v);

/// Discrete fractional Sobolev embedding constant:
/// min over v != 0 of v^T A v / (int |v|^q dx)^(2/q), estimated by
/// projected gradient descent from a few deterministic starts.
double estimate_embedding_constant(const Discretization& disc, double q,
                                   int n_starts = 4, std::uint64_t seed = 12345);

} // namespace nehari
