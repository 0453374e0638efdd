#pragma once

#include "nehari/discretization.hpp"
#include "nehari/fibering.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace nehari {

/// Result of the multistart search for the extremal parameter
/// lambda*_{a,b} = inf { lambda_{a,b}(u) : u in C+ }.
struct ExtremalEstimate {
    double lambda_star = 0.0;
    Eigen::VectorXd minimizer;             // unit P2 seminorm, in C+
    int starts_used = 0;
    std::vector<std::pair<int, double>> history;  // (iteration, value) of the winning start
    bool converged = false;
    std::vector<double> terminal_values;   // all start outcomes within 1e-6 of the best
};

struct ExtremalOptions {
    int max_iters = 500;
    double grad_tol = 1e-8;
    double armijo_c = 1e-4;
    double shrink = 0.5;
    double initial_step = 1.0;
    int max_start_rejections = 500;
};

/// FiberingData of a direction under a spec.
FiberingData fibering_data(const ProblemSpec& spec, const ScalarTriple& t);

/// Random nonnegative start shaped by a bump envelope, normalized to the
/// unit P2 sphere (not necessarily in C+; callers rejection-sample).
Eigen::VectorXd random_start(const Discretization& disc, std::uint64_t seed,
                             std::uint64_t stream);

/// Gradient of u -> lambda_{a,b}(u) by the envelope theorem: the maximizer
/// t_ab is held fixed and phi/F is differentiated through (P2, F, G).
/// Requires u in C+.
Eigen::VectorXd direction_gradient_of_lambda(const Discretization& disc,
                                             const ProblemSpec& spec,
                                             const Eigen::VectorXd& u);

/// Projected gradient descent on the unit P2 sphere from n_starts random
/// C+ starts; deterministic in (seed, n_starts). The optional observer sees
/// every accepted iterate of every start.
ExtremalEstimate estimate_lambda_star(
    const Discretization& disc, const ProblemSpec& spec, int n_starts, std::uint64_t seed,
    const ExtremalOptions& opts = {},
    const std::function<void(const Eigen::VectorXd&)>& observer = nullptr);

} // namespace nehari
