#pragma once

#include "nehari/discretization.hpp"
#include "nehari/fibering.hpp"
#include "nehari/rng.hpp"

#include <string>
#include <vector>

namespace nehari {

struct CheckResult {
    std::string name;
    bool ok = false;
    std::string detail;
};

/// Brute-force root counter for the projection equation phi(t) = lambda F:
/// counts sign changes on a log-spaced grid. Independent of the bracketed
/// Newton path inside project().
int count_projection_roots(const FiberingData& d, double lambda, int n_pts, double t_lo,
                           double t_hi);

/// Random fibering data in the degenerate (a = 0) or non-degenerate (a > 0)
/// exponent regime, with G > 0 when cplus is set and G <= 0 otherwise.
FiberingData random_fibering_data(CounterRng& rng, bool degenerate, bool cplus);

/// The deterministic invariant/property suite behind the `check` command.
std::vector<CheckResult> run_property_suite(const Discretization& disc,
                                            const ProblemSpec& spec, std::uint64_t seed);

} // namespace nehari
