#pragma once

#include "nehari/problem.hpp"
#include "nehari/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nehari {

struct FiberingBlock {
    std::optional<double> p2, fint, gint;  // scalar direction data; default direction otherwise
    std::optional<double> lambda;
    double t_min = 0.01;
    double t_max = 2.0;
    int n_t = 400;
};

struct SweepBlock {
    std::vector<double> lambdas;  // absolute values
    std::vector<double> fracs;    // fractions of lambda*
    int count = 0;                // (count, frac) rule: k/count * frac * lambda*
    double frac = 0.0;
};

struct BeyondBlock {
    std::optional<double> epsilon, delta_margin, c_minus, c_plus, d_minus, d_plus;
    std::optional<double> lambda_frac;  // lambda = frac * lambda* (must exceed 1)
    int n_steps = 10;                   // continuation steps toward lambda*
};

struct SolveBlock {
    std::optional<double> lambda_frac;  // lambda = frac * lambda*
};

struct DirectionBlock {
    std::vector<double> samples;
};

struct RunConfig {
    ProblemSpec spec;
    std::string command;  // fibering | lambda-of-u | extremal | solve | sweep | check
    std::uint64_t seed = 0;
    int n_starts = 8;
    std::string output_dir = ".";
    std::optional<FiberingBlock> fibering;
    std::optional<SweepBlock> sweep;
    std::optional<BeyondBlock> beyond;
    std::optional<SolveBlock> solve;
    std::optional<DirectionBlock> direction;
    nlohmann::json echo;  // parsed document, echoed into reports
};

/// Parses and fully validates a JSON config document. Unknown keys are an
/// error; regime violations surface with the violated inequality quoted.
RunConfig parse_config(const std::string& text);

} // namespace nehari
