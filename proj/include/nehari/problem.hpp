#pragma once

#include <string>
#include <vector>

namespace nehari {

/// Weight function on the domain: either a named preset evaluated
/// analytically, or literal samples at the interior nodes.
struct WeightDescriptor {
    enum class Kind { Preset, Samples };

    Kind kind = Kind::Preset;
    std::string preset;            // "constant" | "quadratic" | "bump"
    std::vector<double> coeffs;
    std::vector<double> samples;   // one per interior node

    static WeightDescriptor constant(double c);
    static WeightDescriptor quadratic(double c0, double c1, double c2);
    static WeightDescriptor bump(double amplitude, double center, double width);
    static WeightDescriptor from_samples(std::vector<double> values);

    // Preset evaluation; throws for Kind::Samples.
    double eval(double x) const;
};

struct DomainSpec {
    double x_min = -1.0;
    double x_max = 1.0;
    int n_interior = 64;
};

/// All scalar parameters of the problem plus domain and weight descriptors.
/// The Kirchhoff multiplier is M(t) = a + b t^(theta-1); the nonlinearity
/// couples a gamma-power term (weight f, parameter lambda) with a p-power
/// term (sign-changing weight g).
struct ProblemSpec {
    double a = 0.0;       // Kirchhoff constant, >= 0 (degenerate when 0)
    double b = 1.0;       // Kirchhoff coefficient, > 0
    double theta = 2.0;   // Kirchhoff exponent, > 1
    double gamma = 3.0;
    double p = 5.0;
    double s = 0.4;       // fractional order, in (0, 1/2) so that N=1 > 2s
    double lambda = 0.0;
    DomainSpec domain;
    WeightDescriptor f_weight = WeightDescriptor::constant(1.0);
    WeightDescriptor g_weight = WeightDescriptor::quadratic(1.0, 0.0, -2.0);

    // critical exponent 2N/(N-2s) with N = 1
    double critical_exponent() const { return 2.0 / (1.0 - 2.0 * s); }

    bool degenerate() const { return a == 0.0; }

    // Throws std::invalid_argument naming the violated inequality.
    void validate() const;
};

} // namespace nehari
