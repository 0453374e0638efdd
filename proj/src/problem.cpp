#include "nehari/problem.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nehari {

WeightDescriptor WeightDescriptor::constant(double c) {
    WeightDescriptor w;
    w.kind = Kind::Preset;
    w.preset = "constant";
    w.coeffs = {c};
    return w;
}

WeightDescriptor WeightDescriptor::quadratic(double c0, double c1, double c2) {
    WeightDescriptor w;
    w.kind = Kind::Preset;
    w.preset = "quadratic";
    w.coeffs = {c0, c1, c2};
    return w;
}

WeightDescriptor WeightDescriptor::bump(double amplitude, double center, double width) {
    WeightDescriptor w;
    w.kind = Kind::Preset;
    w.preset = "bump";
    w.coeffs = {amplitude, center, width};
    return w;
}

WeightDescriptor WeightDescriptor::from_samples(std::vector<double> values) {
    WeightDescriptor w;
    w.kind = Kind::Samples;
    w.samples = std::move(values);
    return w;
}

double WeightDescriptor::eval(double x) const {
    if (kind != Kind::Preset)
        throw std::logic_error("WeightDescriptor::eval called on a sampled weight");
    if (preset == "constant") {
        return coeffs.at(0);
    }
    if (preset == "quadratic") {
        return coeffs.at(0) + coeffs.at(1) * x + coeffs.at(2) * x * x;
    }
    if (preset == "bump") {
        const double amp = coeffs.at(0), c = coeffs.at(1), w = coeffs.at(2);
        if (w <= 0.0) throw std::invalid_argument("bump preset requires width > 0");
        const double z = (x - c) / w;
        return amp * std::exp(-z * z);
    }
    throw std::invalid_argument("unknown weight preset '" + preset + "'");
}

namespace {

[[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument("invalid problem configuration: " + msg);
}

} // namespace

void ProblemSpec::validate() const {
    if (!(a >= 0.0)) fail("requires a >= 0");
    if (!(b > 0.0)) fail("requires b > 0");
    if (!(theta > 1.0)) fail("requires theta > 1");
    if (!(s > 0.0 && s < 0.5)) fail("requires 0 < s < 1/2 (so that N = 1 > 2s)");
    if (!(p > 2.0 * theta)) fail("requires p > 2*theta");
    const double pcrit = critical_exponent();
    if (!(p < pcrit)) {
        std::ostringstream os;
        os << "requires p < 2N/(N-2s) = " << pcrit;
        fail(os.str());
    }
    if (a > 0.0) {
        if (!(gamma > 1.0 && gamma < 2.0))
            fail("requires 1 < gamma < 2 when a > 0 (non-degenerate regime)");
    } else {
        if (!(gamma > 2.0 && gamma < 2.0 * theta))
            fail("requires 2 < gamma < 2*theta when a = 0 (degenerate regime)");
    }
    if (!(lambda >= 0.0)) fail("requires lambda >= 0");
    if (!(domain.x_min < domain.x_max)) fail("requires x_min < x_max");
    if (domain.n_interior < 3) fail("requires n_interior_nodes >= 3");

    auto check_weight = [](const WeightDescriptor& w, const char* name, int n) {
        if (w.kind == WeightDescriptor::Kind::Samples) {
            if (static_cast<int>(w.samples.size()) != n) {
                std::ostringstream os;
                os << name << " samples length " << w.samples.size()
                   << " does not match n_interior_nodes " << n;
                fail(os.str());
            }
        } else {
            if (w.preset != "constant" && w.preset != "quadratic" && w.preset != "bump")
                fail(std::string(name) + " has unknown preset '" + w.preset + "'");
        }
    };
    check_weight(f_weight, "f", domain.n_interior);
    check_weight(g_weight, "g", domain.n_interior);
}

} // namespace nehari
