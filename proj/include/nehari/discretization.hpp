#pragma once

#include "nehari/problem.hpp"

#include <Eigen/Dense>
#include <optional>

namespace nehari {

/// The scalar reduction of a direction: P2 = |u|_X^2 (Gagliardo seminorm
/// squared), F = int f |u|^gamma, G = int g |u|^p. Everything the fibering
/// calculus needs to know about u.
struct ScalarTriple {
    double p2 = 0.0;
    double f_int = 0.0;
    double g_int = 0.0;
};

/// Coefficient vector over interior nodes (zero implied at the boundary
/// nodes and outside the domain) with an optional cached scalar triple.
struct Direction {
    Eigen::VectorXd coeffs;
    std::optional<ScalarTriple> cache;

    explicit Direction(Eigen::VectorXd c) : coeffs(std::move(c)) {}
    Direction() = default;
};

/// Uniform P1 discretization of (x_min, x_max) with homogeneous exterior
/// condition. The stiffness matrix realizes the full Gagliardo double
/// integral over R^2 (tails included), so u^T A u equals the seminorm of
/// the piecewise-linear extension-by-zero of u exactly.
class Discretization {
public:
    static Discretization build(const ProblemSpec& spec);

    int size() const { return static_cast<int>(nodes_.size()); }
    double spacing() const { return h_; }
    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    double domain_length() const { return x_max_ - x_min_; }
    const std::vector<double>& nodes() const { return nodes_; }
    const Eigen::MatrixXd& stiffness() const { return stiffness_; }
    const Eigen::VectorXd& quad_weights() const { return quad_weights_; }
    const Eigen::VectorXd& f_nodes() const { return f_nodes_; }
    const Eigen::VectorXd& g_nodes() const { return g_nodes_; }

    // |G|-scale threshold below which a direction is classified into C^-
    double cone_tol() const { return cone_tol_; }

    /// u^T A u; the Gagliardo seminorm squared of the P1 function.
    double seminorm_sq(const Eigen::VectorXd& u) const;

    /// u^T A v (the bilinear form behind seminorm_sq).
    double bilinear(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;

    /// int_Omega w(x) |u(x)|^q dx by composite 3-point Gauss-Legendre per
    /// cell on the piecewise-linear reconstructions (w is extended
    /// constantly into the boundary cells, u drops to zero there).
    double weighted_power_integral(const Eigen::VectorXd& w_nodes,
                                   const Eigen::VectorXd& u, double q) const;

    /// Vector of int w |u|^{q-2} u phi_i dx for every nodal basis function;
    /// the building block of gradients and the weak residual. The integrand
    /// is taken as 0 wherever u vanishes.
    Eigen::VectorXd weighted_power_form(const Eigen::VectorXd& w_nodes,
                                        const Eigen::VectorXd& u, double q) const;

    /// Matrix of int w |u|^{q-2} phi_i phi_j dx (tridiagonal support); the
    /// derivative of weighted_power_form with respect to u up to the factor
    /// q-1. Quadrature nodes where u vanishes contribute 0.
    Eigen::MatrixXd weighted_power_mass(const Eigen::VectorXd& w_nodes,
                                        const Eigen::VectorXd& u, double q) const;

    /// (int_Omega |w(x)|^q dx)^(1/q) of a node-sampled weight.
    double lp_norm(const Eigen::VectorXd& w_nodes, double q) const;

    /// (P2, F, G) of u under the given exponents/weights.
    ScalarTriple reduce(const ProblemSpec& spec, const Eigen::VectorXd& u) const;

    /// Fills (and returns) the cached triple of a Direction.
    const ScalarTriple& reduce(const ProblemSpec& spec, Direction& u) const;

    /// Energy E_lambda(u) and its gradient; grad^T v is the Gateaux
    /// derivative of E at u in direction v.
    std::pair<double, Eigen::VectorXd> energy_and_gradient(const ProblemSpec& spec,
                                                           const Eigen::VectorXd& u) const;

    double energy(const ProblemSpec& spec, const Eigen::VectorXd& u) const;

    /// Discrete weak form tested against each nodal basis function, and its
    /// Euclidean norm scaled by 1/sqrt(n).
    std::pair<Eigen::VectorXd, double> weak_residual(const ProblemSpec& spec,
                                                     const Eigen::VectorXd& u) const;

private:
    double x_min_ = 0.0, x_max_ = 0.0, h_ = 0.0;
    double cone_tol_ = 0.0;
    std::vector<double> nodes_;
    Eigen::MatrixXd stiffness_;
    Eigen::VectorXd quad_weights_;
    Eigen::VectorXd f_nodes_;
    Eigen::VectorXd g_nodes_;

    void check_dim(const Eigen::VectorXd& u, const char* where) const;
};

/// sign(z) |z|^(r); 0 at z = 0 (keeps the concave-term gradient finite).
double signed_power(double z, double r);

} // namespace nehari
