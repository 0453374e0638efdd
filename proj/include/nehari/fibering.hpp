#pragma once

namespace nehari {

/// The scalar data on which the whole fibering analysis acts: Kirchhoff and
/// nonlinearity exponents plus the reduced triple (P2, F, G) of a nonzero
/// direction. P2 and F must be positive; G may have either sign.
struct FiberingData {
    double a = 0.0;
    double b = 1.0;
    double theta = 2.0;
    double gamma = 3.0;
    double p = 5.0;
    double p2 = 1.0;     // |u|_X^2
    double f_int = 1.0;  // int f |u|^gamma
    double g_int = 1.0;  // int g |u|^p

    // Throws std::invalid_argument on violated exponent/positivity
    // constraints. Accepts every configuration the scalar calculus is
    // defined for: theta > 1, 1 < gamma < 2*theta < p, and gamma < 2
    // whenever a > 0.
    void validate() const;
};

/// One evaluation of the fibering map and its companions at (lambda, t):
/// psi(t) = E(t u) along the ray, psi1/psi2 its t-derivatives, phi the
/// lambda-free factor with psi1(t) = t^(gamma-1) (phi(t) - lambda F),
/// m(t) = t^(gamma+1) phi'(t) and h(t) with phi'(t) = t^(1-gamma) h(t).
struct FiberingValues {
    double psi;
    double psi1;
    double psi2;
    double phi;
    double m;
    double h;
};

FiberingValues eval_fibering(const FiberingData& d, double lambda, double t);

enum class ConeTag { CPlus, CMinus };

/// CPlus iff G > tol; the nonpositive-G cone includes equality.
ConeTag classify_cone(double g_int, double tol);

/// Seed for the maximizer search in the non-degenerate case: the unique
/// critical point of h(t).
double h_seed(const FiberingData& d);

/// The unique positive root of m (the global maximizer of phi).
/// Requires G > 0.
double maximizer_of_phi(const FiberingData& d);

/// lambda_{a,b}(u) = phi(t_ab)/F, the value of lambda at which the ray
/// through u becomes tangent to the Nehari set. Requires G > 0.
double lambda_of_direction(const FiberingData& d);

/// Degenerate (a = 0) closed form for the maximizer of phi.
double maximizer_degenerate_closed_form(const FiberingData& d);

/// Degenerate (a = 0) closed form for lambda_{0,b}(u).
double lambda_degenerate_closed_form(const FiberingData& d);

/// lambda from the G-eliminated form
///   [a(p-2) t^2 P2 + b(p-2theta) t^(2theta) P2^theta] / [(p-gamma) t^gamma F],
/// exact at any root of m.
double lambda_eliminated_g(const FiberingData& d, double t);

/// Nehari projections of a ray: the solutions of phi(t) = lambda F.
struct ProjectionResult {
    enum class Branch { TwoRoots, Tangent, SingleRoot, NoRoot };
    Branch branch = Branch::NoRoot;
    double t_plus = 0.0;   // TwoRoots / SingleRoot
    double t_minus = 0.0;  // TwoRoots
    double t_zero = 0.0;   // Tangent
};

/// Classifies and solves the projection equation. G <= cone tolerance gives
/// a single root for any lambda > 0; otherwise the position of lambda
/// relative to lambda_{a,b}(u) decides between two roots, tangency (within
/// a relative band root_tol) and no root.
ProjectionResult project(const FiberingData& d, double lambda, double root_tol = 1e-9,
                         double cone_tol = 0.0);

} // namespace nehari
