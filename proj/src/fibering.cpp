#include "nehari/fibering.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nehari {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

// Bracketed Newton with bisection fallback (Numerical Recipes style).
// f must have opposite signs at lo and hi; returns the root to a relative
// tolerance of 1e-12 on t.
template <typename F, typename DF>
double newton_bisect(F f, DF df, double lo, double hi, double f_lo, double f_hi) {
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if ((f_lo > 0.0) == (f_hi > 0.0))
        throw std::runtime_error("newton_bisect: root not bracketed");
    if (f_lo > 0.0) {
        std::swap(lo, hi);
        std::swap(f_lo, f_hi);
    }
    double t = 0.5 * (lo + hi);
    double dx_old = std::abs(hi - lo);
    double dx = dx_old;
    double fv = f(t), dfv = df(t);
    const double rel_tol = 1e-12;
    for (int it = 0; it < 200; ++it) {
        const bool newton_bad =
            (((t - hi) * dfv - fv) * ((t - lo) * dfv - fv) > 0.0) ||
            (std::abs(2.0 * fv) > std::abs(dx_old * dfv));
        if (newton_bad) {
            dx_old = dx;
            dx = 0.5 * (hi - lo);
            t = lo + dx;
        } else {
            dx_old = dx;
            dx = fv / dfv;
            t -= dx;
        }
        if (std::abs(dx) <= rel_tol * std::abs(t)) return t;
        fv = f(t);
        dfv = df(t);
        if (fv == 0.0) return t;
        if (fv < 0.0)
            lo = t;
        else
            hi = t;
    }
    return t;
}

} // namespace

void FiberingData::validate() const {
    if (!(p2 > 0.0)) fail("FiberingData requires P2 > 0 (nonzero direction)");
    if (!(f_int > 0.0)) fail("FiberingData requires F > 0 (assumption (F) with u != 0)");
    if (!(a >= 0.0)) fail("FiberingData requires a >= 0");
    if (!(b > 0.0)) fail("FiberingData requires b > 0");
    if (!(theta > 1.0)) fail("FiberingData requires theta > 1");
    if (!(gamma > 1.0)) fail("FiberingData requires gamma > 1");
    if (!(gamma < 2.0 * theta)) fail("FiberingData requires gamma < 2*theta");
    if (!(p > 2.0 * theta)) fail("FiberingData requires p > 2*theta");
    if (a > 0.0 && !(gamma < 2.0))
        fail("FiberingData requires gamma < 2 when a > 0");
}

FiberingValues eval_fibering(const FiberingData& d, double lambda, double t) {
    if (!(t > 0.0)) throw std::domain_error("eval_fibering requires t > 0");
    const double a = d.a, b = d.b, th = d.theta, ga = d.gamma, p = d.p;
    const double p2 = d.p2, F = d.f_int, G = d.g_int;
    const double p2th = std::pow(p2, th);

    FiberingValues v{};
    v.psi = 0.5 * a * t * t * p2 + b / (2.0 * th) * std::pow(t, 2.0 * th) * p2th -
            lambda / ga * std::pow(t, ga) * F - std::pow(t, p) / p * G;
    v.psi1 = a * t * p2 + b * std::pow(t, 2.0 * th - 1.0) * p2th -
             lambda * std::pow(t, ga - 1.0) * F - std::pow(t, p - 1.0) * G;
    v.psi2 = a * p2 + b * (2.0 * th - 1.0) * std::pow(t, 2.0 * th - 2.0) * p2th -
             lambda * (ga - 1.0) * std::pow(t, ga - 2.0) * F -
             (p - 1.0) * std::pow(t, p - 2.0) * G;
    v.phi = a * std::pow(t, 2.0 - ga) * p2 + b * std::pow(t, 2.0 * th - ga) * p2th -
            std::pow(t, p - ga) * G;
    v.m = a * (2.0 - ga) * t * t * p2 + b * (2.0 * th - ga) * std::pow(t, 2.0 * th) * p2th -
          (p - ga) * std::pow(t, p) * G;
    v.h = a * (2.0 - ga) * p2 + b * (2.0 * th - ga) * std::pow(t, 2.0 * th - 2.0) * p2th -
          (p - ga) * std::pow(t, p - 2.0) * G;
    return v;
}

ConeTag classify_cone(double g_int, double tol) {
    return g_int > tol ? ConeTag::CPlus : ConeTag::CMinus;
}

double h_seed(const FiberingData& d) {
    // unique critical point of h: the ratio of the two t-dependent terms
    return std::pow(d.b * (2.0 * d.theta - 2.0) * (2.0 * d.theta - d.gamma) *
                        std::pow(d.p2, d.theta) /
                        ((d.p - 2.0) * (d.p - d.gamma) * d.g_int),
                    1.0 / (d.p - 2.0 * d.theta));
}

double maximizer_degenerate_closed_form(const FiberingData& d) {
    return std::pow(d.b * (2.0 * d.theta - d.gamma) * std::pow(d.p2, d.theta) /
                        ((d.p - d.gamma) * d.g_int),
                    1.0 / (d.p - 2.0 * d.theta));
}

double maximizer_of_phi(const FiberingData& d) {
    d.validate();
    if (!(d.g_int > 0.0))
        throw std::domain_error(
            "maximizer_of_phi requires int g |u|^p > 0 (direction must lie in C+)");
    if (d.a == 0.0) return maximizer_degenerate_closed_form(d);

    // h increases to its unique critical point and decreases to -inf
    // afterwards, so its root lies to the right of the seed.
    auto hval = [&](double t) { return eval_fibering(d, 0.0, t).h; };
    auto hder = [&](double t) {
        return d.b * (2.0 * d.theta - 2.0) * (2.0 * d.theta - d.gamma) *
                   std::pow(t, 2.0 * d.theta - 3.0) * std::pow(d.p2, d.theta) -
               (d.p - 2.0) * (d.p - d.gamma) * std::pow(t, d.p - 3.0) * d.g_int;
    };
    double lo = h_seed(d);
    double f_lo = hval(lo);
    if (f_lo <= 0.0)
        throw std::runtime_error("maximizer_of_phi: h is nonpositive at its critical point");
    double hi = 2.0 * lo;
    double f_hi = hval(hi);
    int guard = 0;
    while (f_hi > 0.0) {
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        f_hi = hval(hi);
        if (++guard > 600) throw std::runtime_error("maximizer_of_phi: bracket expansion failed");
    }
    return newton_bisect(hval, hder, lo, hi, f_lo, f_hi);
}

double lambda_of_direction(const FiberingData& d) {
    const double t = maximizer_of_phi(d);
    return eval_fibering(d, 0.0, t).phi / d.f_int;
}

double lambda_degenerate_closed_form(const FiberingData& d) {
    const double th = d.theta, ga = d.gamma, p = d.p;
    const double p2th = std::pow(d.p2, th);
    return d.b * (p - 2.0 * th) / (p - ga) * p2th / d.f_int *
           std::pow(d.b * (2.0 * th - ga) / (p - ga) * p2th / d.g_int,
                    (2.0 * th - ga) / (p - 2.0 * th));
}

double lambda_eliminated_g(const FiberingData& d, double t) {
    return (d.a * (d.p - 2.0) * t * t * d.p2 +
            d.b * (d.p - 2.0 * d.theta) * std::pow(t, 2.0 * d.theta) * std::pow(d.p2, d.theta)) /
           ((d.p - d.gamma) * std::pow(t, d.gamma) * d.f_int);
}

ProjectionResult project(const FiberingData& d, double lambda, double root_tol,
                         double cone_tol) {
    d.validate();
    if (!(lambda > 0.0)) throw std::domain_error("project requires lambda > 0");

    const double target = lambda * d.f_int;
    auto phi = [&](double t) { return eval_fibering(d, 0.0, t).phi; };
    auto phi_deriv = [&](double t) {
        return std::pow(t, 1.0 - d.gamma) * eval_fibering(d, 0.0, t).h;
    };
    auto eq = [&](double t) { return phi(t) - target; };

    ProjectionResult res;
    if (classify_cone(d.g_int, cone_tol) == ConeTag::CMinus) {
        // phi is strictly increasing from 0 to +inf: one root for any lambda
        double hi = 1.0, lo = 1.0;
        int guard = 0;
        while (eq(hi) < 0.0) {
            lo = hi;
            hi *= 2.0;
            if (++guard > 600) throw std::runtime_error("project: upper bracket failed (C-)");
        }
        guard = 0;
        while (eq(lo) > 0.0) {
            hi = lo;
            lo *= 0.5;
            if (++guard > 600) throw std::runtime_error("project: lower bracket failed (C-)");
        }
        res.branch = ProjectionResult::Branch::SingleRoot;
        res.t_plus = newton_bisect(eq, phi_deriv, lo, hi, eq(lo), eq(hi));
        return res;
    }

    const double t_ab = maximizer_of_phi(d);
    const double lambda_u = phi(t_ab) / d.f_int;
    if (std::abs(lambda - lambda_u) <= root_tol * lambda_u) {
        res.branch = ProjectionResult::Branch::Tangent;
        res.t_zero = t_ab;
        return res;
    }
    if (lambda > lambda_u) {
        res.branch = ProjectionResult::Branch::NoRoot;
        return res;
    }

    // phi is unimodal with maximum at t_ab: one root on each side.
    double lo = 0.5 * t_ab;
    int guard = 0;
    while (eq(lo) > 0.0) {
        lo *= 0.5;
        if (++guard > 600) throw std::runtime_error("project: lower bracket failed");
    }
    res.t_plus = newton_bisect(eq, phi_deriv, lo, t_ab, eq(lo), eq(t_ab));

    double hi = 2.0 * t_ab;
    guard = 0;
    while (eq(hi) > 0.0) {
        hi *= 2.0;
        if (++guard > 600) throw std::runtime_error("project: upper bracket failed");
    }
    res.t_minus = newton_bisect(eq, phi_deriv, t_ab, hi, eq(t_ab), eq(hi));
    res.branch = ProjectionResult::Branch::TwoRoots;
    return res;
}

} // namespace nehari
