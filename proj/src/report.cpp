#include "nehari/report.hpp"

#include "nehari/checks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nehari {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_lambda(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

json verification_to_json(const VerificationReport& rep) {
    return json{{"residual_norm", rep.residual_norm},
                {"nehari_abs", rep.nehari_abs},
                {"psi2_at_1", rep.psi2_at_1},
                {"min_nodal", rep.min_nodal},
                {"max_nodal", rep.max_nodal},
                {"energy_gap", rep.energy_gap},
                {"all_ok", rep.all_ok()}};
}

json solution_to_json(const Discretization& disc, const ProblemSpec& spec,
                      const NehariSolution& sol) {
    json j;
    j["branch"] = branch_name(sol.branch);
    j["lambda"] = sol.lambda;
    j["energy"] = sol.energy;
    j["t_scale"] = sol.t_scale;
    j["psi2_at_1"] = sol.psi2_at_1;
    j["residual_norm"] = sol.residual_norm;
    j["lambda_of_dir"] = sol.lambda_of_dir ? json(*sol.lambda_of_dir) : json(nullptr);
    j["coeffs"] = std::vector<double>(sol.u.coeffs.data(),
                                      sol.u.coeffs.data() + sol.u.coeffs.size());
    ProblemSpec sp = spec;
    sp.lambda = sol.lambda;
    j["verification"] = verification_to_json(verify_solution(disc, sp, sol));
    return j;
}

CsvFile profile_csv(const std::string& name, const Discretization& disc,
                    const Eigen::VectorXd& u) {
    CsvFile f;
    f.name = name;
    f.header = "x,u";
    for (int i = 0; i < disc.size(); ++i)
        f.rows.push_back({disc.nodes()[i], u(i)});
    return f;
}

Eigen::VectorXd default_direction(const Discretization& disc) {
    const int n = disc.size();
    Eigen::VectorXd u(n);
    const double mid = 0.5 * (disc.x_min() + disc.x_max());
    const double half = 0.5 * disc.domain_length();
    for (int i = 0; i < n; ++i) {
        const double xi = (disc.nodes()[i] - mid) / half;
        u(i) = 1.0 - xi * xi;
    }
    u /= std::sqrt(disc.seminorm_sq(u));
    return u;
}

FiberingData fibering_input(const RunConfig& cfg, const Discretization& disc) {
    FiberingData d;
    d.a = cfg.spec.a;
    d.b = cfg.spec.b;
    d.theta = cfg.spec.theta;
    d.gamma = cfg.spec.gamma;
    d.p = cfg.spec.p;
    const FiberingBlock blk = cfg.fibering.value_or(FiberingBlock{});
    if (blk.p2 || blk.fint || blk.gint) {
        if (!(blk.p2 && blk.fint && blk.gint))
            throw std::invalid_argument(
                "fibering block must set p2, fint, gint together (or none of them)");
        d.p2 = *blk.p2;
        d.f_int = *blk.fint;
        d.g_int = *blk.gint;
    } else {
        const ScalarTriple tr = disc.reduce(cfg.spec, default_direction(disc));
        d.p2 = tr.p2;
        d.f_int = tr.f_int;
        d.g_int = tr.g_int;
    }
    d.validate();
    return d;
}

double resolve_lambda_star(const RunConfig& cfg, const Discretization& disc,
                           ExtremalEstimate* est_out = nullptr) {
    ExtremalEstimate est = estimate_lambda_star(disc, cfg.spec, cfg.n_starts, cfg.seed);
    if (est_out) *est_out = est;
    return est.lambda_star;
}

void run_fibering(const RunConfig& cfg, const Discretization& disc, Report& rep) {
    const FiberingData d = fibering_input(cfg, disc);
    const FiberingBlock blk = cfg.fibering.value_or(FiberingBlock{});
    double lambda = blk.lambda.value_or(cfg.spec.lambda);
    if (!(lambda > 0.0))
        throw std::invalid_argument("fibering requires a positive lambda (config or block)");

    CsvFile csv;
    csv.name = "fibering.csv";
    csv.header = "t,psi,psi1,psi2,phi";
    for (int i = 0; i < blk.n_t; ++i) {
        const double t =
            blk.t_min + (blk.t_max - blk.t_min) * i / static_cast<double>(blk.n_t - 1);
        const FiberingValues v = eval_fibering(d, lambda, t);
        csv.rows.push_back({t, v.psi, v.psi1, v.psi2, v.phi});
    }
    rep.csv_files.push_back(std::move(csv));

    json res;
    res["lambda"] = lambda;
    res["data"] = {{"p2", d.p2}, {"fint", d.f_int}, {"gint", d.g_int}};
    res["cone"] = classify_cone(d.g_int, disc.cone_tol()) == ConeTag::CPlus ? "C+" : "C-";
    if (classify_cone(d.g_int, disc.cone_tol()) == ConeTag::CPlus) {
        res["t_ab"] = maximizer_of_phi(d);
        res["lambda_of_direction"] = lambda_of_direction(d);
    }
    const auto pr = project(d, lambda, 1e-9, disc.cone_tol());
    switch (pr.branch) {
        case ProjectionResult::Branch::TwoRoots:
            res["projection"] = {{"branch", "two_roots"}, {"t_plus", pr.t_plus},
                                 {"t_minus", pr.t_minus}};
            break;
        case ProjectionResult::Branch::Tangent:
            res["projection"] = {{"branch", "tangent"}, {"t_zero", pr.t_zero}};
            break;
        case ProjectionResult::Branch::SingleRoot:
            res["projection"] = {{"branch", "single_root"}, {"t_plus", pr.t_plus}};
            break;
        case ProjectionResult::Branch::NoRoot:
            res["projection"] = {{"branch", "no_root"}};
            break;
    }
    rep.results = std::move(res);
}

void run_lambda_of_u(const RunConfig& cfg, const Discretization& disc, Report& rep) {
    Eigen::VectorXd u;
    if (cfg.direction) {
        if (static_cast<int>(cfg.direction->samples.size()) != disc.size())
            throw std::invalid_argument("direction.samples length must match the grid");
        u = Eigen::Map<const Eigen::VectorXd>(cfg.direction->samples.data(), disc.size());
    } else {
        u = default_direction(disc);
    }
    const ScalarTriple tr = disc.reduce(cfg.spec, u);
    const FiberingData d = fibering_data(cfg.spec, tr);
    json res;
    res["p2"] = tr.p2;
    res["fint"] = tr.f_int;
    res["gint"] = tr.g_int;
    const bool cplus = classify_cone(tr.g_int, disc.cone_tol()) == ConeTag::CPlus;
    res["cone"] = cplus ? "C+" : "C-";
    if (cplus) {
        res["t_ab"] = maximizer_of_phi(d);
        res["lambda_of_direction"] = lambda_of_direction(d);
    }
    rep.results = std::move(res);
}

void run_extremal(const RunConfig& cfg, const Discretization& disc, Report& rep) {
    ExtremalEstimate est;
    resolve_lambda_star(cfg, disc, &est);
    json res;
    res["lambda_star"] = est.lambda_star;
    res["starts_used"] = est.starts_used;
    res["converged"] = est.converged;
    res["terminal_values"] = est.terminal_values;
    json hist = json::array();
    for (const auto& [it, v] : est.history) hist.push_back({it, v});
    res["history"] = std::move(hist);
    rep.results = std::move(res);
    rep.csv_files.push_back(profile_csv("extremal_minimizer.csv", disc, est.minimizer));
}

void run_solve(const RunConfig& cfg, const Discretization& disc, Report& rep) {
    ProblemSpec spec = cfg.spec;
    json res;
    if (cfg.solve && cfg.solve->lambda_frac) {
        const double lstar = resolve_lambda_star(cfg, disc);
        spec.lambda = *cfg.solve->lambda_frac * lstar;
        res["lambda_star"] = lstar;
    }
    if (!(spec.lambda > 0.0))
        throw std::invalid_argument("solve requires lambda > 0 (set lambda or solve.lambda_frac)");

    auto [minus, plus] = solve_pair(disc, spec, cfg.n_starts, cfg.seed);
    res["lambda"] = spec.lambda;
    res["solutions"] = json::array({solution_to_json(disc, spec, minus),
                                    solution_to_json(disc, spec, plus)});
    res["separation_l2"] = discrete_l2_distance(disc, minus.u.coeffs, plus.u.coeffs);
    rep.results = std::move(res);

    for (const NehariSolution* s : {&minus, &plus}) {
        std::string name = std::string("sol_") + branch_name(s->branch) + "_" +
                           fmt_lambda(s->lambda) + ".csv";
        rep.csv_files.push_back(profile_csv(name, disc, s->u.coeffs));
    }
}

void run_sweep(const RunConfig& cfg, const Discretization& disc, Report& rep) {
    if (!cfg.sweep) throw std::invalid_argument("sweep command requires a sweep block");
    const double lstar = resolve_lambda_star(cfg, disc);

    std::vector<double> lambdas = cfg.sweep->lambdas;
    for (double fr : cfg.sweep->fracs) lambdas.push_back(fr * lstar);
    for (int k = 1; k <= cfg.sweep->count; ++k)
        lambdas.push_back(static_cast<double>(k) / cfg.sweep->count * cfg.sweep->frac * lstar);

    CsvFile csv;
    csv.name = "sweep.csv";
    csv.header = "lambda,branch,energy,residual,t_scale";

    json rows = json::array();
    std::optional<ContinuationResult> base;  // built once, for beyond-extremal points
    const int n_steps = cfg.beyond ? cfg.beyond->n_steps : 10;
    for (double lambda : lambdas) {
        ProblemSpec spec = cfg.spec;
        spec.lambda = lambda;
        NehariSolution minus, plus;
        if (lambda < lstar * (1.0 - 1e-9)) {
            std::tie(minus, plus) = solve_pair(disc, spec, cfg.n_starts, cfg.seed);
        } else {
            if (!base)
                base = continuation_at_extremal(disc, cfg.spec, lstar, n_steps, cfg.n_starts,
                                                cfg.seed);
            RestrictedSetParams params =
                RestrictedSetParams::defaults_from(base->minus, base->plus, lstar);
            if (cfg.beyond) {
                if (cfg.beyond->epsilon) params.epsilon = *cfg.beyond->epsilon;
                if (cfg.beyond->delta_margin) params.delta_margin = *cfg.beyond->delta_margin;
                if (cfg.beyond->c_minus) params.c_minus = *cfg.beyond->c_minus;
                if (cfg.beyond->c_plus) params.c_plus = *cfg.beyond->c_plus;
                if (cfg.beyond->d_minus) params.d_minus = *cfg.beyond->d_minus;
                if (cfg.beyond->d_plus) params.d_plus = *cfg.beyond->d_plus;
            }
            BeyondResult br = solve_beyond_extremal(disc, spec, params, *base, lstar);
            minus = std::move(br.minus);
            plus = std::move(br.plus);
        }
        for (const NehariSolution* s : {&minus, &plus}) {
            csv.rows.push_back({lambda, s->branch == Branch::NMinus ? -1.0 : 1.0, s->energy,
                                s->residual_norm, s->t_scale});
            rows.push_back({{"lambda", lambda},
                            {"branch", branch_name(s->branch)},
                            {"energy", s->energy},
                            {"residual", s->residual_norm},
                            {"t_scale", s->t_scale}});
        }
    }
    rep.csv_files.push_back(std::move(csv));
    rep.results = json{{"lambda_star", lstar}, {"rows", std::move(rows)}};
}

void run_check(const RunConfig& cfg, const Discretization& disc, Report& rep) {
    const auto checks = run_property_suite(disc, cfg.spec, cfg.seed);
    int passed = 0, failed = 0;
    json arr = json::array();
    for (const auto& c : checks) {
        (c.ok ? passed : failed)++;
        arr.push_back({{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
    }
    rep.results = json{{"passed", passed}, {"failed", failed}, {"checks", std::move(arr)}};
}

} // namespace

Report run_command(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const Discretization disc = Discretization::build(cfg.spec);

    Report rep;
    if (cfg.command == "fibering")
        run_fibering(cfg, disc, rep);
    else if (cfg.command == "lambda-of-u")
        run_lambda_of_u(cfg, disc, rep);
    else if (cfg.command == "extremal")
        run_extremal(cfg, disc, rep);
    else if (cfg.command == "solve")
        run_solve(cfg, disc, rep);
    else if (cfg.command == "sweep")
        run_sweep(cfg, disc, rep);
    else if (cfg.command == "check")
        run_check(cfg, disc, rep);
    else
        throw std::invalid_argument(
            "unknown command '" + cfg.command +
            "' (expected fibering, lambda-of-u, extremal, solve, sweep, or check)");

    const auto t1 = std::chrono::steady_clock::now();
    rep.metadata["command"] = cfg.command;
    rep.metadata["config"] = cfg.echo;
    rep.metadata["seed"] = cfg.seed;
    rep.metadata["n_starts"] = cfg.n_starts;
    rep.metadata["n_interior"] = disc.size();
    rep.metadata["h"] = disc.spacing();
    rep.metadata["wall_time_s"] = std::chrono::duration<double>(t1 - t0).count();
    return rep;
}

std::vector<std::string> emit_reports(Report& report, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " +
                                     ec.message());

    report.manifest.clear();
    for (const CsvFile& f : report.csv_files) {
        const fs::path path = fs::path(dir) / f.name;
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
        os << f.header << "\n";
        for (const auto& row : f.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) os << ",";
                os << fmt17(row[i]);
            }
            os << "\n";
        }
        if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
        report.manifest.push_back(f.name);
    }

    nlohmann::json doc;
    doc["metadata"] = report.metadata;
    doc["results"] = report.results;
    doc["manifest"] = report.manifest;
    const fs::path path = fs::path(dir) / "report.json";
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    os << doc.dump(2) << "\n";
    if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
    return report.manifest;
}

} // namespace nehari
