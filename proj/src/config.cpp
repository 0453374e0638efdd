#include "nehari/config.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

namespace nehari {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            fail("unknown config key '" + it.key() + "' in " + where);
    }
}

double get_num(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) fail("missing required key '" + key + "' in " + where);
    if (!obj[key].is_number()) fail("key '" + key + "' in " + where + " must be a number");
    return obj[key].get<double>();
}

double get_num_or(const json& obj, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) fail("key '" + key + "' must be a number");
    return obj[key].get<double>();
}

std::optional<double> get_opt_num(const json& obj, const std::string& key) {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj[key].is_number()) fail("key '" + key + "' must be a number");
    return obj[key].get<double>();
}

std::vector<double> get_num_array(const json& arr, const std::string& where) {
    if (!arr.is_array()) fail(where + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_number()) fail(where + " must contain only numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

WeightDescriptor parse_weight(const json& obj, const std::string& name) {
    if (!obj.is_object()) fail("weight '" + name + "' must be an object");
    if (obj.contains("samples")) {
        require_keys(obj, "weight '" + name + "'", {"samples"});
        return WeightDescriptor::from_samples(
            get_num_array(obj["samples"], "weight '" + name + "' samples"));
    }
    require_keys(obj, "weight '" + name + "'", {"preset", "coeffs"});
    if (!obj.contains("preset") || !obj["preset"].is_string())
        fail("weight '" + name + "' requires a string 'preset' (or literal 'samples')");
    WeightDescriptor w;
    w.kind = WeightDescriptor::Kind::Preset;
    w.preset = obj["preset"].get<std::string>();
    if (obj.contains("coeffs")) w.coeffs = get_num_array(obj["coeffs"], "coeffs");
    // normalize preset coefficient counts
    if (w.preset == "constant" && w.coeffs.size() != 1)
        fail("constant preset takes exactly 1 coefficient");
    if (w.preset == "quadratic" && w.coeffs.size() != 3)
        fail("quadratic preset takes exactly 3 coefficients (c0 + c1 x + c2 x^2)");
    if (w.preset == "bump" && w.coeffs.size() != 3)
        fail("bump preset takes exactly 3 coefficients (amplitude, center, width)");
    if (w.preset != "constant" && w.preset != "quadratic" && w.preset != "bump")
        fail("unknown weight preset '" + w.preset + "'");
    return w;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("config parse error: ") + e.what());
    }
    if (!doc.is_object()) fail("config document must be a JSON object");

    require_keys(doc, "config",
                 {"a", "b", "theta", "gamma", "p", "s", "lambda", "domain", "f", "g", "seed",
                  "n_starts", "output_dir", "fibering", "sweep", "beyond", "solve",
                  "direction"});

    RunConfig cfg;
    cfg.echo = doc;
    cfg.spec.a = get_num(doc, "a", "config");
    cfg.spec.b = get_num(doc, "b", "config");
    cfg.spec.theta = get_num(doc, "theta", "config");
    cfg.spec.gamma = get_num(doc, "gamma", "config");
    cfg.spec.p = get_num(doc, "p", "config");
    cfg.spec.s = get_num(doc, "s", "config");
    cfg.spec.lambda = get_num_or(doc, "lambda", 0.0);

    if (doc.contains("domain")) {
        const json& dom = doc["domain"];
        require_keys(dom, "domain", {"xmin", "xmax", "n"});
        cfg.spec.domain.x_min = get_num(dom, "xmin", "domain");
        cfg.spec.domain.x_max = get_num(dom, "xmax", "domain");
        if (!dom.contains("n") || !dom["n"].is_number_integer())
            fail("domain requires an integer 'n'");
        cfg.spec.domain.n_interior = dom["n"].get<int>();
    }
    if (doc.contains("f")) cfg.spec.f_weight = parse_weight(doc["f"], "f");
    if (doc.contains("g")) cfg.spec.g_weight = parse_weight(doc["g"], "g");

    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer()) fail("seed must be an integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("n_starts")) {
        if (!doc["n_starts"].is_number_integer() || doc["n_starts"].get<int>() < 1)
            fail("n_starts must be a positive integer");
        cfg.n_starts = doc["n_starts"].get<int>();
    }
    if (doc.contains("output_dir")) {
        if (!doc["output_dir"].is_string()) fail("output_dir must be a string");
        cfg.output_dir = doc["output_dir"].get<std::string>();
    }

    if (doc.contains("fibering")) {
        const json& fb = doc["fibering"];
        require_keys(fb, "fibering", {"p2", "fint", "gint", "lambda", "tmin", "tmax", "nt"});
        FiberingBlock blk;
        blk.p2 = get_opt_num(fb, "p2");
        blk.fint = get_opt_num(fb, "fint");
        blk.gint = get_opt_num(fb, "gint");
        blk.lambda = get_opt_num(fb, "lambda");
        blk.t_min = get_num_or(fb, "tmin", blk.t_min);
        blk.t_max = get_num_or(fb, "tmax", blk.t_max);
        if (fb.contains("nt")) {
            if (!fb["nt"].is_number_integer() || fb["nt"].get<int>() < 2)
                fail("fibering.nt must be an integer >= 2");
            blk.n_t = fb["nt"].get<int>();
        }
        if (!(blk.t_min > 0.0 && blk.t_max > blk.t_min))
            fail("fibering requires 0 < tmin < tmax");
        cfg.fibering = blk;
    }

    if (doc.contains("sweep")) {
        const json& sw = doc["sweep"];
        require_keys(sw, "sweep", {"lambdas", "fracs", "count", "frac"});
        SweepBlock blk;
        if (sw.contains("lambdas")) blk.lambdas = get_num_array(sw["lambdas"], "sweep.lambdas");
        if (sw.contains("fracs")) blk.fracs = get_num_array(sw["fracs"], "sweep.fracs");
        if (sw.contains("count")) {
            if (!sw["count"].is_number_integer() || sw["count"].get<int>() < 1)
                fail("sweep.count must be a positive integer");
            blk.count = sw["count"].get<int>();
            blk.frac = get_num(sw, "frac", "sweep");
        }
        if (blk.lambdas.empty() && blk.fracs.empty() && blk.count == 0)
            fail("sweep requires 'lambdas', 'fracs', or a (count, frac) rule");
        cfg.sweep = blk;
    }

    if (doc.contains("beyond")) {
        const json& by = doc["beyond"];
        require_keys(by, "beyond",
                     {"epsilon", "delta_margin", "c_minus", "c_plus", "d_minus", "d_plus",
                      "lambda_frac", "n_steps"});
        BeyondBlock blk;
        blk.epsilon = get_opt_num(by, "epsilon");
        blk.delta_margin = get_opt_num(by, "delta_margin");
        blk.c_minus = get_opt_num(by, "c_minus");
        blk.c_plus = get_opt_num(by, "c_plus");
        blk.d_minus = get_opt_num(by, "d_minus");
        blk.d_plus = get_opt_num(by, "d_plus");
        blk.lambda_frac = get_opt_num(by, "lambda_frac");
        if (by.contains("n_steps")) {
            if (!by["n_steps"].is_number_integer() || by["n_steps"].get<int>() < 2)
                fail("beyond.n_steps must be an integer >= 2");
            blk.n_steps = by["n_steps"].get<int>();
        }
        cfg.beyond = blk;
    }

    if (doc.contains("solve")) {
        const json& so = doc["solve"];
        require_keys(so, "solve", {"lambda_frac"});
        SolveBlock blk;
        blk.lambda_frac = get_opt_num(so, "lambda_frac");
        cfg.solve = blk;
    }

    if (doc.contains("direction")) {
        const json& di = doc["direction"];
        require_keys(di, "direction", {"samples"});
        DirectionBlock blk;
        blk.samples = get_num_array(di["samples"], "direction.samples");
        cfg.direction = blk;
    }

    cfg.spec.validate();
    return cfg;
}

} // namespace nehari
