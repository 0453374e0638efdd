#include "nehari/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

int main(int argc, char** argv) {
    CLI::App app{"Nehari-manifold solver for the fractional Kirchhoff concave-convex problem"};

    std::string command, config_path, out_dir;
    std::int64_t seed = -1;
    app.add_option("command", command, "fibering | lambda-of-u | extremal | solve | sweep | check")
        ->required();
    app.add_option("--config", config_path, "JSON config file")->required();
    app.add_option("--seed", seed, "override the config seed");
    app.add_option("--out", out_dir, "override the output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        std::ifstream is(config_path);
        if (!is) {
            std::cerr << "error: cannot read config file '" << config_path << "'\n";
            return 1;
        }
        std::ostringstream buf;
        buf << is.rdbuf();

        nehari::RunConfig cfg = nehari::parse_config(buf.str());
        cfg.command = command;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (!out_dir.empty()) cfg.output_dir = out_dir;

        nehari::Report report = nehari::run_command(cfg);
        const auto manifest = nehari::emit_reports(report, cfg.output_dir);

        if (command == "extremal" || command == "solve" || command == "sweep") {
            if (report.results.contains("lambda_star"))
                std::cout << "lambda_star = " << report.results["lambda_star"].get<double>()
                          << "\n";
        }
        if (command == "check") {
            for (const auto& c : report.results["checks"])
                std::cout << (c["ok"].get<bool>() ? "PASS " : "FAIL ")
                          << c["name"].get<std::string>() << ": "
                          << c["detail"].get<std::string>() << "\n";
            std::cout << report.results["passed"].get<int>() << " passed, "
                      << report.results["failed"].get<int>() << " failed\n";
            if (report.results["failed"].get<int>() > 0) return 1;
        }
        for (const auto& f : manifest) std::cout << "wrote " << cfg.output_dir << "/" << f << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
