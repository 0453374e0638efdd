#pragma once

#include "nehari/config.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace nehari {

struct CsvFile {
    std::string name;
    std::string header;
    std::vector<std::vector<double>> rows;
};

/// Full outcome of a command: metadata (config echo, sizes, wall time),
/// numeric results, and the files to be emitted. Re-running with the same
/// config and seed reproduces every numeric field of `results` exactly.
struct Report {
    nlohmann::json metadata;
    nlohmann::json results;
    std::vector<CsvFile> csv_files;
    std::vector<std::string> manifest;  // filled by emit_reports
};

/// Dispatches the config's command and collects its results.
Report run_command(const RunConfig& cfg);

/// Writes report.json and all CSV payloads into dir (creating it); returns
/// the manifest, which is also recorded inside report.json.
std::vector<std::string> emit_reports(Report& report, const std::string& dir);

} // namespace nehari
