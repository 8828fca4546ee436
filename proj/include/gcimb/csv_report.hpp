#pragma once

#include "gcimb/scenario_io.hpp"
#include "gcimb/sensor_network.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace gcimb {

/// Shortest decimal text that round-trips the double; `.` decimal separator
/// regardless of locale, so CSV output is byte-stable across machines.
[[nodiscard]] inline std::string format_number(double value) {
    char buf[32];
    const std::to_chars_result res = std::to_chars(buf, buf + sizeof(buf), value);
    if (res.ec != std::errc{}) throw std::runtime_error("format_number: conversion failed");
    return std::string(buf, res.ptr);
}

/// Audit line embedded at the top of every output file: the full resolved
/// experiment (seed included) as single-line JSON behind a `#` comment.
[[nodiscard]] inline std::string config_comment(const nlohmann::json& resolved) {
    return "# config: " + resolved.dump() + "\n";
}

/// Per-(step, node) table.  Columns are fixed:
/// step,node,mode,local_ospa,fused_ospa,card_local,card_fused — values are
/// single-run records or cross-run means depending on what produced them.
inline void write_step_csv(std::ostream& out, const std::vector<StepAggregate>& rows,
                           WorkMode mode, const nlohmann::json& resolved) {
    out << config_comment(resolved);
    out << "step,node,mode,local_ospa,fused_ospa,card_local,card_fused\n";
    const std::string mode_text = to_string(mode);
    for (const StepAggregate& row : rows) {
        out << row.step << ',' << row.node << ',' << mode_text << ','
            << format_number(row.local_ospa) << ',' << format_number(row.fused_ospa) << ','
            << format_number(row.card_local) << ',' << format_number(row.card_fused) << '\n';
    }
}

/// Whole-experiment metrics as metric,value pairs.
inline void write_summary_csv(std::ostream& out, const MonteCarloSummary& summary,
                              WorkMode mode, const nlohmann::json& resolved) {
    out << config_comment(resolved);
    out << "metric,value\n";
    out << "runs," << summary.runs << '\n';
    out << "mode," << to_string(mode) << '\n';
    out << "mean_local_ospa," << format_number(summary.mean_local_ospa) << '\n';
    out << "mean_fused_ospa," << format_number(summary.mean_fused_ospa) << '\n';
    out << "efficiency," << format_number(summary.efficiency) << '\n';
    out << "mean_approx_error," << format_number(summary.mean_approx_error) << '\n';
}

/// Open for writing in binary mode so line endings stay LF everywhere.
[[nodiscard]] inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write \"" + path + "\"");
    return out;
}

} // namespace gcimb
