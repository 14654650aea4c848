#pragma once

#include <filesystem>

#include "fkpp/config.hpp"

namespace fkpp {

/// Subcommand entry points.  Exit codes: 0 pass, 1 computational failure
/// (with a machine-readable fail_reason=<token> line in report.txt),
/// 2 configuration or I/O error.
int cmd_op_test(const RunConfig& cfg, const std::filesystem::path& out_dir);
int cmd_solve_front(const RunConfig& cfg, const std::filesystem::path& out_dir);
int cmd_combustion_speed(const RunConfig& cfg, const std::filesystem::path& out_dir);
int cmd_critical_speed(const RunConfig& cfg, const std::filesystem::path& out_dir);
int cmd_diagnose(const RunConfig& cfg, const std::filesystem::path& out_dir,
                 const std::filesystem::path& front_csv);
int cmd_sweep(const RunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace fkpp
