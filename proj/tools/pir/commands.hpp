#pragma once

#include <optional>
#include <string>

#include "config.hpp"

namespace pir::cli {

/// Flags shared by every subcommand plus the per-command data flags.
struct CommandContext {
    Config config;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::string command_line;

    std::string data;      ///< estimate: state CSV, covid: WHO CSV
    std::string truth;     ///< estimate: ground-truth parameter CSV
    std::string manifest;  ///< reynolds: snapshot manifest
    std::optional<double> manufactured_nu;
    std::string u_path, v_path, w_path;  ///< convert inputs
};

int cmd_simulate(CommandContext& ctx);
int cmd_estimate(CommandContext& ctx);
int cmd_sweep(CommandContext& ctx);
int cmd_covid(CommandContext& ctx);
int cmd_reynolds(CommandContext& ctx);
int cmd_convert(CommandContext& ctx);

}  // namespace pir::cli
