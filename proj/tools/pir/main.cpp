#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "pir/error.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

int exit_code_for(pir::ErrorKind kind) {
    using pir::ErrorKind;
    switch (kind) {
        case ErrorKind::InvalidArgument:
            return kUsage;
        case ErrorKind::RankDeficient:
        case ErrorKind::UnderDetermined:
        case ErrorKind::DegenerateDenominator:
        case ErrorKind::NonFiniteState:
        case ErrorKind::DivisionByZero:
        case ErrorKind::AllZeroColumn:
        case ErrorKind::NonPhysical:
            return kNumerical;
        default:
            return kData;
    }
}

}  // namespace

int main(int argc, char** argv) {
    using pir::cli::CommandContext;

    CLI::App app{"Parameter estimation by regression on simulated and observed dynamics"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    CommandContext ctx;
    std::uint64_t seed = 0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key=value configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", ctx.out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", seed, "random seed, overrides the config");
        sub->add_option("--set", overrides, "extra key=value setting, repeatable");
    };

    auto* simulate = app.add_subcommand("simulate", "integrate a model and write its trajectory");
    common(simulate);

    auto* estimate = app.add_subcommand("estimate", "estimate constant or time-varying parameters");
    common(estimate);
    estimate->add_option("--data", ctx.data, "state CSV (t,<states>); simulated from the config when absent")
        ->check(CLI::ExistingFile);
    estimate->add_option("--truth", ctx.truth, "ground-truth parameter CSV (t,<parameters>)")->check(CLI::ExistingFile);

    auto* sweep = app.add_subcommand("sweep", "random parameter sweep with error thresholds");
    common(sweep);

    auto* covid = app.add_subcommand("covid", "build compartments from daily counts and estimate beta(t)");
    common(covid);
    covid->add_option("--data", ctx.data, "daily counts CSV; synthetic SIR data from the config when absent")
        ->check(CLI::ExistingFile);

    auto* reynolds = app.add_subcommand("reynolds", "estimate the Reynolds number from vorticity snapshots");
    common(reynolds);
    reynolds->add_option("--manifest", ctx.manifest, "snapshot manifest")->check(CLI::ExistingFile);
    reynolds->add_option("--manufactured", ctx.manufactured_nu, "use the manufactured flow with this viscosity");

    auto* convert = app.add_subcommand("convert", "convert column text exports to a snapshot manifest");
    common(convert);
    convert->add_option("--u", ctx.u_path, "u columns")->check(CLI::ExistingFile);
    convert->add_option("--v", ctx.v_path, "v columns")->check(CLI::ExistingFile);
    convert->add_option("--w", ctx.w_path, "vorticity columns")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    for (int i = 0; i < argc; ++i) ctx.command_line += (i ? " " : "") + std::string(argv[i]);

    try {
        if (!config_path.empty()) ctx.config = pir::cli::Config::from_file(config_path);
        for (const auto& o : overrides) ctx.config.set(o);
        for (auto* sub : app.get_subcommands()) {
            if (sub->count("--seed")) ctx.seed = seed;
        }
        if (*simulate) return pir::cli::cmd_simulate(ctx);
        if (*estimate) return pir::cli::cmd_estimate(ctx);
        if (*sweep) return pir::cli::cmd_sweep(ctx);
        if (*covid) return pir::cli::cmd_covid(ctx);
        if (*reynolds) return pir::cli::cmd_reynolds(ctx);
        if (*convert) return pir::cli::cmd_convert(ctx);
    } catch (const pir::cli::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\nrun with --help for usage\n";
        return kUsage;
    } catch (const pir::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    }
    return kUsage;
}
