#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qbm/errors.hpp"
#include "qbm/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct VerbArgs {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    bool small = false;
};

CLI::App* add_verb(CLI::App& app, const std::string& name, const std::string& help, VerbArgs& args) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", args.config, "JSON config or a manifest.json from an earlier run")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", args.seed, "Seed override (u64)");
    sub->add_flag("--small", args.small, "Reduced preset (n = 4, fewer instances)");
    return sub;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Desk-scale quantum Boltzmann machine laboratory"};
    app.set_version_flag("--version", qbm::kVersionTag);
    app.require_subcommand(1);

    VerbArgs args;
    add_verb(app, "pretrain", "Compare pre-training strategies on a target", args);
    add_verb(app, "train", "Run (stochastic) gradient descent and write a trace", args);
    add_verb(app, "scan-hessian", "Hessian spectrum scan over random models", args);
    add_verb(app, "scan-scaling", "Iterations-to-epsilon versus n or 1/epsilon", args);
    add_verb(app, "bounds", "Evaluate the iteration and sample-count bounds", args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        const auto command = qbm::command_from_string(app.get_subcommands().front()->get_name());
        const std::filesystem::path config_path = args.config;
        qbm::RunOptions options;
        options.out_dir = args.out;
        options.seed = args.seed;
        options.small = args.small;
        options.config_dir = std::filesystem::absolute(config_path).parent_path();
        const auto result = qbm::run_command(command, qbm::load_config(config_path), options);
        std::cout << result.summary.dump(2) << '\n';
        for (const auto& f : result.files) std::cerr << "wrote " << f.string() << '\n';
        return kExitOk;
    } catch (const qbm::NumericalAbort& e) {
        std::cerr << "numerical abort: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const qbm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const qbm::ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const qbm::DimensionError& e) {
        std::cerr << "dimension error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const qbm::ContractError& e) {
        std::cerr << "missing target information: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
