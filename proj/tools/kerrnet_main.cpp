#include "kerrnet/config.hpp"
#include "kerrnet/scenarios.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct RunOptions {
    std::string config;
    std::string preset;
    std::vector<std::string> overrides;
    std::string out;
};

kerrnet::RunConfig resolve(const RunOptions& opts) {
    if (opts.config.empty() == opts.preset.empty()) {
        throw kerrnet::ConfigError("<command line>", 0, "give exactly one of --config or --preset");
    }
    if (!opts.preset.empty()) {
        const auto text = kerrnet::preset_text(opts.preset);
        if (!text) {
            throw kerrnet::ConfigError("<command line>", 0, "unknown preset '" + opts.preset + "'");
        }
        return kerrnet::parse_config(*text, "preset:" + opts.preset, opts.overrides);
    }
    return kerrnet::load_config(opts.config, opts.overrides);
}

int run(const std::string& subcommand, const RunOptions& opts) {
    const std::string who = "kerrnet " + subcommand;
    try {
        const auto cfg = resolve(opts);
        const auto result = kerrnet::run_scenario(subcommand, cfg);
        const std::string dir = opts.out.empty() ? cfg.output_dir : opts.out;
        for (const auto& path : kerrnet::write_outputs(result, cfg, dir)) {
            std::cout << path.string() << "\n";
        }
        return kExitOk;
    } catch (const kerrnet::ConfigError& e) {
        std::cerr << who << ": invalid config: " << e.what() << "\n";
        return kExitConfig;
    } catch (const kerrnet::NumericalError& e) {
        std::cerr << who << ": numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const kerrnet::ContractError& e) {
        std::cerr << who << ": invalid config: " << e.what() << "\n";
        return kExitConfig;
    } catch (const kerrnet::CapacityError& e) {
        std::cerr << who << ": invalid config: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << who << ": error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kerr cavity network simulator: spectra, passages, open dynamics and entanglement of the MES"};
    app.set_version_flag("--version", std::string("kerrnet ") + KERRNET_VERSION);
    app.require_subcommand(1);

    std::map<std::string, RunOptions> options;
    const std::map<std::string, std::string> blurbs{
        {"spectrum", "Eigenvalues versus phase, avoided crossings, tracked ground state"},
        {"passage", "Phase-ramp passage with fidelity and entanglement observables"},
        {"lossy-prep", "Peak fidelity versus loss rate, optional critical rate"},
        {"alpha-scan", "Peak fidelity versus ramp speed"},
        {"robustness", "MES fidelity under standard and coupled noise channels"},
    };
    for (const auto& name : kerrnet::scenario_names()) {
        auto& o = options[name];
        auto* sub = app.add_subcommand(name, blurbs.at(name));
        sub->add_option("--config", o.config, "JSON run configuration");
        sub->add_option("--preset", o.preset, "Shipped preset name (fig1 ... fig6)");
        sub->add_option("--set", o.overrides, "Dotted override key=value, repeatable")->allow_extra_args(false);
        sub->add_option("--out", o.out, "Output directory (overrides output.dir)");
    }
    std::string preset_name;
    auto* preset = app.add_subcommand("preset", "Print a shipped preset, or list them without a name");
    preset->add_option("name", preset_name, "Preset name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (preset->parsed()) {
        if (preset_name.empty()) {
            for (const auto& n : kerrnet::preset_names()) {
                std::cout << n << "\n";
            }
            return kExitOk;
        }
        const auto text = kerrnet::preset_text(preset_name);
        if (!text) {
            std::cerr << "kerrnet preset: unknown preset '" << preset_name << "'\n";
            return kExitConfig;
        }
        std::cout << *text;
        return kExitOk;
    }
    for (const auto& [name, o] : options) {
        if (app.got_subcommand(name)) {
            return run(name, o);
        }
    }
    return kExitConfig;
}
