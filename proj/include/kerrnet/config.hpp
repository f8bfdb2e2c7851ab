#pragma once

#include "kerrnet/dynamics.hpp"
#include "kerrnet/errors.hpp"
#include "kerrnet/model.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace kerrnet {

inline constexpr int kSchemaVersion = 1;

/// Invalid configuration. `line` is 1-based in the source document, 0 when the
/// problem comes from a command-line override or has no single location.
class ConfigError : public ContractError {
public:
    ConfigError(const std::string& source, int line, const std::string& message);
    int line() const { return line_; }

private:
    int line_;
};

struct IntegratorConfig {
    double dt_closed = 1e-3;
    double dt_open = 5e-4;
    /// Run length; when absent the ramp arrival time plus hold_time is used.
    std::optional<double> t_max;
    double hold_time = 0.0;
    int cadence = 100;
};

struct SpectrumConfig {
    int grid_points = 721;
    double phi_min = 0.0;
    double phi_max = std::numbers::pi;
    int n_levels = 0;  // 0 = all
    int alc_level = 0;
    int track_level = 0;  // -1 disables tracking
};

struct PassageConfig {
    std::string initial = "ground";  // ground | mes
    int mes_m = 3;
    bool entanglement = true;
};

struct AlphaScanConfig {
    std::vector<double> alphas{1e-4, 3e-4, 1e-3};
};

struct LossyCurve {
    double k = 1.0;
    std::optional<double> alpha;  // absent: alpha_opt from a closed scan over alpha_grid
};

struct GammaCriticalConfig {
    bool enabled = false;
    double k = 1.0;
    double alpha = 0.15;
    std::vector<double> grid;
    double window_lo = std::numbers::pi / 4;
    double window_hi = 0.6 * std::numbers::pi;
};

struct LossyPrepConfig {
    std::string kind = "single_mode_loss";
    std::vector<LossyCurve> curves{{1.0, 0.15}};
    std::vector<double> gammas{0.0, 0.01, 0.02, 0.03, 0.04, 0.05};
    std::vector<double> alpha_grid{0.05, 0.1, 0.15, 0.225, 0.3};
    GammaCriticalConfig gamma_c;
};

struct RobustnessConfig {
    std::string pair = "loss";  // loss | phase_flip
    double gamma = 1.0;
    double t_max = 10.0;
    double phi = std::numbers::pi / 2;
    int mes_m = 3;
};

struct RunConfig {
    int schema_version = kSchemaVersion;
    NetworkParams model;
    NoiseSpec noise;
    RampSchedule ramp;
    IntegratorConfig integrator;
    SpectrumConfig spectrum;
    PassageConfig passage;
    AlphaScanConfig alpha_scan;
    LossyPrepConfig lossy_prep;
    RobustnessConfig robustness;
    std::string output_dir = "out";

    /// Fully resolved document; parsing it again yields an equal config.
    nlohmann::json to_json() const;
};

/// Parses a phase given as a number or as an expression like "pi/2", "5*pi/6", "-pi".
std::optional<double> parse_phase(const std::string& text);

/// Parses a JSON config document, applies dotted `key=value` overrides, and validates.
RunConfig parse_config(const std::string& text, const std::string& source_name = "<config>",
                       const std::vector<std::string>& overrides = {});

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

}  // namespace kerrnet
