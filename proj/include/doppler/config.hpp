#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "doppler/atom_physics.hpp"
#include "doppler/cooling_dynamics.hpp"
#include "doppler/errors.hpp"
#include "doppler/laser.hpp"
#include "doppler/trap_model.hpp"

namespace doppler {

enum class ScenarioKind { dynamics, aspect_scan, intensity_scan, od_scan, steady_state };
enum class GridSpacing { linear, log };

/// How the cloud is reshaped in an aspect-ratio scan.
///
/// `fixed_n0` keeps both N and n0 and solves for the size; `fixed_N` keeps N
/// and the radial size of the spherical reference cloud, stretches the axial
/// size and recomputes n0.
enum class AspectMode { fixed_n0, fixed_N };

struct Grid {
    double min = 0.0;
    double max = 1.0;
    int count = 2;
    GridSpacing spacing = GridSpacing::linear;

    std::vector<double> values() const;
};

struct CloudSpec {
    double atom_number = 1e8;
    double temperature_z = 1e-3;  // K
    double temperature_y = 1e-3;  // K
    std::optional<double> sigma_z;       // m
    std::optional<double> sigma_y;       // m
    std::optional<double> peak_density;  // 1/m^3
};

struct ScenarioConfig {
    std::string species_preset;  // empty when fully inline
    AtomSpecies species;
    std::string trap_preset;
    TrapConfig trap;
    double larmor_threshold = default_larmor_threshold;

    LaserConfig laser;
    std::optional<double> polarizing_detuning;  // overrides the value at trap center
    double cooling_duration = 0.3;              // s, for the depolarization estimate

    CloudSpec cloud;

    ScenarioKind kind = ScenarioKind::steady_state;
    std::optional<Grid> grid;
    double duration = 0.5;
    double sample_interval = 1e-3;
    bool self_consistent = true;
    HeatingMode mode = HeatingMode::consistency;
    CapPolicy cap_policy = CapPolicy::preserve_steady_state;
    AspectMode aspect_mode = AspectMode::fixed_n0;
    double heating_rate = 0.0;  // J/s
    std::optional<double> kappa_y;
    std::optional<double> kappa_z;
    std::optional<double> kappa;
    std::optional<double> kappa_y_ref;
    std::optional<double> kappa_ref;
    double od_ref = 4.5;
    std::string output;

    /// Sigma+ detuning used by every runner.
    double effective_polarizing_detuning() const;

    /// Every resolved setting as (section.key, value), in a fixed order.
    std::vector<std::pair<std::string, std::string>> resolved() const;
};

struct ConfigDiagnostic {
    int line = 0;  // 0 when not tied to a line
    std::string message;
};

class ConfigError : public ValidationError {
  public:
    explicit ConfigError(std::vector<ConfigDiagnostic> diagnostics);
    const std::vector<ConfigDiagnostic>& diagnostics() const { return diagnostics_; }

  private:
    std::vector<ConfigDiagnostic> diagnostics_;
};

/// Parses the sectioned key=value format. All problems are collected and
/// reported together.
ScenarioConfig parse_config(std::string_view text);

/// Config text for a named built-in scenario ("cooling_dynamics",
/// "aspect_scan", "intensity_scan", "od_scan",
/// "steady_state").
std::string preset_scenario_text(std::string_view name);
std::vector<std::string> preset_scenario_names();

std::string_view to_string(ScenarioKind kind);
std::string_view to_string(HeatingMode mode);

}  // namespace doppler
