#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "doppler/config.hpp"

namespace doppler {

/// Result table of a scenario run. An empty cell marks a divergent value
/// (no steady state) and is written as "divergent".
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::optional<double>>> rows;

    std::size_t column(std::string_view name) const;
    std::optional<double> at(std::size_t row, std::string_view name) const;
};

Table run_aspect_scan(const ScenarioConfig& config);
Table run_dynamics(const ScenarioConfig& config);
Table run_intensity_scan(const ScenarioConfig& config);
Table run_od_scan(const ScenarioConfig& config);
Table run_steady_state(const ScenarioConfig& config);
Table run_scenario(const ScenarioConfig& config);

/// Cloud shape of the [cloud] section: explicit sizes if given, otherwise the
/// thermal shape in the trap. The peak density falls back to N and the sizes.
CloudShape resolve_cloud_shape(const ScenarioConfig& config);

/// CSV with a "# key=value" provenance header echoing the resolved config.
void write_csv(std::ostream& out, const ScenarioConfig& config, const Table& table);

/// Worker count for scans: DOPPLER_REABS_THREADS if set, else the hardware
/// concurrency.
unsigned worker_count();

}  // namespace doppler
