#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "doppler/atom_physics.hpp"
#include "doppler/laser.hpp"
#include "doppler/reabsorption.hpp"
#include "doppler/trap_model.hpp"

namespace doppler {

/// How the recoil heating rates are normalized.
///
/// `verbatim` uses the cooling and heating rates exactly as derived from the
/// photon-counting argument; its fixed point is four times colder than the
/// closed-form steady state. `consistency` multiplies the heating rates by 4
/// so that the rate equations relax to the closed-form steady state.
enum class HeatingMode { verbatim, consistency };

/// How the quarter-trap-period limit on the cooling rate enters the rate
/// equations.
///
/// `preserve_steady_state` limits the relaxation rate: when the cooling rate
/// of an axis is capped, its heating rate is scaled by the same factor, so
/// the axis relaxes no faster than a quarter period towards an unchanged
/// steady state. `hard` clips only the cooling rate, which raises the fixed
/// point of a capped axis.
enum class CapPolicy { preserve_steady_state, hard };

/// Cooling and heating rates in 1/s. Cooling rates are already capped at
/// 2 omega / pi; `cap_scale_*` is capped / uncapped cooling rate (1 when the
/// cap is inactive).
struct RateSet {
    double cool_rate_z = 0.0;
    double cool_rate_y = 0.0;
    double heat_rate_z = 0.0;
    double heat_rate_y = 0.0;
    bool capped_z = false;
    bool capped_y = false;
    double cap_scale_z = 1.0;
    double cap_scale_y = 1.0;
};

RateSet rates(const LaserConfig& laser, const KappaSet& kappas, double polarizing_detuning,
              const AtomSpecies& species, const TrapConfig& trap, HeatingMode mode);

/// (1 + 4 D^2) / (4 |D|); equals 1 at the optimum D = -1/2.
double detuning_factor(double polarizing_detuning);

/// Steady-state temperatures in K. `radial` is empty when kappa_y = 0: the
/// radial energy then grows without bound.
struct SteadyState {
    double axial = 0.0;
    std::optional<double> radial;
};

SteadyState steady_state(const KappaSet& kappas, double polarizing_detuning,
                         const AtomSpecies& species);

/// Radial steady state with an additional constant heating rate R (J/s).
/// Empty when the intensity vanishes while R > 0, or kappa_y = 0.
std::optional<double> steady_state_with_heating(double kappa_y, double kappa, double heating_rate,
                                                double intensity, double polarizing_detuning,
                                                const AtomSpecies& species);

/// Radial steady state as a function of the radial optical density, with
/// kappa_y = kappa_y_star * OD and kappa = kappa_star * OD. Empty for OD = 0.
std::optional<double> steady_state_vs_od(double kappa_y_star, double kappa_star,
                                         double optical_density, double heating_rate,
                                         double intensity, double polarizing_detuning,
                                         const AtomSpecies& species);

/// T(t) = T_inf + (T0 - T_inf) exp(-t / tau).
double transient(double initial, double final, double tau, double t);

/// Right-hand side of the rate equations in K/s for the given rates:
/// dT/dt = (E_R / 2 k_B) * heat_rate * s - T * cool_rate, where s is the cap
/// scale under CapPolicy::preserve_steady_state and 1 otherwise.
struct TemperatureDerivative {
    double axial = 0.0;
    double radial = 0.0;
};

TemperatureDerivative temperature_derivative(double temperature_z, double temperature_y,
                                             const RateSet& rates, double recoil_energy,
                                             CapPolicy policy);

struct TraceSample {
    double t = 0.0;
    double temperature_z = 0.0;
    double temperature_y = 0.0;
    double sigma_z = 0.0;
    double sigma_y = 0.0;
    double peak_density = 0.0;
    KappaSet kappas;
};

struct TemperatureTrace {
    std::vector<TraceSample> samples;
};

struct SimulationOptions {
    double duration = 0.5;           // s
    double sample_interval = 1e-3;   // s between trace samples
    double max_step = 0.2e-3;        // s
    bool self_consistent = true;     // re-evaluate cloud shape and kappas every step
    HeatingMode mode = HeatingMode::consistency;
    CapPolicy cap_policy = CapPolicy::preserve_steady_state;
    /// Overrides the sigma+ detuning at trap center computed from the laser.
    std::optional<double> polarizing_detuning;
    /// Use these kappas instead of evaluating them from the initial shape
    /// (only with self_consistent = false).
    std::optional<KappaSet> frozen_kappas;
};

/// Sigma+ detuning of the polarized sublevel at the trap center.
double polarizing_detuning_at_center(const LaserConfig& laser, const TrapConfig& trap,
                                     const AtomSpecies& species);

/// Integrates the axial and radial temperature rate equations with a fixed
/// step RK4. The radial x axis follows y. The atom number is constant.
TemperatureTrace simulate(const CloudState& initial, const TrapConfig& trap,
                          const AtomSpecies& species, const LaserConfig& laser,
                          const SimulationOptions& options);

/// Cloud state of a trace sample, with T_x = T_y.
CloudState cloud_state(const TraceSample& sample, const TrapConfig& trap, double atom_number);

void write_trace_csv(std::ostream& out, const TemperatureTrace& trace);

/// Reads a trace written by write_trace_csv (extra columns and '#' comment
/// lines are ignored).
TemperatureTrace read_trace_csv(std::istream& in);

}  // namespace doppler
