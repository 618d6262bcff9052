#pragma once

#include "doppler/atom_physics.hpp"

namespace doppler {

/// Harmonic Ioffe-Pritchard trap. Curvatures in T/m^2, offset field in T,
/// magnetic moment in J/T.
struct TrapConfig {
    double curvature_x = 0.0;
    double curvature_y = 0.0;
    double curvature_z = 0.0;
    double offset_field = 0.0;
    double magnetic_moment = 0.0;

    void validate() const;
};

/// Compressed cloverleaf trap: B''_z = 110 G/cm^2, B''_{x,y} = 750 G/cm^2,
/// B0 = 28 G, mu = 6 mu_B.
TrapConfig stuttgart_cloverleaf();

struct TrapFrequencies {
    double x = 0.0;  // rad/s
    double y = 0.0;
    double z = 0.0;

    double max() const;
};

TrapFrequencies trap_frequencies(const TrapConfig& trap, const AtomSpecies& species);

struct LarmorSafety {
    double larmor_frequency = 0.0;  // rad/s
    double margin = 0.0;            // omega_L / max trap frequency
    bool safe = false;
};

inline constexpr double default_larmor_threshold = 100.0;

LarmorSafety larmor_safety(const TrapConfig& trap, const AtomSpecies& species,
                           double threshold = default_larmor_threshold);

/// Gaussian rms size of a thermal cloud along one trap axis.
double sigma_from_temperature(double temperature, double curvature, double magnetic_moment);
double temperature_from_sigma(double sigma, double curvature, double magnetic_moment);

/// Peak density of a Gaussian cloud of N atoms.
double peak_density(double atom_number, double sigma_x, double sigma_y, double sigma_z);

struct CloudState {
    double atom_number = 0.0;
    double temperature_x = 0.0;  // K
    double temperature_y = 0.0;
    double temperature_z = 0.0;
    double sigma_x = 0.0;  // m
    double sigma_y = 0.0;
    double sigma_z = 0.0;
    double peak_density = 0.0;  // 1/m^3

    /// Thermal equilibrium shape of N atoms in `trap` at the given temperatures.
    static CloudState in_trap(const TrapConfig& trap, double atom_number, double temperature_x,
                              double temperature_y, double temperature_z);
};

/// n0 * lambda_dB^3 with the de Broglie wavelength taken at the geometric
/// mean temperature.
double phase_space_density(const CloudState& state, const AtomSpecies& species);

}  // namespace doppler
