#pragma once

#include <string>

#include "doppler/laser.hpp"

namespace doppler {

/// Cooling transition J -> J+1 of a spin-polarized atom.
struct AtomSpecies {
    std::string name;
    double mass = 0.0;                  // kg
    double wavelength = 0.0;            // m
    double linewidth = 0.0;             // Gamma, rad/s
    double saturation_intensity = 0.0;  // W/m^2
    int j_ground = 0;
    int j_excited = 1;
    double l_ground = 0.0;
    double s_ground = 0.0;
    double l_excited = 0.0;
    double s_excited = 0.0;
    int m_j = 0;  // polarized ground sublevel

    void validate() const;

    double g_ground() const;
    double g_excited() const;
    /// mu = m_J g_J mu_B for the polarized sublevel.
    double magnetic_moment() const;
};

/// 52Cr, 7S3 -> 7P4 at 425.55 nm, polarized in m_J = 3.
AtomSpecies chromium52();

struct DerivedAtomConstants {
    double wavenumber = 0.0;          // 1/m
    double reduced_wavelength = 0.0;  // m
    double recoil_energy = 0.0;       // J
    double doppler_temperature = 0.0; // K
    double resonant_cross_section = 0.0;  // m^2
};

DerivedAtomConstants derive_constants(const AtomSpecies& species);

/// Photon polarization relative to the quantization axis; the value is the
/// change q of the magnetic quantum number.
enum class Polarization : int { sigma_minus = -1, pi = 0, sigma_plus = 1 };

/// |<J m_g; 1 q | J+1 m_g+q>|^2 in closed form.
double cg_squared(int j, int m_g, Polarization q);

/// Lande factor of a fine-structure level in LS coupling (g_s = 2).
double lande_g(double l, double s, double j);

/// Detuning from the Zeeman-shifted transition m_g -> m_g+q in field B,
/// units of Gamma. A positive shift of the transition frequency lowers the
/// effective detuning.
double effective_detuning(double laser_detuning, double field, const AtomSpecies& species,
                          int m_g, Polarization q);

/// Laser detuning that places the polarizing (sigma+) transition of the
/// polarized sublevel at `polarizing_detuning` in field B.
double laser_detuning_for(double polarizing_detuning, double field, const AtomSpecies& species);

/// Low-saturation scattering rate (Gamma/2) 2 I cg^2 / (1 + 4 detuning^2), 1/s.
double scattering_rate(double linewidth, double intensity, double detuning, double cg2);

struct DepolarizationAssessment {
    double polarizing_rate = 0.0;    // 1/s
    double depolarizing_rate = 0.0;  // 1/s, pi and sigma- summed
    double ratio = 0.0;
    double loss_fraction = 0.0;
};

/// Compares the unwanted pi/sigma- scattering driven by the impure
/// polarization fraction with the sigma+ cooling rate at trap center.
/// Every depolarizing event is counted as a lost atom.
DepolarizationAssessment depolarization_assessment(const AtomSpecies& species,
                                                   const LaserConfig& laser,
                                                   double offset_field,
                                                   double cooling_duration);

}  // namespace doppler
