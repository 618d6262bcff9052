#include "doppler/atom_physics.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include <fmt/format.h>

#include "doppler/constants.hpp"
#include "doppler/errors.hpp"

namespace doppler {

void LaserConfig::validate() const
{
    if (!(intensity >= 0.0))
        throw ValidationError(fmt::format("laser intensity must be >= 0, got {}", intensity));
    if (!(attenuation_factor >= 1.0))
        throw ValidationError(
            fmt::format("attenuation factor must be >= 1, got {}", attenuation_factor));
    if (!(polarization_impurity >= 0.0 && polarization_impurity <= 1.0))
        throw ValidationError(fmt::format("polarization impurity must lie in [0, 1], got {}",
                                          polarization_impurity));
    if (!std::isfinite(detuning))
        throw ValidationError("laser detuning must be finite");
}

void AtomSpecies::validate() const
{
    if (!(mass > 0.0))
        throw ValidationError(fmt::format("species '{}': mass must be positive", name));
    if (!(wavelength > 0.0))
        throw ValidationError(fmt::format("species '{}': wavelength must be positive", name));
    if (!(linewidth > 0.0))
        throw ValidationError(fmt::format("species '{}': linewidth must be positive", name));
    if (!(saturation_intensity > 0.0))
        throw ValidationError(
            fmt::format("species '{}': saturation intensity must be positive", name));
    if (j_ground < 0)
        throw ValidationError(fmt::format("species '{}': J_ground must be >= 0", name));
    if (j_excited != j_ground + 1)
        throw ValidationError(fmt::format(
            "species '{}': only J -> J+1 transitions are modelled (J={}, J'={})", name,
            j_ground, j_excited));
    if (std::abs(m_j) > j_ground)
        throw ValidationError(
            fmt::format("species '{}': |m_J| = {} exceeds J = {}", name, std::abs(m_j), j_ground));
}

double AtomSpecies::g_ground() const { return lande_g(l_ground, s_ground, j_ground); }
double AtomSpecies::g_excited() const { return lande_g(l_excited, s_excited, j_excited); }

double AtomSpecies::magnetic_moment() const
{
    return m_j * g_ground() * constants::bohr_magneton;
}

AtomSpecies chromium52()
{
    AtomSpecies cr;
    cr.name = "Cr52";
    cr.mass = 52.0 * constants::atomic_mass_unit;
    cr.wavelength = 425.55 * units::nanometre;
    cr.linewidth = 2.0 * constants::pi * 5.02 * units::megahertz;
    cr.saturation_intensity = 85.2;
    cr.j_ground = 3;
    cr.j_excited = 4;
    cr.l_ground = 0.0;  // 7S3
    cr.s_ground = 3.0;
    cr.l_excited = 1.0;  // 7P4
    cr.s_excited = 3.0;
    cr.m_j = 3;
    return cr;
}

DerivedAtomConstants derive_constants(const AtomSpecies& species)
{
    species.validate();
    using namespace constants;
    DerivedAtomConstants c;
    c.wavenumber = 2.0 * pi / species.wavelength;
    c.reduced_wavelength = species.wavelength / (2.0 * pi);
    c.resonant_cross_section = 6.0 * pi * c.reduced_wavelength * c.reduced_wavelength;
    const double recoil_momentum = hbar * c.wavenumber;
    c.recoil_energy = recoil_momentum * recoil_momentum / (2.0 * species.mass);
    c.doppler_temperature = hbar * species.linewidth / (2.0 * boltzmann);
    return c;
}

double cg_squared(int j, int m_g, Polarization q)
{
    const int dq = static_cast<int>(q);
    if (j < 0 || std::abs(m_g) > j)
        throw ValidationError(fmt::format("m_g = {} out of range for J = {}", m_g, j));
    if (std::abs(m_g + dq) > j + 1)
        throw ValidationError(
            fmt::format("m_e = {} out of range for J' = {}", m_g + dq, j + 1));

    const double jj = j;
    const double m = m_g;
    const double norm = (jj + 1.0) * (2.0 * jj + 1.0);
    switch (q) {
    case Polarization::sigma_plus:
        return (jj + m + 1.0) * (jj + m + 2.0) / (2.0 * norm);
    case Polarization::sigma_minus:
        return (jj - m + 1.0) * (jj - m + 2.0) / (2.0 * norm);
    case Polarization::pi:
        return ((jj + 1.0) * (jj + 1.0) - m * m) / norm;
    }
    return 0.0;
}

double lande_g(double l, double s, double j)
{
    if (!(j > 0.0))
        throw ValidationError("Lande factor undefined for J = 0");
    return 1.0 + (j * (j + 1.0) + s * (s + 1.0) - l * (l + 1.0)) / (2.0 * j * (j + 1.0));
}

namespace {

// Transition frequency shift in units of Gamma per tesla.
double zeeman_shift_per_tesla(const AtomSpecies& species, int m_g, Polarization q)
{
    const int m_e = m_g + static_cast<int>(q);
    const double dm = species.g_excited() * m_e - species.g_ground() * m_g;
    return constants::bohr_magneton * dm / (constants::hbar * species.linewidth);
}

}  // namespace

double effective_detuning(double laser_detuning, double field, const AtomSpecies& species,
                          int m_g, Polarization q)
{
    // Range check of the transition.
    (void)cg_squared(species.j_ground, m_g, q);
    return laser_detuning - field * zeeman_shift_per_tesla(species, m_g, q);
}

double laser_detuning_for(double polarizing_detuning, double field, const AtomSpecies& species)
{
    return polarizing_detuning +
           field * zeeman_shift_per_tesla(species, species.m_j, Polarization::sigma_plus);
}

double scattering_rate(double linewidth, double intensity, double detuning, double cg2)
{
    return 0.5 * linewidth * 2.0 * intensity * cg2 / (1.0 + 4.0 * detuning * detuning);
}

DepolarizationAssessment depolarization_assessment(const AtomSpecies& species,
                                                   const LaserConfig& laser,
                                                   double offset_field,
                                                   double cooling_duration)
{
    species.validate();
    laser.validate();
    if (!(cooling_duration > 0.0))
        throw ValidationError("cooling duration must be positive");

    const int m = species.m_j;
    const int j = species.j_ground;
    const double intensity = laser.effective_intensity();
    const double wrong = laser.polarization_impurity * intensity;
    const double right = intensity - wrong;

    DepolarizationAssessment out;
    out.polarizing_rate = scattering_rate(
        species.linewidth, right,
        effective_detuning(laser.detuning, offset_field, species, m, Polarization::sigma_plus),
        cg_squared(j, m, Polarization::sigma_plus));

    for (const auto q : {Polarization::pi, Polarization::sigma_minus}) {
        if (std::abs(m + static_cast<int>(q)) > j + 1)
            continue;
        out.depolarizing_rate += scattering_rate(
            species.linewidth, wrong, effective_detuning(laser.detuning, offset_field, species, m, q),
            cg_squared(j, m, q));
    }

    if (out.polarizing_rate > 0.0)
        out.ratio = out.depolarizing_rate / out.polarizing_rate;
    else
        out.ratio = out.depolarizing_rate > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    out.loss_fraction = -std::expm1(-out.depolarizing_rate * cooling_duration);
    return out;
}

}  // namespace doppler
