#include "doppler/trap_model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "doppler/constants.hpp"
#include "doppler/errors.hpp"

namespace doppler {

void TrapConfig::validate() const
{
    if (!(curvature_x > 0.0 && curvature_y > 0.0 && curvature_z > 0.0))
        throw ValidationError(fmt::format("trap curvatures must be positive ({}, {}, {})",
                                          curvature_x, curvature_y, curvature_z));
    if (!(offset_field > 0.0))
        throw ValidationError("trap offset field must be positive");
    if (!(magnetic_moment > 0.0))
        throw ValidationError("magnetic moment must be positive");
}

TrapConfig stuttgart_cloverleaf()
{
    TrapConfig trap;
    trap.curvature_x = 750.0 * units::gauss_per_cm2;
    trap.curvature_y = 750.0 * units::gauss_per_cm2;
    trap.curvature_z = 110.0 * units::gauss_per_cm2;
    trap.offset_field = 28.0 * units::gauss;
    trap.magnetic_moment = 6.0 * constants::bohr_magneton;
    return trap;
}

double TrapFrequencies::max() const { return std::max({x, y, z}); }

TrapFrequencies trap_frequencies(const TrapConfig& trap, const AtomSpecies& species)
{
    trap.validate();
    species.validate();
    const double scale = trap.magnetic_moment / species.mass;
    return {std::sqrt(scale * trap.curvature_x), std::sqrt(scale * trap.curvature_y),
            std::sqrt(scale * trap.curvature_z)};
}

LarmorSafety larmor_safety(const TrapConfig& trap, const AtomSpecies& species, double threshold)
{
    LarmorSafety out;
    out.larmor_frequency = trap.magnetic_moment * trap.offset_field / constants::hbar;
    out.margin = out.larmor_frequency / trap_frequencies(trap, species).max();
    out.safe = out.margin >= threshold;
    return out;
}

double sigma_from_temperature(double temperature, double curvature, double magnetic_moment)
{
    if (!(temperature >= 0.0) || !(curvature > 0.0) || !(magnetic_moment > 0.0))
        throw ValidationError("sigma_from_temperature: invalid input");
    return std::sqrt(constants::boltzmann * temperature / (magnetic_moment * curvature));
}

double temperature_from_sigma(double sigma, double curvature, double magnetic_moment)
{
    if (!(sigma >= 0.0) || !(curvature > 0.0) || !(magnetic_moment > 0.0))
        throw ValidationError("temperature_from_sigma: invalid input");
    return magnetic_moment * curvature * sigma * sigma / constants::boltzmann;
}

double peak_density(double atom_number, double sigma_x, double sigma_y, double sigma_z)
{
    const double two_pi = 2.0 * constants::pi;
    return atom_number / (two_pi * std::sqrt(two_pi) * sigma_x * sigma_y * sigma_z);
}

CloudState CloudState::in_trap(const TrapConfig& trap, double atom_number, double temperature_x,
                               double temperature_y, double temperature_z)
{
    trap.validate();
    if (!(atom_number > 0.0))
        throw ValidationError("atom number must be positive");
    if (!(temperature_x > 0.0 && temperature_y > 0.0 && temperature_z > 0.0))
        throw ValidationError("cloud temperatures must be positive");
    CloudState s;
    s.atom_number = atom_number;
    s.temperature_x = temperature_x;
    s.temperature_y = temperature_y;
    s.temperature_z = temperature_z;
    s.sigma_x = sigma_from_temperature(temperature_x, trap.curvature_x, trap.magnetic_moment);
    s.sigma_y = sigma_from_temperature(temperature_y, trap.curvature_y, trap.magnetic_moment);
    s.sigma_z = sigma_from_temperature(temperature_z, trap.curvature_z, trap.magnetic_moment);
    s.peak_density = doppler::peak_density(atom_number, s.sigma_x, s.sigma_y, s.sigma_z);
    return s;
}

double phase_space_density(const CloudState& state, const AtomSpecies& species)
{
    if (!(state.temperature_x > 0.0 && state.temperature_y > 0.0 && state.temperature_z > 0.0))
        throw ValidationError("phase space density needs positive temperatures");
    if (!(state.peak_density > 0.0))
        throw ValidationError("phase space density needs a positive peak density");
    const double t_geo =
        std::cbrt(state.temperature_x * state.temperature_y * state.temperature_z);
    const double lambda_db =
        constants::planck /
        std::sqrt(2.0 * constants::pi * species.mass * constants::boltzmann * t_geo);
    return state.peak_density * lambda_db * lambda_db * lambda_db;
}

}  // namespace doppler
