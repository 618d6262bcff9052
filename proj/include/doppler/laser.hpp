#pragma once

namespace doppler {

/// Cooling beam parameters as measured in the lab.
struct LaserConfig {
    double intensity = 0.0;           ///< single-beam intensity, units of I_sat
    double detuning = 0.0;            ///< laser detuning in units of Gamma, before Zeeman shift
    double attenuation_factor = 1.0;  ///< measured / effective intensity (>= 1)
    double polarization_impurity = 0.0;  ///< intensity fraction in the wrong polarization

    /// Intensity seen by the atoms after absorption losses.
    double effective_intensity() const { return intensity / attenuation_factor; }

    void validate() const;
};

}  // namespace doppler
