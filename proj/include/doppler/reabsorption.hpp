#pragma once

#include "doppler/atom_physics.hpp"

namespace doppler {

/// Gaussian cloud seen by reabsorbed photons: radial (y) and axial (z) rms
/// sizes in m, peak density in 1/m^3.
struct CloudShape {
    double sigma_y = 0.0;
    double sigma_z = 0.0;
    double peak_density = 0.0;

    /// alpha = sigma_z / sigma_y
    double aspect_ratio() const { return sigma_z / sigma_y; }
    void validate() const;
};

/// Effective numbers of reabsorbed photons per laser photon: radial, axial
/// and total, plus the prefactor kappa0 in 1/m.
struct KappaSet {
    double kappa_y = 0.0;
    double kappa_z = 0.0;
    double kappa = 0.0;
    double kappa0 = 0.0;
};

/// Cloud size along a direction at polar angle theta from the axial (z)
/// axis: the radius of the 1-sigma ellipse in that direction.
double sigma_theta(const CloudShape& shape, double theta);

/// kappa0 = n0 * cross_section * 9 / (128 sqrt(2 pi)).
double kappa0(double peak_density, double cross_section);

/// Raw angular integrals of (1 + cos^2)^2 sigma(theta) against the radial
/// (sin^2), axial (sin |cos|) and total (sin) weights over [0, pi], in m.
struct AngularIntegrals {
    double radial = 0.0;
    double axial = 0.0;
    double total = 0.0;
};

AngularIntegrals angular_integrals(const CloudShape& shape);

KappaSet kappa_set(const CloudShape& shape, const AtomSpecies& species);

enum class Axis { y, z };

/// Peak column optical density n0 * cross_section * sqrt(2 pi) * sigma_axis.
double optical_density(const CloudShape& shape, const AtomSpecies& species, Axis axis);

/// Same, for N atoms with radial sizes sigma_x, sigma_y and axial sigma_z.
double optical_density(double atom_number, double sigma_x, double sigma_y, double sigma_z,
                       const AtomSpecies& species, Axis axis);

/// Light fields in units of I_sat for a single-beam intensity I.
struct EffectiveIntensity {
    double reabsorbed_y = 0.0;  // 2 I kappa_y
    double reabsorbed_z = 0.0;  // 2 I kappa_z
    double axial_total = 0.0;   // 2 I (1 + kappa_z)
    double radial_total = 0.0;  // 2 I kappa_y
};

EffectiveIntensity effective_intensity(double intensity, const KappaSet& kappas);

}  // namespace doppler
