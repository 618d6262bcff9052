#include "doppler/reabsorption.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "doppler/constants.hpp"
#include "doppler/errors.hpp"

namespace doppler {

namespace {

constexpr double quadrature_tolerance = 1e-13;
constexpr unsigned quadrature_depth = 20;

// The axial weight has a kink at pi/2, so each half is integrated separately.
template <class F>
double integrate_halves(F f)
{
    using boost::math::quadrature::gauss_kronrod;
    constexpr double half = constants::pi / 2.0;
    return gauss_kronrod<double, 31>::integrate(f, 0.0, half, quadrature_depth,
                                                quadrature_tolerance) +
           gauss_kronrod<double, 31>::integrate(f, half, constants::pi, quadrature_depth,
                                                quadrature_tolerance);
}

double dipole_pattern(double theta)
{
    const double c = std::cos(theta);
    const double p = 1.0 + c * c;
    return p * p;
}

}  // namespace

void CloudShape::validate() const
{
    if (!(sigma_y > 0.0 && sigma_z > 0.0))
        throw ValidationError(
            fmt::format("cloud sizes must be positive (sigma_y={}, sigma_z={})", sigma_y, sigma_z));
    if (!(peak_density >= 0.0))
        throw ValidationError("peak density must be >= 0");
}

double sigma_theta(const CloudShape& shape, double theta)
{
    const double c = std::cos(theta) / shape.sigma_z;
    const double s = std::sin(theta) / shape.sigma_y;
    return 1.0 / std::sqrt(c * c + s * s);
}

double kappa0(double peak_density, double cross_section)
{
    return peak_density * cross_section * 9.0 / (128.0 * std::sqrt(2.0 * constants::pi));
}

AngularIntegrals angular_integrals(const CloudShape& shape)
{
    shape.validate();
    AngularIntegrals out;
    out.radial = integrate_halves([&](double t) {
        const double s = std::sin(t);
        return dipole_pattern(t) * sigma_theta(shape, t) * s * s;
    });
    out.axial = integrate_halves([&](double t) {
        return dipole_pattern(t) * sigma_theta(shape, t) * std::sin(t) * std::abs(std::cos(t));
    });
    out.total = integrate_halves(
        [&](double t) { return dipole_pattern(t) * sigma_theta(shape, t) * std::sin(t); });
    return out;
}

KappaSet kappa_set(const CloudShape& shape, const AtomSpecies& species)
{
    shape.validate();
    const auto derived = derive_constants(species);
    KappaSet k;
    k.kappa0 = kappa0(shape.peak_density, derived.resonant_cross_section);
    if (k.kappa0 == 0.0)
        return k;
    const auto moments = angular_integrals(shape);
    k.kappa_y = k.kappa0 * (2.0 / constants::pi) * moments.radial;
    k.kappa_z = k.kappa0 * moments.axial;
    k.kappa = k.kappa0 * moments.total;
    return k;
}

double optical_density(const CloudShape& shape, const AtomSpecies& species, Axis axis)
{
    shape.validate();
    const double sigma = axis == Axis::y ? shape.sigma_y : shape.sigma_z;
    return derive_constants(species).resonant_cross_section * shape.peak_density *
           std::sqrt(2.0 * constants::pi) * sigma;
}

double optical_density(double atom_number, double sigma_x, double sigma_y, double sigma_z,
                       const AtomSpecies& species, Axis axis)
{
    if (!(sigma_x > 0.0 && sigma_y > 0.0 && sigma_z > 0.0))
        throw ValidationError("cloud sizes must be positive");
    const double two_pi = 2.0 * constants::pi;
    const double n0 = atom_number / (two_pi * std::sqrt(two_pi) * sigma_x * sigma_y * sigma_z);
    return optical_density(CloudShape{sigma_y, sigma_z, n0}, species, axis);
}

EffectiveIntensity effective_intensity(double intensity, const KappaSet& kappas)
{
    if (!(intensity >= 0.0))
        throw ValidationError("intensity must be >= 0");
    EffectiveIntensity out;
    out.reabsorbed_y = 2.0 * intensity * kappas.kappa_y;
    out.reabsorbed_z = 2.0 * intensity * kappas.kappa_z;
    out.axial_total = 2.0 * intensity * (1.0 + kappas.kappa_z);
    out.radial_total = out.reabsorbed_y;
    return out;
}

}  // namespace doppler
