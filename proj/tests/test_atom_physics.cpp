#include <doctest.h>

#include <cmath>
#include <limits>

#include "doppler/atom_physics.hpp"
#include "doppler/constants.hpp"
#include "doppler/errors.hpp"
#include "oracles.hpp"

using namespace doppler;
using doctest::Approx;

namespace {

constexpr double gauss = 1e-4;

double cr_gamma()
{
    return 2.0 * oracle::pi * 5.02e6;
}

}  // namespace

TEST_CASE("constants carry CODATA values")
{
    CHECK(constants::hbar == 1.054571817e-34);
    CHECK(constants::planck == 6.62607015e-34);
    CHECK(constants::boltzmann == 1.380649e-23);
    CHECK(constants::bohr_magneton == 9.2740100783e-24);
    CHECK(constants::atomic_mass_unit == 1.66053906660e-27);
    CHECK(oracle::rel(constants::hbar, constants::planck / (2.0 * constants::pi)) < 1e-9);
}

TEST_CASE("chromium preset")
{
    const auto cr = chromium52();
    CHECK(cr.wavelength == Approx(425.55e-9).epsilon(1e-14));
    CHECK(cr.linewidth == Approx(cr_gamma()).epsilon(1e-14));
    CHECK(cr.saturation_intensity == 85.2);
    CHECK(cr.j_ground == 3);
    CHECK(cr.j_excited == 4);
    CHECK(cr.m_j == 3);
    CHECK_NOTHROW(cr.validate());
}

TEST_CASE("derived constants are recomputable")
{
    const auto cr = chromium52();
    const auto d = derive_constants(cr);
    const double k = 2.0 * oracle::pi / 425.55e-9;
    const double lbar = 425.55e-9 / (2.0 * oracle::pi);
    const double m = 52.0 * oracle::amu;
    CHECK(oracle::rel(d.wavenumber, k) < 1e-12);
    CHECK(oracle::rel(d.reduced_wavelength, lbar) < 1e-12);
    CHECK(oracle::rel(d.resonant_cross_section, 6.0 * oracle::pi * lbar * lbar) < 1e-12);
    CHECK(oracle::rel(d.recoil_energy, std::pow(oracle::hbar * k, 2) / (2.0 * m)) < 1e-12);
    CHECK(oracle::rel(d.doppler_temperature, oracle::hbar * cr_gamma() / (2.0 * oracle::kb)) <
          1e-12);

    CHECK(d.doppler_temperature * 1e6 == Approx(120.46).epsilon(1e-3));
    CHECK(d.recoil_energy / oracle::kb * 1e6 == Approx(1.0168).epsilon(1e-3));
    CHECK(d.resonant_cross_section == Approx(8.6465e-14).epsilon(1e-3));
}

TEST_CASE("species validation")
{
    auto s = chromium52();
    SUBCASE("mass") { s.mass = 0.0; }
    SUBCASE("wavelength") { s.wavelength = -1.0; }
    SUBCASE("linewidth") { s.linewidth = 0.0; }
    SUBCASE("saturation intensity") { s.saturation_intensity = 0.0; }
    SUBCASE("J' != J+1") { s.j_excited = 3; }
    SUBCASE("m_J out of range") { s.m_j = 4; }
    CHECK_THROWS_AS(derive_constants(s), ValidationError);
}

TEST_CASE("cg_squared reference values")
{
    CHECK(cg_squared(3, 3, Polarization::sigma_plus) == Approx(1.0).epsilon(1e-15));
    CHECK(cg_squared(3, 3, Polarization::pi) == Approx(0.25).epsilon(1e-15));
    CHECK(cg_squared(3, 3, Polarization::sigma_minus) == Approx(1.0 / 28.0).epsilon(1e-15));
}

TEST_CASE("cg_squared matches the Racah formula and the sum rule")
{
    for (int j = 0; j <= 6; ++j) {
        for (int m = -j; m <= j; ++m) {
            double sum = 0.0;
            for (int q = -1; q <= 1; ++q) {
                const double cg = oracle::clebsch_gordan(j, m, 1, q, j + 1, m + q);
                const double v = cg_squared(j, m, static_cast<Polarization>(q));
                CHECK(std::abs(v - cg * cg) < 1e-12);
                sum += v;
            }
            // sum over q of |<J m; 1 q|J+1 m+q>|^2 = (2J+3)/(2J+1)
            CHECK(std::abs(sum * (2 * j + 1) / (2 * j + 3) - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("cg_squared rejects out-of-range sublevels")
{
    CHECK_THROWS_AS(cg_squared(3, 4, Polarization::pi), ValidationError);
    CHECK_THROWS_AS(cg_squared(3, -4, Polarization::sigma_plus), ValidationError);
    CHECK_THROWS_AS(cg_squared(-1, 0, Polarization::pi), ValidationError);
}

TEST_CASE("lande_g")
{
    CHECK(lande_g(0, 3, 3) == Approx(2.0).epsilon(1e-15));
    CHECK(lande_g(1, 3, 4) == Approx(1.75).epsilon(1e-15));
    CHECK(lande_g(1, 0, 1) == Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(lande_g(0, 0, 0), ValidationError);
}

TEST_CASE("effective detuning")
{
    const auto cr = chromium52();
    const double shift_per_gauss = oracle::mu_b * gauss / (oracle::hbar * cr_gamma());

    SUBCASE("stretched sigma+ transition in the compressed trap")
    {
        const double d = effective_detuning(7.0, 28.0 * gauss, cr, 3, Polarization::sigma_plus);
        // g' m_e - g m_g = 1.75*4 - 2*3 = 1
        CHECK(d == Approx(7.0 - 28.0 * shift_per_gauss).epsilon(1e-12));
        CHECK(d == Approx(-0.8067).epsilon(1e-3));
    }
    SUBCASE("pi transition")
    {
        // g' m_e - g m_g = 1.75*3 - 2*3 = -0.75
        const double d = effective_detuning(7.0, 28.0 * gauss, cr, 3, Polarization::pi);
        CHECK(d == Approx(7.0 + 0.75 * 28.0 * shift_per_gauss).epsilon(1e-12));
        CHECK(d == Approx(12.854).epsilon(1e-3));
    }
    SUBCASE("no field, no shift")
    {
        for (int q = -1; q <= 1; ++q)
            CHECK(effective_detuning(-1.3, 0.0, cr, 2, static_cast<Polarization>(q)) == -1.3);
    }
    SUBCASE("linear in B with the Zeeman slope")
    {
        const double slope = -shift_per_gauss * (1.75 * 2 - 2.0 * 3) / gauss;
        const double d0 = effective_detuning(0.5, 0.0, cr, 3, Polarization::sigma_minus);
        for (double b : {1e-4, 7e-4, 3e-3, 1e-2}) {
            const double d = effective_detuning(0.5, b, cr, 3, Polarization::sigma_minus);
            CHECK((d - d0) / b == Approx(slope).epsilon(1e-10));
        }
    }
    SUBCASE("laser_detuning_for inverts the sigma+ shift")
    {
        for (double target : {-0.5, -0.8, -2.0}) {
            const double laser = laser_detuning_for(target, 28.0 * gauss, cr);
            CHECK(effective_detuning(laser, 28.0 * gauss, cr, 3, Polarization::sigma_plus) ==
                  Approx(target).epsilon(1e-12));
        }
    }
    SUBCASE("forbidden transition rejected")
    {
        CHECK_THROWS_AS(effective_detuning(0.0, 1e-3, cr, 4, Polarization::pi), ValidationError);
    }
}

TEST_CASE("scattering rate")
{
    const double g = cr_gamma();
    CHECK(scattering_rate(g, 0.0, -0.3, 0.5) == 0.0);
    CHECK(scattering_rate(g, 1e-2, -0.3, 0.0) == 0.0);
    const double expected = g / 2.0 * 2.0 * 4e-3 * 1.0 / (1.0 + 4.0 * 0.64);
    CHECK(scattering_rate(g, 4e-3, -0.8, 1.0) == Approx(expected).epsilon(1e-14));
    CHECK(scattering_rate(g, 4e-3, -0.8, 1.0) == Approx(3.544e4).epsilon(1e-3));

    SUBCASE("monotone in I, even in detuning, maximal on resonance")
    {
        double prev = 0.0;
        for (double i = 1e-4; i < 1.0; i *= 1.7) {
            const double r = scattering_rate(g, i, -0.4, 0.3);
            CHECK(r > prev);
            prev = r;
        }
        const double peak = scattering_rate(g, 1e-3, 0.0, 1.0);
        for (double d = 0.05; d < 5.0; d += 0.37) {
            CHECK(scattering_rate(g, 1e-3, d, 1.0) == scattering_rate(g, 1e-3, -d, 1.0));
            CHECK(scattering_rate(g, 1e-3, d, 1.0) < peak);
        }
    }
}

TEST_CASE("depolarization assessment")
{
    const auto cr = chromium52();
    auto laser_at = [&](double b0, double impurity) {
        LaserConfig l;
        l.intensity = 4e-3;
        l.attenuation_factor = 3.0;
        l.polarization_impurity = impurity;
        l.detuning = laser_detuning_for(-0.5, b0, cr);
        return l;
    };

    SUBCASE("pure polarization")
    {
        const auto a = depolarization_assessment(cr, laser_at(5.0 * gauss, 0.0), 5.0 * gauss, 0.3);
        CHECK(a.ratio == 0.0);
        CHECK(a.loss_fraction == 0.0);
        CHECK(a.polarizing_rate > 0.0);
    }
    SUBCASE("1:10 impurity at 5 G")
    {
        const double b0 = 5.0 * gauss;
        const auto laser = laser_at(b0, 0.1);
        const auto a = depolarization_assessment(cr, laser, b0, 0.3);

        // Rates assembled from the oracle CG values and Zeeman shifts.
        const double i = 4e-3 / 3.0;
        const double shift = oracle::mu_b * b0 / (oracle::hbar * cr_gamma());
        auto rate = [&](double intensity, double det, double cg2) {
            return cr_gamma() / 2.0 * 2.0 * intensity * cg2 / (1.0 + 4.0 * det * det);
        };
        const double pol = rate(0.9 * i, -0.5, 1.0);
        const double d_pi = laser.detuning - shift * (1.75 * 3 - 2.0 * 3);
        const double d_sm = laser.detuning - shift * (1.75 * 2 - 2.0 * 3);
        const double cg_pi = std::pow(oracle::clebsch_gordan(3, 3, 1, 0, 4, 3), 2);
        const double cg_sm = std::pow(oracle::clebsch_gordan(3, 3, 1, -1, 4, 2), 2);
        const double dep = rate(0.1 * i, d_pi, cg_pi) + rate(0.1 * i, d_sm, cg_sm);

        CHECK(a.polarizing_rate == Approx(pol).epsilon(1e-12));
        CHECK(a.depolarizing_rate == Approx(dep).epsilon(1e-12));
        CHECK(a.ratio == Approx(dep / pol).epsilon(1e-12));
        CHECK(a.ratio < 1e-2);
        CHECK(a.loss_fraction == Approx(1.0 - std::exp(-dep * 0.3)).epsilon(1e-12));
    }
    SUBCASE("ratio falls monotonically with the offset field")
    {
        double prev = std::numeric_limits<double>::infinity();
        for (double b = 1.0; b <= 200.0; b *= 1.5) {
            const auto a =
                depolarization_assessment(cr, laser_at(b * gauss, 0.1), b * gauss, 0.3);
            CHECK(a.ratio < prev);
            prev = a.ratio;
        }
        CHECK(prev < 1e-5);
    }
    SUBCASE("non-positive duration rejected")
    {
        CHECK_THROWS_AS(depolarization_assessment(cr, laser_at(gauss, 0.1), gauss, 0.0),
                        ValidationError);
    }
}
