#include <doctest.h>

#include <cmath>

#include "doppler/atom_physics.hpp"
#include "doppler/errors.hpp"
#include "doppler/trap_model.hpp"
#include "oracles.hpp"

using namespace doppler;
using doctest::Approx;

namespace {

constexpr double gauss = 1e-4;
constexpr double uK = 1e-6;

}  // namespace

TEST_CASE("cloverleaf preset")
{
    const auto t = stuttgart_cloverleaf();
    CHECK(t.curvature_x == 750.0);  // G/cm^2 == T/m^2
    CHECK(t.curvature_y == 750.0);
    CHECK(t.curvature_z == 110.0);
    CHECK(t.offset_field == Approx(28.0 * gauss).epsilon(1e-15));
    CHECK(t.magnetic_moment == Approx(6.0 * oracle::mu_b).epsilon(1e-15));
}

TEST_CASE("trap frequencies")
{
    const auto cr = chromium52();
    const auto t = stuttgart_cloverleaf();
    const auto w = trap_frequencies(t, cr);
    const double m = 52.0 * oracle::amu;
    const double mu = 6.0 * oracle::mu_b;
    CHECK(w.y == Approx(std::sqrt(mu * 750.0 / m)).epsilon(1e-12));
    CHECK(w.z == Approx(std::sqrt(mu * 110.0 / m)).epsilon(1e-12));
    CHECK(w.x == w.y);
    CHECK(w.max() == w.y);
    CHECK(w.y / (2.0 * oracle::pi) == Approx(110.0).epsilon(0.02));
    CHECK(w.z / (2.0 * oracle::pi) == Approx(42.0).epsilon(0.02));

    SUBCASE("square-root scaling in curvature and mass")
    {
        auto t4 = t;
        t4.curvature_z *= 4.0;
        CHECK(trap_frequencies(t4, cr).z == Approx(2.0 * w.z).epsilon(1e-12));
        auto heavy = cr;
        heavy.mass *= 9.0;
        const auto wh = trap_frequencies(t, heavy);
        CHECK(wh.y == Approx(w.y / 3.0).epsilon(1e-12));
        CHECK(wh.z == Approx(w.z / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("trap validation")
{
    auto t = stuttgart_cloverleaf();
    SUBCASE("curvature") { t.curvature_y = 0.0; }
    SUBCASE("offset") { t.offset_field = -1.0; }
    SUBCASE("moment") { t.magnetic_moment = 0.0; }
    CHECK_THROWS_AS(trap_frequencies(t, chromium52()), ValidationError);
}

TEST_CASE("Larmor safety")
{
    const auto cr = chromium52();
    const auto t = stuttgart_cloverleaf();
    const auto s = larmor_safety(t, cr);
    const double wl = 6.0 * oracle::mu_b * 28.0 * gauss / oracle::hbar;
    CHECK(s.larmor_frequency == Approx(wl).epsilon(1e-12));
    CHECK(s.larmor_frequency == Approx(1.477e9).epsilon(2e-3));
    CHECK(s.margin == Approx(wl / trap_frequencies(t, cr).y).epsilon(1e-12));
    CHECK(s.margin == Approx(2.1e6).epsilon(0.02));
    CHECK(s.safe);

    auto weak = t;
    weak.offset_field = 1e-12;
    const auto w = larmor_safety(weak, cr);
    CHECK(w.margin < 1.0);
    CHECK_FALSE(w.safe);

    CHECK_FALSE(larmor_safety(t, cr, 1e7).safe);
}

TEST_CASE("temperature and cloud size")
{
    const auto t = stuttgart_cloverleaf();
    const double mu = t.magnetic_moment;
    CHECK(sigma_from_temperature(124 * uK, t.curvature_z, mu) ==
          Approx(std::sqrt(oracle::kb * 124 * uK / (mu * 110.0))).epsilon(1e-12));
    CHECK(sigma_from_temperature(124 * uK, t.curvature_z, mu) == Approx(529e-6).epsilon(2e-3));
    CHECK(sigma_from_temperature(334 * uK, t.curvature_y, mu) == Approx(332.5e-6).epsilon(3e-3));
    CHECK(sigma_from_temperature(0.0, t.curvature_y, mu) == 0.0);

    for (double temp = 1e-7; temp < 1e-1; temp *= 3.7) {
        const double s = sigma_from_temperature(temp, t.curvature_y, mu);
        CHECK(oracle::rel(temperature_from_sigma(s, t.curvature_y, mu), temp) < 1e-12);
    }
    CHECK_THROWS_AS(sigma_from_temperature(-1.0, 1.0, 1.0), ValidationError);
}

TEST_CASE("peak density")
{
    const double n = peak_density(1e8, 400e-6, 410e-6, 700e-6);
    CHECK(n == Approx(1e8 / (std::pow(2.0 * oracle::pi, 1.5) * 400e-6 * 410e-6 * 700e-6))
                   .epsilon(1e-12));
    CHECK(peak_density(1e8, 800e-6, 410e-6, 700e-6) == Approx(n / 2.0).epsilon(1e-12));
    CHECK(peak_density(1e8, 400e-6, 820e-6, 700e-6) == Approx(n / 2.0).epsilon(1e-12));
    CHECK(peak_density(1e8, 400e-6, 410e-6, 1400e-6) == Approx(n / 2.0).epsilon(1e-12));
}

TEST_CASE("cloud state in trap")
{
    const auto t = stuttgart_cloverleaf();
    const auto c = CloudState::in_trap(t, 1e8, 334 * uK, 334 * uK, 124 * uK);
    CHECK(c.sigma_x == c.sigma_y);
    CHECK(c.sigma_z == Approx(sigma_from_temperature(124 * uK, 110.0, t.magnetic_moment)));
    CHECK(c.peak_density == Approx(peak_density(1e8, c.sigma_x, c.sigma_y, c.sigma_z)));
    CHECK_THROWS_AS(CloudState::in_trap(t, 0.0, 1e-3, 1e-3, 1e-3), ValidationError);
    CHECK_THROWS_AS(CloudState::in_trap(t, 1e8, 1e-3, 0.0, 1e-3), ValidationError);
}

TEST_CASE("phase-space density")
{
    const auto cr = chromium52();
    CloudState s;
    s.atom_number = 1e8;
    s.temperature_x = s.temperature_y = 300 * uK;
    s.temperature_z = 100 * uK;
    s.sigma_x = s.sigma_y = 300e-6;
    s.sigma_z = 500e-6;
    s.peak_density = 5e16;

    const double tgeo = std::cbrt(300.0 * 300.0 * 100.0) * uK;
    const double m = 52.0 * oracle::amu;
    const double ldb = 2.0 * oracle::pi * oracle::hbar / std::sqrt(2.0 * oracle::pi * m * oracle::kb * tgeo);
    const double rho = phase_space_density(s, cr);
    CHECK(rho == Approx(5e16 * ldb * ldb * ldb).epsilon(1e-9));

    SUBCASE("linear in n0")
    {
        auto d = s;
        d.peak_density *= 2.0;
        CHECK(phase_space_density(d, cr) == Approx(2.0 * rho).epsilon(1e-12));
    }
    SUBCASE("isotropic temperature is the geometric mean")
    {
        auto iso = s;
        iso.temperature_x = iso.temperature_y = iso.temperature_z = tgeo;
        CHECK(phase_space_density(iso, cr) == Approx(rho).epsilon(1e-12));
    }
    SUBCASE("invariant under N and sizes at fixed n0 and T")
    {
        auto other = s;
        other.atom_number = 3e7;
        other.sigma_x = other.sigma_y = 120e-6;
        other.sigma_z = 810e-6;
        CHECK(phase_space_density(other, cr) == rho);
    }
    SUBCASE("compression gain between the initial and cooled cloud")
    {
        CloudState a = s, b = s;
        a.temperature_x = a.temperature_y = a.temperature_z = 1000 * uK;
        a.peak_density = 0.4e10 * 1e6;
        b.temperature_x = b.temperature_y = 334 * uK;
        b.temperature_z = 124 * uK;
        b.peak_density = 5.6e10 * 1e6;
        const double gain = phase_space_density(b, cr) / phase_space_density(a, cr);
        // 14 * (1000^3 / (334^2 * 124))^(1/2)
        CHECK(gain == Approx(14.0 * std::sqrt(1e9 / (334.0 * 334.0 * 124.0))).epsilon(1e-9));
        CHECK(gain > 50.0);
        CHECK(gain < 200.0);
    }
    CHECK_THROWS_AS(phase_space_density(CloudState{}, cr), ValidationError);
}
