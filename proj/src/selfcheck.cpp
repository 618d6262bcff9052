#include "doppler/selfcheck.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "doppler/constants.hpp"
#include "doppler/cooling_dynamics.hpp"
#include "doppler/reabsorption.hpp"

namespace doppler {

namespace {

SelfcheckItem within(std::string name, double expected, double actual, double lower, double upper,
                     std::string unit)
{
    return {std::move(name), expected, actual, lower, upper, std::move(unit),
            actual >= lower && actual <= upper};
}

SelfcheckItem relative(std::string name, double expected, double actual, double tol,
                       std::string unit)
{
    return within(std::move(name), expected, actual, expected * (1.0 - tol),
                  expected * (1.0 + tol), std::move(unit));
}

}  // namespace

std::vector<SelfcheckItem> run_selfcheck(const SelfcheckInputs& in)
{
    using namespace units;
    const auto& cr = in.species;
    const auto& trap = in.trap;
    const double two_pi = 2.0 * constants::pi;
    const auto derived = derive_constants(cr);
    const double t_d = derived.doppler_temperature;
    std::vector<SelfcheckItem> items;

    const auto omega = trap_frequencies(trap, cr);
    items.push_back(relative("radial trap frequency", 110.0, omega.y / two_pi, 0.02, "Hz"));
    items.push_back(relative("axial trap frequency", 42.0, omega.z / two_pi, 0.02, "Hz"));

    items.push_back(within("Larmor margin", 100.0, larmor_safety(trap, cr).margin, 100.0, 1e300, ""));

    const double detuning =
        effective_detuning(7.0, 28.0 * gauss, cr, cr.m_j, Polarization::sigma_plus);
    items.push_back(within("effective detuning at +7 Gamma, 28 G", -0.8, detuning, -0.9, -0.7,
                           "Gamma"));

    items.push_back(relative("Doppler temperature", 124.0, t_d / microkelvin, 0.05, "uK"));

    const CloudShape steady{410.0 * micrometre, 700.0 * micrometre, 5.6e10 * per_cm3};
    const auto k = kappa_set(steady, cr);
    items.push_back(within("kappa_y of the steady-state cloud", 0.1, k.kappa_y, 0.09, 0.12, ""));
    items.push_back(within("kappa of the steady-state cloud", 0.24, k.kappa, 0.22, 0.28, ""));
    items.push_back(within("radial optical density", 4.5, optical_density(steady, cr, Axis::y), 4.0,
                           5.5, ""));

    const auto none = steady_state(KappaSet{}, -0.5, cr);
    items.push_back(relative("axial minimum without reabsorption / T_D", 0.7, none.axial / t_d,
                             1e-12, ""));
    const auto ss = steady_state(k, -0.5, cr);
    items.push_back(within("radial steady state / T_D", 2.3, ss.radial.value_or(0.0) / t_d, 2.1,
                           2.5, ""));
    items.push_back(relative("axial steady state", 88.0, ss.axial / microkelvin, 0.10, "uK"));

    LaserConfig laser;
    laser.intensity = 4e-3;
    laser.attenuation_factor = 3.0;
    KappaSet measured;
    measured.kappa_y = 0.023;
    const auto r = rates(laser, measured, -0.8, cr, trap, HeatingMode::verbatim);
    items.push_back(within("radial cooling time", 50.0, 1e3 / r.cool_rate_y, 25.0, 100.0, "ms"));
    items.push_back(within("axial quarter-period cooling limit", 10.0,
                           1e3 * constants::pi / (2.0 * omega.z), 5.0, 15.0, "ms"));

    const auto asymptote = steady_state_with_heating(0.11, 0.24, 2.6e-26, 1e6, -0.8, cr);
    items.push_back(relative("high-intensity radial limit with heating", 300.0,
                             asymptote.value_or(0.0) / microkelvin, 0.10, "uK"));
    return items;
}

bool all_passed(const std::vector<SelfcheckItem>& items)
{
    return std::all_of(items.begin(), items.end(), [](const SelfcheckItem& i) { return i.passed; });
}

void print_selfcheck(std::ostream& out, const std::vector<SelfcheckItem>& items)
{
    fmt::print(out, "{:<46} {:>12} {:>14} {:>27} {:<6} {}\n", "check", "expected", "actual",
               "accepted", "unit", "result");
    for (const auto& i : items) {
        const std::string range =
            i.upper > 1e299 ? fmt::format(">= {:.4g}", i.lower)
                            : fmt::format("[{:.4g}, {:.4g}]", i.lower, i.upper);
        fmt::print(out, "{:<46} {:>12.5g} {:>14.6g} {:>27} {:<6} {}\n", i.name, i.expected, i.actual,
                   range, i.unit, i.passed ? "PASS" : "FAIL");
    }
    const auto passed = std::count_if(items.begin(), items.end(),
                                      [](const SelfcheckItem& i) { return i.passed; });
    fmt::print(out, "{}/{} checks passed\n", passed, items.size());
}

}  // namespace doppler
