#include "doppler/cooling_dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "doppler/constants.hpp"
#include "doppler/errors.hpp"

namespace doppler {

namespace {

void require_red_detuning(double detuning)
{
    if (!(detuning < 0.0))
        throw ValidationError(fmt::format(
            "polarizing detuning {} is not red of resonance: Doppler heating regime", detuning));
}

void cap(double& rate, double limit, bool& flag, double& scale)
{
    if (rate > limit) {
        scale = limit / rate;
        rate = limit;
        flag = true;
    }
}

}  // namespace

double detuning_factor(double polarizing_detuning)
{
    require_red_detuning(polarizing_detuning);
    return (1.0 + 4.0 * polarizing_detuning * polarizing_detuning) /
           (4.0 * std::abs(polarizing_detuning));
}

RateSet rates(const LaserConfig& laser, const KappaSet& kappas, double polarizing_detuning,
              const AtomSpecies& species, const TrapConfig& trap, HeatingMode mode)
{
    laser.validate();
    require_red_detuning(polarizing_detuning);
    const auto derived = derive_constants(species);
    const auto omega = trap_frequencies(trap, species);

    const double gamma = species.linewidth;
    const double two_i = 2.0 * laser.effective_intensity();
    const double lorentz = 1.0 + 4.0 * polarizing_detuning * polarizing_detuning;
    const double recoil = derived.recoil_energy / (constants::hbar * gamma);
    const double cooling = gamma * (-32.0 * polarizing_detuning) * two_i * recoil / (lorentz * lorentz);
    const double heating = two_i * gamma / lorentz * (mode == HeatingMode::consistency ? 4.0 : 1.0);

    RateSet r;
    r.cool_rate_z = cooling * (1.0 + kappas.kappa_z);
    r.cool_rate_y = cooling * kappas.kappa_y;
    r.heat_rate_z = heating * ((1.0 + kappas.kappa_z) + 0.4 * (1.0 + kappas.kappa));
    r.heat_rate_y = heating * (kappas.kappa_y + 0.3 * (1.0 + kappas.kappa));

    // Cooling cannot be faster than a quarter oscillation period.
    cap(r.cool_rate_z, 2.0 * omega.z / constants::pi, r.capped_z, r.cap_scale_z);
    cap(r.cool_rate_y, 2.0 * omega.y / constants::pi, r.capped_y, r.cap_scale_y);
    return r;
}

SteadyState steady_state(const KappaSet& kappas, double polarizing_detuning,
                         const AtomSpecies& species)
{
    const double scale =
        detuning_factor(polarizing_detuning) * derive_constants(species).doppler_temperature / 2.0;
    SteadyState out;
    out.axial =
        (1.0 + kappas.kappa_z + 0.4 * (1.0 + kappas.kappa)) / (1.0 + kappas.kappa_z) * scale;
    if (kappas.kappa_y > 0.0)
        out.radial = (kappas.kappa_y + 0.3 * (1.0 + kappas.kappa)) / kappas.kappa_y * scale;
    return out;
}

std::optional<double> steady_state_with_heating(double kappa_y, double kappa, double heating_rate,
                                                double intensity, double polarizing_detuning,
                                                const AtomSpecies& species)
{
    if (!(intensity >= 0.0) || !(heating_rate >= 0.0))
        throw ValidationError("intensity and heating rate must be >= 0");
    const double factor = detuning_factor(polarizing_detuning);
    if (!(kappa_y > 0.0))
        return std::nullopt;
    const auto derived = derive_constants(species);
    double extra = 0.0;
    if (heating_rate > 0.0) {
        if (intensity == 0.0)
            return std::nullopt;
        extra = heating_rate / (derived.recoil_energy * species.linewidth * intensity);
    }
    return (kappa_y + 0.3 * (1.0 + kappa) + extra) / kappa_y * derived.doppler_temperature / 2.0 *
           factor;
}

std::optional<double> steady_state_vs_od(double kappa_y_star, double kappa_star,
                                         double optical_density, double heating_rate,
                                         double intensity, double polarizing_detuning,
                                         const AtomSpecies& species)
{
    if (!(optical_density > 0.0)) {
        // Still validates the detuning.
        (void)detuning_factor(polarizing_detuning);
        return std::nullopt;
    }
    return steady_state_with_heating(kappa_y_star * optical_density, kappa_star * optical_density,
                                     heating_rate, intensity, polarizing_detuning, species);
}

double transient(double initial, double final, double tau, double t)
{
    if (!(tau > 0.0))
        throw ValidationError("time constant must be positive");
    return final + (initial - final) * std::exp(-t / tau);
}

TemperatureDerivative temperature_derivative(double temperature_z, double temperature_y,
                                             const RateSet& r, double recoil_energy,
                                             CapPolicy policy)
{
    const double recoil_temperature = recoil_energy / (2.0 * constants::boltzmann);
    const bool preserve = policy == CapPolicy::preserve_steady_state;
    const double heat_z = r.heat_rate_z * (preserve ? r.cap_scale_z : 1.0);
    const double heat_y = r.heat_rate_y * (preserve ? r.cap_scale_y : 1.0);
    return {recoil_temperature * heat_z - temperature_z * r.cool_rate_z,
            recoil_temperature * heat_y - temperature_y * r.cool_rate_y};
}

double polarizing_detuning_at_center(const LaserConfig& laser, const TrapConfig& trap,
                                     const AtomSpecies& species)
{
    return effective_detuning(laser.detuning, trap.offset_field, species, species.m_j,
                              Polarization::sigma_plus);
}

CloudState cloud_state(const TraceSample& sample, const TrapConfig& trap, double atom_number)
{
    return CloudState::in_trap(trap, atom_number, sample.temperature_y, sample.temperature_y,
                               sample.temperature_z);
}

namespace {

struct Integrator {
    const TrapConfig& trap;
    const AtomSpecies& species;
    const LaserConfig& laser;
    const SimulationOptions& options;
    double detuning;
    double atom_number;
    double recoil_energy;

    CloudShape shape(double tz, double ty) const
    {
        const auto s = CloudState::in_trap(trap, atom_number, ty, ty, tz);
        return {s.sigma_y, s.sigma_z, s.peak_density};
    }

    RateSet rates_for(const KappaSet& k) const
    {
        return doppler::rates(laser, k, detuning, species, trap, options.mode);
    }

    // One RK4 step with fixed kappas; false if the result is unphysical.
    bool step(std::array<double, 2>& t, const RateSet& r, double h) const
    {
        auto f = [&](const std::array<double, 2>& x) {
            const auto d = temperature_derivative(x[0], x[1], r, recoil_energy, options.cap_policy);
            return std::array<double, 2>{d.axial, d.radial};
        };
        auto axpy = [](const std::array<double, 2>& x, double a, const std::array<double, 2>& y) {
            return std::array<double, 2>{x[0] + a * y[0], x[1] + a * y[1]};
        };
        const auto k1 = f(t);
        const auto k2 = f(axpy(t, h / 2.0, k1));
        const auto k3 = f(axpy(t, h / 2.0, k2));
        const auto k4 = f(axpy(t, h, k3));
        std::array<double, 2> next;
        for (std::size_t i = 0; i < 2; ++i)
            next[i] = t[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!(std::isfinite(next[0]) && std::isfinite(next[1]) && next[0] > 0.0 && next[1] > 0.0))
            return false;
        t = next;
        return true;
    }
};

constexpr int max_halvings = 12;

}  // namespace

TemperatureTrace simulate(const CloudState& initial, const TrapConfig& trap,
                          const AtomSpecies& species, const LaserConfig& laser,
                          const SimulationOptions& options)
{
    species.validate();
    trap.validate();
    laser.validate();
    if (!(initial.temperature_z > 0.0 && initial.temperature_y > 0.0))
        throw ValidationError("initial temperatures must be positive");
    if (!(initial.atom_number > 0.0))
        throw ValidationError("atom number must be positive");
    if (!(options.duration >= 0.0) || !std::isfinite(options.duration))
        throw ValidationError("simulation duration must be >= 0");
    if (!(options.sample_interval > 0.0) || !(options.max_step > 0.0))
        throw ValidationError("sample interval and maximum step must be positive");
    if (options.frozen_kappas && options.self_consistent)
        throw ValidationError("frozen kappas require self_consistent = false");

    const double detuning =
        options.polarizing_detuning.value_or(polarizing_detuning_at_center(laser, trap, species));
    require_red_detuning(detuning);

    const Integrator in{trap,     species, laser, options, detuning, initial.atom_number,
                        derive_constants(species).recoil_energy};

    std::array<double, 2> temps{initial.temperature_z, initial.temperature_y};
    KappaSet kappas = options.frozen_kappas.value_or(
        kappa_set(in.shape(temps[0], temps[1]), species));
    RateSet r = in.rates_for(kappas);

    const double fastest = std::max(r.cool_rate_z, r.cool_rate_y);
    double h_target = options.max_step;
    if (fastest > 0.0)
        h_target = std::min(h_target, 1.0 / fastest / 50.0);

    const std::size_t intervals =
        options.duration > 0.0
            ? static_cast<std::size_t>(std::ceil(options.duration / options.sample_interval - 1e-9))
            : 0;
    const double interval = intervals > 0 ? options.duration / static_cast<double>(intervals) : 0.0;
    const std::size_t substeps =
        intervals > 0 ? static_cast<std::size_t>(std::ceil(interval / h_target - 1e-9)) : 0;
    const double h = substeps > 0 ? interval / static_cast<double>(substeps) : 0.0;

    TemperatureTrace trace;
    trace.samples.reserve(intervals + 1);
    auto record = [&](double t) {
        const auto s = in.shape(temps[0], temps[1]);
        trace.samples.push_back({t, temps[0], temps[1], s.sigma_z, s.sigma_y, s.peak_density, kappas});
    };
    record(0.0);

    for (std::size_t k = 0; k < intervals; ++k) {
        for (std::size_t n = 0; n < substeps; ++n) {
            if (!in.step(temps, r, h)) {
                // Retry the step as 2^d substeps of size h / 2^d.
                bool ok = false;
                for (int d = 1; d <= max_halvings && !ok; ++d) {
                    auto trial = temps;
                    const double hs = std::ldexp(h, -d);
                    ok = true;
                    for (long i = 0; i < (1L << d) && ok; ++i)
                        ok = in.step(trial, r, hs);
                    if (ok)
                        temps = trial;
                }
                if (!ok) {
                    const double t = static_cast<double>(k) * interval + static_cast<double>(n) * h;
                    throw RuntimeFailure(
                        fmt::format("rate equation integration failed to converge at t = {} s", t));
                }
            }
            if (options.self_consistent) {
                kappas = kappa_set(in.shape(temps[0], temps[1]), species);
                r = in.rates_for(kappas);
            }
        }
        record(static_cast<double>(k + 1) * interval);
    }
    return trace;
}

void write_trace_csv(std::ostream& out, const TemperatureTrace& trace)
{
    out << "t_s,T_z_K,T_y_K,sigma_z_m,sigma_y_m,n0_per_m3,kappa_y,kappa_z,kappa\n";
    for (const auto& s : trace.samples) {
        fmt::print(out, "{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g}\n",
                   s.t, s.temperature_z, s.temperature_y, s.sigma_z, s.sigma_y, s.peak_density,
                   s.kappas.kappa_y, s.kappas.kappa_z, s.kappas.kappa);
    }
}

TemperatureTrace read_trace_csv(std::istream& in)
{
    static constexpr std::array<std::string_view, 9> names = {
        "t_s", "T_z_K", "T_y_K", "sigma_z_m", "sigma_y_m", "n0_per_m3", "kappa_y", "kappa_z", "kappa"};
    std::array<int, 9> cols;
    cols.fill(-1);
    TemperatureTrace trace;
    std::string line;
    bool header = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line.front() == '#')
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');)
            cells.push_back(cell);
        if (!header) {
            for (std::size_t c = 0; c < cells.size(); ++c)
                for (std::size_t k = 0; k < names.size(); ++k)
                    if (cells[c] == names[k])
                        cols[k] = static_cast<int>(c);
            if (cols[0] < 0 || cols[1] < 0 || cols[2] < 0)
                throw ValidationError("trace CSV header must contain t_s, T_z_K and T_y_K");
            header = true;
            continue;
        }
        std::array<double, 9> v{};
        for (std::size_t k = 0; k < names.size(); ++k) {
            if (cols[k] < 0)
                continue;
            if (static_cast<std::size_t>(cols[k]) >= cells.size())
                throw ValidationError(fmt::format("trace CSV line {}: missing column", line_no));
            try {
                v[k] = std::stod(cells[static_cast<std::size_t>(cols[k])]);
            } catch (const std::exception&) {
                throw ValidationError(fmt::format("trace CSV line {}: not a number", line_no));
            }
        }
        TraceSample s{v[0], v[1], v[2], v[3], v[4], v[5], KappaSet{v[6], v[7], v[8], 0.0}};
        if (!trace.samples.empty() && !(s.t > trace.samples.back().t))
            throw ValidationError(fmt::format("trace CSV line {}: time must increase", line_no));
        trace.samples.push_back(s);
    }
    if (!header)
        throw ValidationError("trace CSV has no header");
    return trace;
}

}  // namespace doppler
