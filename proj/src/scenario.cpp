#include "doppler/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "doppler/constants.hpp"
#include "doppler/estimation.hpp"

namespace doppler {

std::size_t Table::column(std::string_view name) const
{
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end())
        throw ValidationError(fmt::format("table has no column '{}'", name));
    return static_cast<std::size_t>(it - columns.begin());
}

std::optional<double> Table::at(std::size_t row, std::string_view name) const
{
    return rows.at(row).at(column(name));
}

unsigned worker_count()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("DOPPLER_REABS_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0')
            n = static_cast<unsigned>(std::clamp(v, 1L, 256L));
    }
    return n;
}

namespace {

// Evaluates f(i) for i in [0, count) on up to worker_count() threads; results
// keep grid order.
template <class F>
auto parallel_map(std::size_t count, F f)
{
    using R = decltype(f(std::size_t{0}));
    std::vector<R> results(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                results[i] = f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned threads = std::min<std::size_t>(worker_count(), std::max<std::size_t>(count, 1));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t)
        pool.emplace_back(work);
    work();
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return results;
}

double sphere_sigma(double atom_number, double n0)
{
    const double two_pi = 2.0 * constants::pi;
    return std::cbrt(atom_number / (two_pi * std::sqrt(two_pi) * n0));
}

KappaSet resolve_kappas(const ScenarioConfig& config)
{
    if (config.kappa_y && config.kappa) {
        KappaSet k;
        k.kappa_y = *config.kappa_y;
        k.kappa = *config.kappa;
        k.kappa_z = config.kappa_z.value_or(0.0);
        return k;
    }
    auto k = kappa_set(resolve_cloud_shape(config), config.species);
    if (config.kappa_y)
        k.kappa_y = *config.kappa_y;
    if (config.kappa_z)
        k.kappa_z = *config.kappa_z;
    if (config.kappa)
        k.kappa = *config.kappa;
    return k;
}

}  // namespace

CloudShape resolve_cloud_shape(const ScenarioConfig& config)
{
    const auto& c = config.cloud;
    CloudShape shape;
    double sigma_x = 0.0;
    if (c.sigma_y && c.sigma_z) {
        shape.sigma_y = *c.sigma_y;
        shape.sigma_z = *c.sigma_z;
        sigma_x = *c.sigma_y;
    } else {
        const auto s =
            CloudState::in_trap(config.trap, c.atom_number, c.temperature_y, c.temperature_y,
                                c.temperature_z);
        shape.sigma_y = c.sigma_y.value_or(s.sigma_y);
        shape.sigma_z = c.sigma_z.value_or(s.sigma_z);
        sigma_x = s.sigma_x;
    }
    shape.peak_density =
        c.peak_density.value_or(peak_density(c.atom_number, sigma_x, shape.sigma_y, shape.sigma_z));
    shape.validate();
    return shape;
}

Table run_aspect_scan(const ScenarioConfig& config)
{
    if (config.kind != ScenarioKind::aspect_scan || !config.grid || !config.cloud.peak_density)
        throw ValidationError("run_aspect_scan needs an aspect_scan config with a grid and n0");
    const double detuning = config.effective_polarizing_detuning();
    const double n_atoms = config.cloud.atom_number;
    const double n0_ref = *config.cloud.peak_density;
    const double two_pi = 2.0 * constants::pi;
    const auto alphas = config.grid->values();

    Table table;
    table.columns = {"alpha",   "T_z_inf_K", "T_y_inf_K", "sigma_y_m", "sigma_z_m",
                     "n0_per_m3", "kappa_y",  "kappa_z",   "kappa"};
    table.rows = parallel_map(alphas.size(), [&](std::size_t i) {
        const double alpha = alphas[i];
        CloudShape shape;
        if (config.aspect_mode == AspectMode::fixed_n0) {
            shape.sigma_y = std::cbrt(n_atoms / (two_pi * std::sqrt(two_pi) * n0_ref * alpha));
            shape.peak_density = n0_ref;
        } else {
            shape.sigma_y = sphere_sigma(n_atoms, n0_ref);
            shape.peak_density = n_atoms / (two_pi * std::sqrt(two_pi) * shape.sigma_y *
                                            shape.sigma_y * alpha * shape.sigma_y);
        }
        shape.sigma_z = alpha * shape.sigma_y;
        const auto k = kappa_set(shape, config.species);
        const auto ss = steady_state(k, detuning, config.species);
        return std::vector<std::optional<double>>{
            alpha,          ss.axial,          ss.radial,  shape.sigma_y, shape.sigma_z,
            shape.peak_density, k.kappa_y, k.kappa_z, k.kappa};
    });
    return table;
}

Table run_dynamics(const ScenarioConfig& config)
{
    if (config.kind != ScenarioKind::dynamics)
        throw ValidationError("run_dynamics needs a dynamics config");
    const auto& c = config.cloud;
    const auto initial =
        CloudState::in_trap(config.trap, c.atom_number, c.temperature_y, c.temperature_y,
                            c.temperature_z);
    SimulationOptions opts;
    opts.duration = config.duration;
    opts.sample_interval = config.sample_interval;
    opts.self_consistent = config.self_consistent;
    opts.mode = config.mode;
    opts.cap_policy = config.cap_policy;
    opts.polarizing_detuning = config.effective_polarizing_detuning();
    const auto trace = simulate(initial, config.trap, config.species, config.laser, opts);

    Table table;
    table.columns = {"t_s",       "T_z_K",   "T_y_K",   "sigma_z_m", "sigma_y_m",
                     "n0_per_m3", "kappa_y", "kappa_z", "kappa",     "phase_space_density"};
    for (const auto& s : trace.samples) {
        const auto state = cloud_state(s, config.trap, c.atom_number);
        table.rows.push_back({s.t, s.temperature_z, s.temperature_y, s.sigma_z, s.sigma_y,
                              s.peak_density, s.kappas.kappa_y, s.kappas.kappa_z, s.kappas.kappa,
                              phase_space_density(state, config.species)});
    }
    return table;
}

Table run_intensity_scan(const ScenarioConfig& config)
{
    if (config.kind != ScenarioKind::intensity_scan || !config.grid)
        throw ValidationError("run_intensity_scan needs an intensity_scan config with a grid");
    const double detuning = config.effective_polarizing_detuning();
    const auto kappas = resolve_kappas(config);
    const auto grid = config.grid->values();

    Table table;
    table.columns = {"I_measured", "I_effective", "T_y_inf_K", "cool_rate_y_per_s", "capped_y"};
    table.rows = parallel_map(grid.size(), [&](std::size_t i) {
        LaserConfig laser = config.laser;
        laser.intensity = grid[i];
        const double eff = laser.effective_intensity();
        const auto r = rates(laser, kappas, detuning, config.species, config.trap, config.mode);
        std::optional<double> t_inf;
        if (eff > 0.0)
            t_inf = steady_state_with_heating(kappas.kappa_y, kappas.kappa, config.heating_rate,
                                              eff, detuning, config.species);
        return std::vector<std::optional<double>>{grid[i], eff, t_inf, r.cool_rate_y,
                                                  r.capped_y ? 1.0 : 0.0};
    });
    return table;
}

Table run_od_scan(const ScenarioConfig& config)
{
    if (config.kind != ScenarioKind::od_scan || !config.grid || !config.kappa_y_ref ||
        !config.kappa_ref)
        throw ValidationError("run_od_scan needs an od_scan config with a grid and references");
    const auto model =
        od_scan_model(*config.kappa_y_ref, *config.kappa_ref, config.od_ref, config.heating_rate,
                      config.laser.effective_intensity(), config.effective_polarizing_detuning());
    const auto grid = config.grid->values();

    Table table;
    table.columns = {"OD_y", "T_y_inf_K"};
    table.rows = parallel_map(grid.size(), [&](std::size_t i) {
        return std::vector<std::optional<double>>{grid[i], model.evaluate(grid[i], config.species)};
    });
    return table;
}

Table run_steady_state(const ScenarioConfig& config)
{
    const double detuning = config.effective_polarizing_detuning();
    const auto shape = resolve_cloud_shape(config);
    const auto kappas = resolve_kappas(config);
    const auto ss = steady_state(kappas, detuning, config.species);
    const double eff = config.laser.effective_intensity();
    std::optional<double> with_heating;
    if (eff > 0.0)
        with_heating = steady_state_with_heating(kappas.kappa_y, kappas.kappa, config.heating_rate,
                                                 eff, detuning, config.species);
    const auto r = rates(config.laser, kappas, detuning, config.species, config.trap, config.mode);
    const auto omega = trap_frequencies(config.trap, config.species);
    const auto larmor = larmor_safety(config.trap, config.species, config.larmor_threshold);
    const auto depol = depolarization_assessment(config.species, config.laser,
                                                 config.trap.offset_field, config.cooling_duration);
    const double two_pi = 2.0 * constants::pi;

    Table table;
    table.columns = {"polarizing_detuning_Gamma",
                     "kappa_y",
                     "kappa_z",
                     "kappa",
                     "OD_y",
                     "OD_z",
                     "T_z_inf_K",
                     "T_y_inf_K",
                     "T_y_inf_with_heating_K",
                     "cool_rate_z_per_s",
                     "cool_rate_y_per_s",
                     "heat_rate_z_per_s",
                     "heat_rate_y_per_s",
                     "capped_z",
                     "capped_y",
                     "trap_frequency_y_Hz",
                     "trap_frequency_z_Hz",
                     "larmor_margin",
                     "larmor_safe",
                     "depolarization_ratio",
                     "loss_fraction"};
    table.rows.push_back({detuning,
                          kappas.kappa_y,
                          kappas.kappa_z,
                          kappas.kappa,
                          optical_density(shape, config.species, Axis::y),
                          optical_density(shape, config.species, Axis::z),
                          ss.axial,
                          ss.radial,
                          with_heating,
                          r.cool_rate_z,
                          r.cool_rate_y,
                          r.heat_rate_z,
                          r.heat_rate_y,
                          r.capped_z ? 1.0 : 0.0,
                          r.capped_y ? 1.0 : 0.0,
                          omega.y / two_pi,
                          omega.z / two_pi,
                          larmor.margin,
                          larmor.safe ? 1.0 : 0.0,
                          depol.ratio,
                          depol.loss_fraction});
    return table;
}

Table run_scenario(const ScenarioConfig& config)
{
    switch (config.kind) {
    case ScenarioKind::dynamics: return run_dynamics(config);
    case ScenarioKind::aspect_scan: return run_aspect_scan(config);
    case ScenarioKind::intensity_scan: return run_intensity_scan(config);
    case ScenarioKind::od_scan: return run_od_scan(config);
    case ScenarioKind::steady_state: return run_steady_state(config);
    }
    throw ValidationError("unknown scenario kind");
}

void write_csv(std::ostream& out, const ScenarioConfig& config, const Table& table)
{
    for (const auto& [key, value] : config.resolved())
        fmt::print(out, "# {}={}\n", key, value);
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                out << ',';
            if (row[i])
                fmt::print(out, "{:.12g}", *row[i]);
            else
                out << "divergent";
        }
        out << '\n';
    }
}

}  // namespace doppler
