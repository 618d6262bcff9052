// doppler-reabs: command-line front end for the Doppler cooling model.
//
// Exit codes: 0 success, 1 invalid input, 2 runtime failure, 3 selfcheck failed.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "doppler/config.hpp"
#include "doppler/estimation.hpp"
#include "doppler/scenario.hpp"
#include "doppler/selfcheck.hpp"

using namespace doppler;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_invalid = 1;
constexpr int exit_runtime = 2;
constexpr int exit_selfcheck = 3;

struct Common {
    std::string config_path;
    std::string preset;
    std::string out_path;
    std::string mode;
    std::optional<std::uint64_t> seed;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError(fmt::format("cannot open '{}'", path));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ScenarioConfig load_config(const Common& c, const std::string& fallback_preset)
{
    if (!c.config_path.empty() && !c.preset.empty())
        throw ValidationError("--config and --preset are mutually exclusive");
    std::string text;
    if (!c.config_path.empty())
        text = read_file(c.config_path);
    else
        text = preset_scenario_text(c.preset.empty() ? fallback_preset : c.preset);
    auto config = parse_config(text);
    if (c.mode == "consistency")
        config.mode = HeatingMode::consistency;
    else if (c.mode == "verbatim")
        config.mode = HeatingMode::verbatim;
    else if (!c.mode.empty())
        throw ValidationError(fmt::format("unknown --mode '{}'", c.mode));
    return config;
}

// Writes to --out, the config's output key, or stdout in that order.
template <class F>
void emit(const Common& c, const ScenarioConfig* config, F&& writer)
{
    std::string path = c.out_path;
    if (path.empty() && config)
        path = config->output;
    if (path.empty() || path == "-") {
        writer(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw ValidationError(fmt::format("cannot write '{}'", path));
    writer(out);
    std::cerr << "wrote " << path << '\n';
}

void print_fit(std::ostream& out, const FitResult& fit)
{
    fmt::print(out, "converged={}\niterations={}\nresidual_norm={:.6g}\n", fit.converged,
               fit.iterations, fit.residual_norm);
    for (std::size_t i = 0; i < fit.names.size(); ++i) {
        fmt::print(out, "{}={:.8g}\n", fit.names[i], fit.parameters[i]);
        if (fit.standard_errors)
            fmt::print(out, "{}_stderr={:.4g}\n", fit.names[i], (*fit.standard_errors)[i]);
    }
}

int cmd_run(const Common& c, bool scan)
{
    const auto config = load_config(c, scan ? "aspect_scan" : "cooling_dynamics");
    const bool is_scan = config.kind == ScenarioKind::aspect_scan ||
                         config.kind == ScenarioKind::intensity_scan ||
                         config.kind == ScenarioKind::od_scan;
    if (is_scan != scan)
        throw ValidationError(fmt::format("scenario kind '{}' belongs to the '{}' command",
                                          to_string(config.kind), is_scan ? "scan" : "simulate"));
    const auto table = run_scenario(config);
    emit(c, &config, [&](std::ostream& out) { write_csv(out, config, table); });
    return exit_ok;
}

struct FitArgs {
    std::string model = "exponential";
    std::string data;
    bool synthetic = false;
    double noise = 0.03;
    std::string axis = "y";
    double t_begin = 0.0;
    double t_end = -1.0;  // negative: end of trace
};

int cmd_fit(const Common& c, const FitArgs& a)
{
    if (a.data.empty() == !a.synthetic)
        throw ValidationError("fit needs exactly one of --data or --synthetic");
    if (!(a.noise >= 0.0))
        throw ValidationError("--noise must be non-negative");
    std::mt19937_64 rng(c.seed.value_or(1));
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto noisy = [&](double v) { return v * (1.0 + a.noise * gauss(rng)); };

    if (a.model == "exponential") {
        if (a.axis != "y" && a.axis != "z")
            throw ValidationError("--axis must be y or z");
        const Axis axis = a.axis == "y" ? Axis::y : Axis::z;
        TemperatureTrace trace;
        if (a.synthetic) {
            const auto config = load_config(c, "cooling_dynamics");
            if (config.kind != ScenarioKind::dynamics)
                throw ValidationError("synthetic exponential data needs a dynamics scenario");
            const auto table = run_dynamics(config);
            for (std::size_t r = 0; r < table.rows.size(); ++r) {
                TraceSample s{};
                s.t = *table.at(r, "t_s");
                s.temperature_z = noisy(*table.at(r, "T_z_K"));
                s.temperature_y = noisy(*table.at(r, "T_y_K"));
                trace.samples.push_back(s);
            }
        } else {
            std::ifstream in(a.data);
            if (!in)
                throw ValidationError(fmt::format("cannot open '{}'", a.data));
            trace = read_trace_csv(in);
        }
        if (trace.samples.empty())
            throw ValidationError("empty trace");
        const double t_end = a.t_end < 0.0 ? trace.samples.back().t : a.t_end;
        const auto fit = fit_exponential(trace, axis, a.t_begin, t_end);
        emit(c, nullptr, [&](std::ostream& out) { print_fit(out, fit); });
        return fit.converged ? exit_ok : exit_runtime;
    }

    if (a.model == "intensity") {
        const auto config = load_config(c, "intensity_scan");
        if (!config.kappa)
            throw ValidationError("intensity fit needs scenario.kappa");
        const double detuning = config.effective_polarizing_detuning();
        std::vector<ScanPoint> points;
        if (a.synthetic) {
            if (!config.grid || !config.kappa_y)
                throw ValidationError("synthetic intensity data needs a grid and scenario.kappa_y");
            for (double i : config.grid->values()) {
                const double eff = i / config.laser.attenuation_factor;
                if (!(eff > 0.0))
                    continue;
                const auto t = steady_state_with_heating(*config.kappa_y, *config.kappa,
                                                         config.heating_rate, eff, detuning,
                                                         config.species);
                if (t)
                    points.push_back({i, noisy(*t), std::nullopt});
            }
        } else {
            std::ifstream in(a.data);
            if (!in)
                throw ValidationError(fmt::format("cannot open '{}'", a.data));
            points = read_scan_csv(in);
        }
        // x is the measured intensity; the model sees the attenuated value.
        for (auto& p : points)
            p.x /= config.laser.attenuation_factor;
        const auto fit = fit_intensity_scan(points, *config.kappa, detuning, config.species);
        emit(c, nullptr, [&](std::ostream& out) { print_fit(out, fit); });
        return fit.converged ? exit_ok : exit_runtime;
    }

    if (a.model == "od") {
        const auto config = load_config(c, "od_scan");
        if (!config.kappa_y_ref || !config.kappa_ref)
            throw ValidationError("od fit needs scenario.kappa_y_ref and scenario.kappa_ref");
        const auto model =
            od_scan_model(*config.kappa_y_ref, *config.kappa_ref, config.od_ref, config.heating_rate,
                          config.laser.effective_intensity(), config.effective_polarizing_detuning());
        std::vector<ScanPoint> points;
        if (a.synthetic) {
            if (!config.grid)
                throw ValidationError("synthetic od data needs a grid");
            for (double od : config.grid->values())
                if (const auto t = model.evaluate(od, config.species))
                    points.push_back({od, noisy(*t), std::nullopt});
        } else {
            std::ifstream in(a.data);
            if (!in)
                throw ValidationError(fmt::format("cannot open '{}'", a.data));
            points = read_scan_csv(in);
        }
        const auto fit = refit_od_scan(points, model, config.species);
        emit(c, nullptr, [&](std::ostream& out) { print_fit(out, fit); });
        return fit.converged ? exit_ok : exit_runtime;
    }

    throw ValidationError(fmt::format("unknown fit model '{}'", a.model));
}

int cmd_selfcheck(const Common& c)
{
    const auto items = run_selfcheck();
    emit(c, nullptr, [&](std::ostream& out) { print_selfcheck(out, items); });
    return all_passed(items) ? exit_ok : exit_selfcheck;
}

int cmd_preset_dump(const Common& c, const std::string& name)
{
    emit(c, nullptr, [&](std::ostream& out) {
        if (!name.empty()) {
            out << preset_scenario_text(name);
            return;
        }
        for (const auto& n : preset_scenario_names())
            out << n << '\n';
    });
    return exit_ok;
}

void add_common(CLI::App* app, Common& c, bool with_config)
{
    if (with_config) {
        app->add_option("--config", c.config_path, "Scenario config file");
        app->add_option("--preset", c.preset, "Built-in scenario name");
        app->add_option("--mode", c.mode, "Heating coefficient mode")
            ->check(CLI::IsMember({"consistency", "verbatim"}));
    }
    app->add_option("--out", c.out_path, "Output path (default stdout)");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Doppler cooling with photon reabsorption in a magnetic trap"};
    app.require_subcommand(1);

    Common common;
    FitArgs fit_args;
    std::string preset_name;

    auto* simulate = app.add_subcommand("simulate", "Run a dynamics or steady_state scenario");
    add_common(simulate, common, true);
    auto* scan = app.add_subcommand("scan", "Run an aspect, intensity or OD scan");
    add_common(scan, common, true);

    auto* fit = app.add_subcommand("fit", "Fit a model to measured or synthetic data");
    add_common(fit, common, true);
    fit->add_option("--model", fit_args.model, "exponential, intensity or od")
        ->check(CLI::IsMember({"exponential", "intensity", "od"}));
    fit->add_option("--data", fit_args.data, "CSV data file");
    fit->add_flag("--synthetic", fit_args.synthetic, "Generate noisy data from the config");
    fit->add_option("--noise", fit_args.noise, "Relative noise for synthetic data");
    fit->add_option("--axis", fit_args.axis, "Trace axis for exponential fits (y or z)");
    fit->add_option("--t-begin", fit_args.t_begin, "Fit window start (s)");
    fit->add_option("--t-end", fit_args.t_end, "Fit window end (s)");
    std::uint64_t seed = 1;
    auto* seed_opt = fit->add_option("--seed", seed, "RNG seed for synthetic data");

    auto* selfcheck = app.add_subcommand("selfcheck", "Check the model against reference values");
    add_common(selfcheck, common, false);

    auto* dump = app.add_subcommand("preset-dump", "List presets or print one as config text");
    add_common(dump, common, false);
    dump->add_option("name", preset_name, "Preset name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_invalid;
    }
    if (seed_opt->count())
        common.seed = seed;

    try {
        if (*simulate)
            return cmd_run(common, false);
        if (*scan)
            return cmd_run(common, true);
        if (*fit)
            return cmd_fit(common, fit_args);
        if (*selfcheck)
            return cmd_selfcheck(common);
        if (*dump)
            return cmd_preset_dump(common, preset_name);
    } catch (const ConfigError& e) {
        for (const auto& d : e.diagnostics()) {
            if (d.line > 0)
                fmt::print(std::cerr, "config:{}: {}\n", d.line, d.message);
            else
                fmt::print(std::cerr, "config: {}\n", d.message);
        }
        return exit_invalid;
    } catch (const ValidationError& e) {
        fmt::print(std::cerr, "error: {}\n", e.what());
        return exit_invalid;
    } catch (const std::exception& e) {
        fmt::print(std::cerr, "failure: {}\n", e.what());
        return exit_runtime;
    }
    return exit_invalid;
}
