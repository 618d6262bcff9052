#include "doppler/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include <fmt/format.h>

#include "doppler/constants.hpp"

namespace doppler {

namespace {

std::string join_diagnostics(const std::vector<ConfigDiagnostic>& diags)
{
    std::string out = "invalid configuration:";
    for (const auto& d : diags)
        out += d.line > 0 ? fmt::format("\n  line {}: {}", d.line, d.message)
                          : fmt::format("\n  {}", d.message);
    return out;
}

// Thrown by value parsers, turned into a located diagnostic.
struct Problem {
    std::string message;
};

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(std::string_view v)
{
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out))
        throw Problem{fmt::format("'{}' is not a number", v)};
    return out;
}

int parse_int(std::string_view v)
{
    int out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end)
        throw Problem{fmt::format("'{}' is not an integer", v)};
    return out;
}

bool parse_bool(std::string_view v)
{
    if (v == "true" || v == "yes" || v == "1" || v == "on")
        return true;
    if (v == "false" || v == "no" || v == "0" || v == "off")
        return false;
    throw Problem{fmt::format("'{}' is not a boolean", v)};
}

std::size_t edit_distance(std::string_view a, std::string_view b)
{
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j)
        row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

struct KeyDef {
    std::string_view section;
    std::string_view key;
    std::string_view stem;  // key without its unit suffix
    int pass;               // presets first, broad settings before specific ones
    std::function<void(ScenarioConfig&, std::string_view)> apply;
};

using Setter = std::function<void(ScenarioConfig&, std::string_view)>;

Setter number(std::function<void(ScenarioConfig&, double)> f, double unit = 1.0)
{
    return [f = std::move(f), unit](ScenarioConfig& c, std::string_view v) {
        f(c, parse_number(v) * unit);
    };
}

Setter integer(std::function<void(ScenarioConfig&, int)> f)
{
    return [f = std::move(f)](ScenarioConfig& c, std::string_view v) { f(c, parse_int(v)); };
}

Setter boolean(std::function<void(ScenarioConfig&, bool)> f)
{
    return [f = std::move(f)](ScenarioConfig& c, std::string_view v) { f(c, parse_bool(v)); };
}

const std::vector<KeyDef>& key_table()
{
    using C = ScenarioConfig;
    static const std::vector<KeyDef> table = {
        // [species]
        {"species", "preset", "preset", 0,
         [](C& c, std::string_view v) {
             if (v != "Cr52")
                 throw Problem{fmt::format("unknown species preset '{}' (available: Cr52)", v)};
             c.species_preset = v;
             c.species = chromium52();
         }},
        {"species", "name", "name", 1, [](C& c, std::string_view v) { c.species.name = v; }},
        {"species", "mass_u", "mass", 1,
         number([](C& c, double v) { c.species.mass = v; }, constants::atomic_mass_unit)},
        {"species", "wavelength_nm", "wavelength", 1,
         number([](C& c, double v) { c.species.wavelength = v; }, units::nanometre)},
        {"species", "linewidth_MHz", "linewidth", 1,
         number([](C& c, double v) { c.species.linewidth = 2.0 * constants::pi * v; },
                units::megahertz)},
        {"species", "saturation_intensity_W_per_m2", "saturation_intensity", 1,
         number([](C& c, double v) { c.species.saturation_intensity = v; })},
        {"species", "J_ground", "J_ground", 1, integer([](C& c, int v) { c.species.j_ground = v; })},
        {"species", "J_excited", "J_excited", 1,
         integer([](C& c, int v) { c.species.j_excited = v; })},
        {"species", "L_ground", "L_ground", 1, number([](C& c, double v) { c.species.l_ground = v; })},
        {"species", "S_ground", "S_ground", 1, number([](C& c, double v) { c.species.s_ground = v; })},
        {"species", "L_excited", "L_excited", 1,
         number([](C& c, double v) { c.species.l_excited = v; })},
        {"species", "S_excited", "S_excited", 1,
         number([](C& c, double v) { c.species.s_excited = v; })},
        {"species", "m_J", "m_J", 1, integer([](C& c, int v) { c.species.m_j = v; })},
        // [trap]
        {"trap", "preset", "preset", 0,
         [](C& c, std::string_view v) {
             if (v != "stuttgart_cloverleaf")
                 throw Problem{fmt::format(
                     "unknown trap preset '{}' (available: stuttgart_cloverleaf)", v)};
             c.trap_preset = v;
             c.trap = stuttgart_cloverleaf();
         }},
        {"trap", "curvature_x_G_per_cm2", "curvature_x", 1,
         number([](C& c, double v) { c.trap.curvature_x = v; }, units::gauss_per_cm2)},
        {"trap", "curvature_y_G_per_cm2", "curvature_y", 1,
         number([](C& c, double v) { c.trap.curvature_y = v; }, units::gauss_per_cm2)},
        {"trap", "curvature_z_G_per_cm2", "curvature_z", 1,
         number([](C& c, double v) { c.trap.curvature_z = v; }, units::gauss_per_cm2)},
        {"trap", "offset_field_G", "offset_field", 1,
         number([](C& c, double v) { c.trap.offset_field = v; }, units::gauss)},
        {"trap", "magnetic_moment_muB", "magnetic_moment", 1,
         number([](C& c, double v) { c.trap.magnetic_moment = v; }, constants::bohr_magneton)},
        {"trap", "larmor_threshold", "larmor_threshold", 1,
         number([](C& c, double v) { c.larmor_threshold = v; })},
        // [laser]
        {"laser", "intensity_Isat", "intensity", 1,
         number([](C& c, double v) { c.laser.intensity = v; })},
        {"laser", "detuning_Gamma", "detuning", 1,
         number([](C& c, double v) { c.laser.detuning = v; })},
        {"laser", "attenuation_factor", "attenuation_factor", 1,
         number([](C& c, double v) { c.laser.attenuation_factor = v; })},
        {"laser", "polarization_impurity", "polarization_impurity", 1,
         number([](C& c, double v) { c.laser.polarization_impurity = v; })},
        {"laser", "polarizing_detuning_Gamma", "polarizing_detuning", 1,
         number([](C& c, double v) { c.polarizing_detuning = v; })},
        {"laser", "cooling_duration_s", "cooling_duration", 1,
         number([](C& c, double v) { c.cooling_duration = v; })},
        // [cloud]
        {"cloud", "atom_number", "atom_number", 1,
         number([](C& c, double v) { c.cloud.atom_number = v; })},
        {"cloud", "temperature_uK", "temperature", 1,
         number(
             [](C& c, double v) {
                 c.cloud.temperature_z = v;
                 c.cloud.temperature_y = v;
             },
             units::microkelvin)},
        {"cloud", "temperature_z_uK", "temperature_z", 2,
         number([](C& c, double v) { c.cloud.temperature_z = v; }, units::microkelvin)},
        {"cloud", "temperature_y_uK", "temperature_y", 2,
         number([](C& c, double v) { c.cloud.temperature_y = v; }, units::microkelvin)},
        {"cloud", "sigma_z_um", "sigma_z", 1,
         number([](C& c, double v) { c.cloud.sigma_z = v; }, units::micrometre)},
        {"cloud", "sigma_y_um", "sigma_y", 1,
         number([](C& c, double v) { c.cloud.sigma_y = v; }, units::micrometre)},
        {"cloud", "peak_density_per_cm3", "peak_density", 1,
         number([](C& c, double v) { c.cloud.peak_density = v; }, units::per_cm3)},
        // [scenario]
        {"scenario", "kind", "kind", 1,
         [](C& c, std::string_view v) {
             static const std::map<std::string_view, ScenarioKind> kinds = {
                 {"dynamics", ScenarioKind::dynamics},
                 {"aspect_scan", ScenarioKind::aspect_scan},
                 {"intensity_scan", ScenarioKind::intensity_scan},
                 {"od_scan", ScenarioKind::od_scan},
                 {"steady_state", ScenarioKind::steady_state}};
             const auto it = kinds.find(v);
             if (it == kinds.end())
                 throw Problem{fmt::format(
                     "unknown scenario kind '{}' (dynamics, aspect_scan, intensity_scan, od_scan, "
                     "steady_state)",
                     v)};
             c.kind = it->second;
         }},
        {"scenario", "duration_s", "duration", 1, number([](C& c, double v) { c.duration = v; })},
        {"scenario", "sample_interval_s", "sample_interval", 1,
         number([](C& c, double v) { c.sample_interval = v; })},
        {"scenario", "grid_min", "grid_min", 1,
         number([](C& c, double v) { c.grid.value().min = v; })},
        {"scenario", "grid_max", "grid_max", 1,
         number([](C& c, double v) { c.grid.value().max = v; })},
        {"scenario", "grid_count", "grid_count", 1,
         integer([](C& c, int v) { c.grid.value().count = v; })},
        {"scenario", "grid_spacing", "grid_spacing", 1,
         [](C& c, std::string_view v) {
             if (v == "linear")
                 c.grid.value().spacing = GridSpacing::linear;
             else if (v == "log")
                 c.grid.value().spacing = GridSpacing::log;
             else
                 throw Problem{fmt::format("grid_spacing must be linear or log, got '{}'", v)};
         }},
        {"scenario", "self_consistent", "self_consistent", 1,
         boolean([](C& c, bool v) { c.self_consistent = v; })},
        {"scenario", "consistency_mode", "consistency_mode", 1,
         boolean([](C& c, bool v) {
             c.mode = v ? HeatingMode::consistency : HeatingMode::verbatim;
         })},
        {"scenario", "cap_policy", "cap_policy", 1,
         [](C& c, std::string_view v) {
             if (v == "preserve_steady_state")
                 c.cap_policy = CapPolicy::preserve_steady_state;
             else if (v == "hard")
                 c.cap_policy = CapPolicy::hard;
             else
                 throw Problem{
                     fmt::format("cap_policy must be preserve_steady_state or hard, got '{}'", v)};
         }},
        {"scenario", "aspect_mode", "aspect_mode", 1,
         [](C& c, std::string_view v) {
             if (v == "fixed_n0")
                 c.aspect_mode = AspectMode::fixed_n0;
             else if (v == "fixed_N")
                 c.aspect_mode = AspectMode::fixed_N;
             else
                 throw Problem{fmt::format("aspect_mode must be fixed_n0 or fixed_N, got '{}'", v)};
         }},
        {"scenario", "heating_rate_J_per_s", "heating_rate", 1,
         number([](C& c, double v) { c.heating_rate = v; })},
        {"scenario", "kappa_y", "kappa_y", 1, number([](C& c, double v) { c.kappa_y = v; })},
        {"scenario", "kappa_z", "kappa_z", 1, number([](C& c, double v) { c.kappa_z = v; })},
        {"scenario", "kappa", "kappa", 1, number([](C& c, double v) { c.kappa = v; })},
        {"scenario", "kappa_y_ref", "kappa_y_ref", 1,
         number([](C& c, double v) { c.kappa_y_ref = v; })},
        {"scenario", "kappa_ref", "kappa_ref", 1, number([](C& c, double v) { c.kappa_ref = v; })},
        {"scenario", "od_ref", "od_ref", 1, number([](C& c, double v) { c.od_ref = v; })},
        {"scenario", "output", "output", 1, [](C& c, std::string_view v) { c.output = v; }},
    };
    return table;
}

const std::set<std::string_view> known_sections = {"species", "trap", "laser", "cloud", "scenario"};

std::string unit_suffix_hint(std::string_view section, std::string_view key)
{
    // A key whose stem matches but whose unit suffix does not.
    for (const auto& def : key_table()) {
        if (def.section != section || def.stem == def.key)
            continue;
        if (key.size() > def.stem.size() && key.substr(0, def.stem.size()) == def.stem &&
            key[def.stem.size()] == '_')
            return fmt::format("wrong unit suffix in '{}': expected '{}'", key, def.key);
        if (key == def.stem)
            return fmt::format("missing unit suffix in '{}': expected '{}'", key, def.key);
    }
    return {};
}

// A valid key (or unit-less stem) of another section.
std::string other_section_hint(std::string_view section, std::string_view key)
{
    for (const auto& def : key_table()) {
        if (def.section == section)
            continue;
        if (def.key == key || def.stem == key)
            return fmt::format("key '{}' belongs in [{}] as '{}'", key, def.section, def.key);
    }
    return {};
}

std::string nearest_key(std::string_view section, std::string_view key)
{
    std::string best;
    std::size_t best_d = std::string::npos;
    for (const auto& def : key_table()) {
        if (def.section != section)
            continue;
        const std::size_t d = std::min(edit_distance(key, def.key), edit_distance(key, def.stem));
        if (d < best_d) {
            best_d = d;
            best = def.key;
        }
    }
    return best;
}

struct Entry {
    std::string section;
    std::string key;
    std::string value;
    int line;
};

}  // namespace

ConfigError::ConfigError(std::vector<ConfigDiagnostic> diagnostics)
    : ValidationError(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics))
{
}

std::vector<double> Grid::values() const
{
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double f = count > 1 ? static_cast<double>(i) / (count - 1) : 0.0;
        out[i] = spacing == GridSpacing::linear
                     ? min + (max - min) * f
                     : std::exp(std::log(min) + (std::log(max) - std::log(min)) * f);
    }
    if (count > 1) {
        out.front() = min;
        out.back() = max;
    }
    return out;
}

double ScenarioConfig::effective_polarizing_detuning() const
{
    return polarizing_detuning.value_or(polarizing_detuning_at_center(laser, trap, species));
}

std::string_view to_string(ScenarioKind kind)
{
    switch (kind) {
    case ScenarioKind::dynamics: return "dynamics";
    case ScenarioKind::aspect_scan: return "aspect_scan";
    case ScenarioKind::intensity_scan: return "intensity_scan";
    case ScenarioKind::od_scan: return "od_scan";
    case ScenarioKind::steady_state: return "steady_state";
    }
    return "unknown";
}

std::string_view to_string(HeatingMode mode)
{
    return mode == HeatingMode::consistency ? "consistency" : "verbatim";
}

ScenarioConfig parse_config(std::string_view text)
{
    std::vector<ConfigDiagnostic> diags;
    std::vector<Entry> entries;
    std::set<std::string> sections_seen;
    std::map<std::pair<std::string, std::string>, int> seen_keys;
    std::string section;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty() || line.front() == ';')
            continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                diags.push_back({line_no, fmt::format("malformed section header '{}'", line)});
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            if (!known_sections.contains(section)) {
                diags.push_back({line_no, fmt::format("unknown section [{}]", section)});
                section.clear();
                continue;
            }
            if (!sections_seen.insert(section).second)
                diags.push_back({line_no, fmt::format("duplicate section [{}]", section)});
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            diags.push_back({line_no, fmt::format("expected key = value, got '{}'", line)});
            continue;
        }
        if (section.empty()) {
            diags.push_back({line_no, "key outside of a known section"});
            continue;
        }
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);

        const auto& table = key_table();
        const bool known = std::any_of(table.begin(), table.end(), [&](const KeyDef& d) {
            return d.section == section && d.key == key;
        });
        if (!known) {
            auto hint = unit_suffix_hint(section, key);
            if (hint.empty())
                hint = other_section_hint(section, key);
            if (hint.empty())
                hint = fmt::format("unknown key '{}' in [{}]; did you mean '{}'?", key, section,
                                   nearest_key(section, key));
            diags.push_back({line_no, hint});
            continue;
        }
        if (const auto [it, fresh] = seen_keys.try_emplace({section, key}, line_no); !fresh) {
            diags.push_back({line_no, fmt::format("duplicate key '{}' (first set on line {})", key,
                                                  it->second)});
            continue;
        }
        entries.push_back({section, key, value, line_no});
    }

    ScenarioConfig cfg;
    // Inline species/trap definitions start from zero and must be complete.
    cfg.species = AtomSpecies{};
    cfg.species.name = "custom";
    cfg.trap = TrapConfig{};

    const bool has_grid_keys = std::any_of(entries.begin(), entries.end(), [](const Entry& e) {
        return e.section == "scenario" && e.key.starts_with("grid_");
    });
    if (has_grid_keys)
        cfg.grid = Grid{};

    for (int pass = 0; pass <= 2; ++pass) {
        for (const auto& e : entries) {
            const auto& table = key_table();
            const auto def = std::find_if(table.begin(), table.end(), [&](const KeyDef& d) {
                return d.section == e.section && d.key == e.key;
            });
            if (def->pass != pass)
                continue;
            try {
                def->apply(cfg, e.value);
            } catch (const Problem& p) {
                diags.push_back({e.line, fmt::format("{}: {}", e.key, p.message)});
            }
        }
    }

    for (const char* required : {"species", "trap", "laser", "scenario"})
        if (!sections_seen.contains(required))
            diags.push_back({0, fmt::format("missing section [{}]", required)});

    auto has = [&](std::string_view sec, std::string_view key) {
        return seen_keys.contains({std::string(sec), std::string(key)});
    };

    if (sections_seen.contains("scenario") && !has("scenario", "kind"))
        diags.push_back({0, "missing key 'kind' in [scenario]"});

    const bool is_scan = cfg.kind == ScenarioKind::aspect_scan ||
                         cfg.kind == ScenarioKind::intensity_scan ||
                         cfg.kind == ScenarioKind::od_scan;
    if (is_scan) {
        if (!cfg.grid || !has("scenario", "grid_min") || !has("scenario", "grid_max") ||
            !has("scenario", "grid_count")) {
            diags.push_back({0, "scans need grid_min, grid_max and grid_count in [scenario]"});
        } else {
            const int line = seen_keys[{"scenario", "grid_count"}];
            if (cfg.grid->count < 2)
                diags.push_back({line, fmt::format("grid_count must be >= 2, got {}", cfg.grid->count)});
            if (!(cfg.grid->min < cfg.grid->max))
                diags.push_back({seen_keys[{"scenario", "grid_min"}], "grid_min must be < grid_max"});
            if (cfg.grid->spacing == GridSpacing::log && !(cfg.grid->min > 0.0))
                diags.push_back({seen_keys[{"scenario", "grid_min"}], "log grid needs grid_min > 0"});
            if (cfg.kind != ScenarioKind::intensity_scan && !(cfg.grid->min > 0.0))
                diags.push_back({seen_keys[{"scenario", "grid_min"}],
                                 "aspect ratio and optical density grids must be positive"});
            if (cfg.kind == ScenarioKind::intensity_scan && cfg.grid->min < 0.0)
                diags.push_back({seen_keys[{"scenario", "grid_min"}], "intensities must be >= 0"});
        }
    }

    const bool needs_cloud = cfg.kind == ScenarioKind::dynamics ||
                             cfg.kind == ScenarioKind::aspect_scan ||
                             cfg.kind == ScenarioKind::steady_state;
    if (needs_cloud && !sections_seen.contains("cloud"))
        diags.push_back({0, "missing section [cloud]"});
    if (cfg.kind == ScenarioKind::aspect_scan && !cfg.cloud.peak_density)
        diags.push_back({0, "aspect_scan needs peak_density_per_cm3 in [cloud]"});
    if (cfg.kind == ScenarioKind::od_scan && (!cfg.kappa_y_ref || !cfg.kappa_ref))
        diags.push_back({0, "od_scan needs kappa_y_ref and kappa_ref in [scenario]"});
    if (cfg.kind == ScenarioKind::intensity_scan && !(cfg.kappa_y && cfg.kappa) &&
        !sections_seen.contains("cloud"))
        diags.push_back({0, "intensity_scan needs kappa_y and kappa, or a [cloud] section"});
    if (cfg.kind == ScenarioKind::dynamics && !(cfg.duration >= 0.0))
        diags.push_back({0, "duration_s must be >= 0"});
    if (!(cfg.sample_interval > 0.0))
        diags.push_back({0, "sample_interval_s must be positive"});
    if (!(cfg.cloud.atom_number > 0.0))
        diags.push_back({0, "atom_number must be positive"});
    if (!(cfg.cloud.temperature_z > 0.0 && cfg.cloud.temperature_y > 0.0))
        diags.push_back({0, "cloud temperatures must be positive"});
    if (cfg.heating_rate < 0.0)
        diags.push_back({0, "heating_rate_J_per_s must be >= 0"});
    if (!(cfg.od_ref > 0.0))
        diags.push_back({0, "od_ref must be positive"});
    if (!(cfg.cooling_duration > 0.0))
        diags.push_back({0, "cooling_duration_s must be positive"});

    auto check = [&](auto&& f) {
        try {
            f();
        } catch (const ValidationError& e) {
            diags.push_back({0, e.what()});
        }
    };
    if (sections_seen.contains("species"))
        check([&] { cfg.species.validate(); });
    if (sections_seen.contains("trap"))
        check([&] { cfg.trap.validate(); });
    if (sections_seen.contains("laser"))
        check([&] { cfg.laser.validate(); });
    if (diags.empty())
        check([&] {
            if (!(cfg.effective_polarizing_detuning() < 0.0))
                throw ValidationError(fmt::format(
                    "polarizing detuning at trap center is {:.4g} Gamma; cooling needs red detuning",
                    cfg.effective_polarizing_detuning()));
        });

    if (!diags.empty()) {
        std::stable_sort(diags.begin(), diags.end(),
                         [](const ConfigDiagnostic& a, const ConfigDiagnostic& b) {
                             return (a.line == 0 ? 1 << 30 : a.line) < (b.line == 0 ? 1 << 30 : b.line);
                         });
        throw ConfigError(std::move(diags));
    }
    return cfg;
}

std::vector<std::pair<std::string, std::string>> ScenarioConfig::resolved() const
{
    std::vector<std::pair<std::string, std::string>> out;
    auto num = [&](std::string key, double v) { out.emplace_back(std::move(key), fmt::format("{:.12g}", v)); };
    auto text = [&](std::string key, std::string_view v) { out.emplace_back(std::move(key), std::string(v)); };

    text("species.preset", species_preset.empty() ? "none" : species_preset);
    text("species.name", species.name);
    num("species.mass_u", species.mass / constants::atomic_mass_unit);
    num("species.wavelength_nm", species.wavelength / units::nanometre);
    num("species.linewidth_MHz", species.linewidth / (2.0 * constants::pi * units::megahertz));
    num("species.saturation_intensity_W_per_m2", species.saturation_intensity);
    num("species.J_ground", species.j_ground);
    num("species.J_excited", species.j_excited);
    num("species.L_ground", species.l_ground);
    num("species.S_ground", species.s_ground);
    num("species.L_excited", species.l_excited);
    num("species.S_excited", species.s_excited);
    num("species.m_J", species.m_j);

    text("trap.preset", trap_preset.empty() ? "none" : trap_preset);
    num("trap.curvature_x_G_per_cm2", trap.curvature_x / units::gauss_per_cm2);
    num("trap.curvature_y_G_per_cm2", trap.curvature_y / units::gauss_per_cm2);
    num("trap.curvature_z_G_per_cm2", trap.curvature_z / units::gauss_per_cm2);
    num("trap.offset_field_G", trap.offset_field / units::gauss);
    num("trap.magnetic_moment_muB", trap.magnetic_moment / constants::bohr_magneton);
    num("trap.larmor_threshold", larmor_threshold);

    num("laser.intensity_Isat", laser.intensity);
    num("laser.detuning_Gamma", laser.detuning);
    num("laser.attenuation_factor", laser.attenuation_factor);
    num("laser.polarization_impurity", laser.polarization_impurity);
    if (polarizing_detuning)
        num("laser.polarizing_detuning_Gamma", *polarizing_detuning);
    num("laser.cooling_duration_s", cooling_duration);

    num("cloud.atom_number", cloud.atom_number);
    num("cloud.temperature_z_uK", cloud.temperature_z / units::microkelvin);
    num("cloud.temperature_y_uK", cloud.temperature_y / units::microkelvin);
    if (cloud.sigma_z)
        num("cloud.sigma_z_um", *cloud.sigma_z / units::micrometre);
    if (cloud.sigma_y)
        num("cloud.sigma_y_um", *cloud.sigma_y / units::micrometre);
    if (cloud.peak_density)
        num("cloud.peak_density_per_cm3", *cloud.peak_density / units::per_cm3);

    text("scenario.kind", to_string(kind));
    if (grid) {
        num("scenario.grid_min", grid->min);
        num("scenario.grid_max", grid->max);
        num("scenario.grid_count", grid->count);
        text("scenario.grid_spacing", grid->spacing == GridSpacing::log ? "log" : "linear");
    }
    num("scenario.duration_s", duration);
    num("scenario.sample_interval_s", sample_interval);
    text("scenario.self_consistent", self_consistent ? "true" : "false");
    text("scenario.consistency_mode", mode == HeatingMode::consistency ? "true" : "false");
    text("scenario.cap_policy",
         cap_policy == CapPolicy::preserve_steady_state ? "preserve_steady_state" : "hard");
    text("scenario.aspect_mode", aspect_mode == AspectMode::fixed_n0 ? "fixed_n0" : "fixed_N");
    num("scenario.heating_rate_J_per_s", heating_rate);
    if (kappa_y)
        num("scenario.kappa_y", *kappa_y);
    if (kappa_z)
        num("scenario.kappa_z", *kappa_z);
    if (kappa)
        num("scenario.kappa", *kappa);
    if (kappa_y_ref)
        num("scenario.kappa_y_ref", *kappa_y_ref);
    if (kappa_ref)
        num("scenario.kappa_ref", *kappa_ref);
    num("scenario.od_ref", od_ref);
    return out;
}

namespace {

const std::map<std::string_view, std::string_view>& scenario_presets()
{
    static const std::map<std::string_view, std::string_view> presets = {
        {"cooling_dynamics", R"([species]
preset = Cr52

[trap]
preset = stuttgart_cloverleaf

[laser]
intensity_Isat = 4e-3
detuning_Gamma = 7
attenuation_factor = 3

[cloud]
atom_number = 1e8
temperature_uK = 1000

[scenario]
kind = dynamics
duration_s = 0.6
sample_interval_s = 1e-3
self_consistent = true
consistency_mode = true
)"},
        {"aspect_scan", R"([species]
preset = Cr52

[trap]
preset = stuttgart_cloverleaf

[laser]
intensity_Isat = 4e-3
detuning_Gamma = 7
polarizing_detuning_Gamma = -0.5

[cloud]
atom_number = 1e8
peak_density_per_cm3 = 5e10

[scenario]
kind = aspect_scan
aspect_mode = fixed_n0
grid_min = 0.1
grid_max = 10
grid_count = 41
grid_spacing = log
)"},
        {"intensity_scan", R"([species]
preset = Cr52

[trap]
preset = stuttgart_cloverleaf

[laser]
intensity_Isat = 4e-3
detuning_Gamma = 7
polarizing_detuning_Gamma = -0.8

[scenario]
kind = intensity_scan
kappa_y = 0.11
kappa = 0.24
heating_rate_J_per_s = 2.6e-26
grid_min = 0
grid_max = 6e-3
grid_count = 25
grid_spacing = linear
)"},
        {"od_scan", R"([species]
preset = Cr52

[trap]
preset = stuttgart_cloverleaf

[laser]
intensity_Isat = 1.6e-3
detuning_Gamma = 7
polarizing_detuning_Gamma = -0.8

[scenario]
kind = od_scan
kappa_y_ref = 0.11
kappa_ref = 0.24
od_ref = 4.5
heating_rate_J_per_s = 2.6e-26
grid_min = 1
grid_max = 10
grid_count = 19
grid_spacing = linear
)"},
        {"steady_state", R"([species]
preset = Cr52

[trap]
preset = stuttgart_cloverleaf

[laser]
intensity_Isat = 4e-3
detuning_Gamma = 7
attenuation_factor = 3
polarization_impurity = 0.1
polarizing_detuning_Gamma = -0.5

[cloud]
atom_number = 1e8
sigma_z_um = 700
sigma_y_um = 410
peak_density_per_cm3 = 5.6e10

[scenario]
kind = steady_state
)"},
    };
    return presets;
}

}  // namespace

std::string preset_scenario_text(std::string_view name)
{
    const auto& presets = scenario_presets();
    const auto it = presets.find(name);
    if (it == presets.end())
        throw ValidationError(fmt::format("unknown scenario preset '{}'", name));
    return std::string(it->second);
}

std::vector<std::string> preset_scenario_names()
{
    std::vector<std::string> out;
    for (const auto& [name, text] : scenario_presets())
        out.emplace_back(name);
    return out;
}

}  // namespace doppler
