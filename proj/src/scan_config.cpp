#include "latticeglow/scan_config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <utility>

namespace latticeglow {

namespace {

constexpr double pi = std::numbers::pi;

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i)
            out += sep;
        out += parts[i];
    }
    return out;
}

double parse_number(const std::string& text) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + text + "'");
    }
    if (used != text.size())
        throw std::invalid_argument("not a number: '" + text + "'");
    return value;
}

double angle_from_json(const nlohmann::json& value) {
    if (value.is_number())
        return value.get<double>();
    if (value.is_string())
        return parse_angle(value.get<std::string>());
    throw std::invalid_argument("angle must be a number or a string such as \"0.1pi\"");
}

ModeSpec mode_from_json(const nlohmann::json& doc, ModeSpec base, const std::string& where) {
    if (!doc.is_object())
        throw std::invalid_argument(where + " must be an object");
    for (const auto& [key, value] : doc.items()) {
        if (key == "kind")
            base.kind = parse_mode_kind(value.get<std::string>());
        else if (key == "theta")
            base.theta = angle_from_json(value);
        else if (key == "wavelength_ratio")
            base.wavelength_ratio = value.get<double>();
        else if (key == "phase")
            base.phase = angle_from_json(value);
        else
            throw std::invalid_argument("unknown key '" + where + "." + key + "'");
    }
    return base;
}

// Named columns sharing one theta grid, written as a CSV table.
struct ColumnTable {
    std::vector<double> theta;
    std::vector<std::pair<std::string, std::vector<double>>> columns;

    void add(std::string name, std::vector<double> values) { columns.emplace_back(std::move(name), std::move(values)); }

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write " + path.string());
        out << "theta1_rad";
        for (const auto& column : columns)
            out << ',' << column.first;
        out << '\n';
        for (std::size_t i = 0; i < theta.size(); ++i) {
            out << format_value(theta[i]);
            for (const auto& column : columns)
                out << ',' << format_value(column.second[i]);
            out << '\n';
        }
    }
};

template <class Field>
std::vector<double> column(const std::vector<ObservableRow>& rows, Field field) {
    std::vector<double> values;
    values.reserve(rows.size());
    for (const ObservableRow& row : rows)
        values.push_back(std::invoke(field, row));
    return values;
}

struct FigureSetup {
    ModeSpec pump;
    ModeSpec probe;
    int sites = 30;
    int illuminated = 30;
};

std::vector<ObservableRow> scan(const FigureSetup& setup, StateKind kind, const std::vector<double>& grid,
                                double beta = 0.0, bool with_fourth = false) {
    ScanRequest request;
    request.pump = setup.pump;
    request.probe = setup.probe;
    request.lattice = {setup.sites, setup.illuminated, 1};
    request.beta = beta;
    request.with_fourth = with_fourth;
    return angular_scan(request, AtomState(kind, setup.sites, setup.sites), grid);
}

double abs2_amp(const ObservableRow& row) { return std::norm(row.amp); }

std::filesystem::path preset_fig2(const std::filesystem::path& dir) {
    const std::vector<double> grid = default_grid().points();
    FigureSetup full{{ModeKind::traveling, 0.0}, {ModeKind::traveling, 0.0}, 30, 30};
    FigureSetup half = full;
    half.illuminated = 15;

    const auto coh = scan(full, StateKind::coherent, grid);
    const auto sf = scan(full, StateKind::superfluid, grid);
    const auto mi = scan(full, StateKind::mott_insulator, grid);
    const auto coh_half = scan(half, StateKind::coherent, grid);
    const auto sf_half = scan(half, StateKind::superfluid, grid);
    const auto mi_half = scan(half, StateKind::mott_insulator, grid);

    ColumnTable table{grid, {}};
    table.add("classical", column(mi, abs2_amp));
    table.add("incoherent_coh", column(coh, &ObservableRow::incoherent));
    table.add("incoherent_mi", column(mi, &ObservableRow::incoherent));
    table.add("noise_coh", column(coh, &ObservableRow::noise_r));
    table.add("noise_sf", column(sf, &ObservableRow::noise_r));
    table.add("noise_mi", column(mi, &ObservableRow::noise_r));
    table.add("noise_coh_k15", column(coh_half, &ObservableRow::noise_r));
    table.add("noise_sf_k15", column(sf_half, &ObservableRow::noise_r));
    table.add("noise_mi_k15", column(mi_half, &ObservableRow::noise_r));
    const auto path = dir / "fig2.csv";
    table.write(path);
    return path;
}

std::filesystem::path preset_fig3(const std::filesystem::path& dir, const std::string& name, ModeSpec pump) {
    const std::vector<double> grid = default_grid().points();
    const FigureSetup setup{pump, {ModeKind::standing, 0.0}, 30, 30};
    const auto coh = scan(setup, StateKind::coherent, grid);
    const auto sf = scan(setup, StateKind::superfluid, grid);
    const auto mi = scan(setup, StateKind::mott_insulator, grid);

    ColumnTable table{grid, {}};
    table.add("classical", column(mi, abs2_amp));
    table.add("noise_coh", column(coh, &ObservableRow::noise_r));
    table.add("noise_sf", column(sf, &ObservableRow::noise_r));
    table.add("noise_mi", column(mi, &ObservableRow::noise_r));
    const auto path = dir / (name + ".csv");
    table.write(path);
    return path;
}

std::filesystem::path preset_fig4(const std::filesystem::path& dir) {
    const std::vector<double> grid = default_grid().points();
    const FigureSetup setup{{ModeKind::traveling, 0.0}, {ModeKind::traveling, 0.0}, 30, 30};
    const std::pair<const char*, double> betas[] = {
        {"b0", 0.0}, {"b1pi4", pi / 4.0}, {"b1pi2", pi / 2.0}, {"b3pi4", 3.0 * pi / 4.0}};

    ColumnTable table{grid, {}};
    table.add("quad_mean_classical", column(scan(setup, StateKind::mott_insulator, grid), &ObservableRow::quad_mean));
    for (const auto& [tag, beta] : betas) {
        table.add(std::string("quad_var_coh_") + tag,
                  column(scan(setup, StateKind::coherent, grid, beta), &ObservableRow::quad_var));
        table.add(std::string("quad_var_sf_") + tag,
                  column(scan(setup, StateKind::superfluid, grid, beta), &ObservableRow::quad_var));
        table.add(std::string("quad_var_mi_") + tag,
                  column(scan(setup, StateKind::mott_insulator, grid, beta), &ObservableRow::quad_var));
    }
    const auto path = dir / "fig4.csv";
    table.write(path);
    return path;
}

std::filesystem::path preset_fig5(const std::filesystem::path& dir) {
    const std::vector<double> grid = default_grid().points();
    const FigureSetup setup{{ModeKind::traveling, 0.0}, {ModeKind::traveling, 0.0}, 30, 30};
    const auto coh = scan(setup, StateKind::coherent, grid, 0.0, true);
    const auto sf = scan(setup, StateKind::superfluid, grid, 0.0, true);
    const auto mi = scan(setup, StateKind::mott_insulator, grid, 0.0, true);

    ColumnTable table{grid, {}};
    table.add("classical", column(mi, abs2_amp));
    table.add("incoherent_coh", column(coh, &ObservableRow::incoherent));
    table.add("incoherent_mi", column(mi, &ObservableRow::incoherent));
    table.add("fourth_var_coh", column(coh, &ObservableRow::fourth_var));
    table.add("fourth_var_sf", column(sf, &ObservableRow::fourth_var));
    table.add("fourth_var_mi", column(mi, &ObservableRow::fourth_var));
    const auto path = dir / "fig5.csv";
    table.write(path);
    return path;
}

std::filesystem::path preset_cavity(const std::filesystem::path& dir) {
    const auto path = dir / "cavity.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << "state,big_n,big_m,k,amp_re,amp_im,intensity,fourth_var,selforg_intensity\n";
    for (int size : {4, 30}) {
        for (StateKind kind : {StateKind::mott_insulator, StateKind::superfluid}) {
            const CavityExample c = cavity_example(AtomState(kind, size, size), size);
            out << to_string(kind) << ',' << size << ',' << size << ',' << size << ',' << format_value(c.amp.real())
                << ',' << format_value(c.amp.imag()) << ',' << format_value(c.intensity) << ','
                << format_value(c.fourth_var) << ',' << format_value(c.selforg_intensity) << '\n';
        }
    }
    return path;
}

} // namespace

Observable parse_observable(const std::string& name) {
    static const std::pair<const char*, Observable> table[] = {
        {"amp", Observable::amp},           {"intensity", Observable::intensity},
        {"noise", Observable::noise},       {"incoherent", Observable::incoherent},
        {"quad", Observable::quad},         {"fourth", Observable::fourth},
        {"photon_var", Observable::photon_var}};
    for (const auto& [key, value] : table)
        if (name == key)
            return value;
    throw std::invalid_argument("unknown observable '" + name +
                                "' (expected amp, intensity, noise, incoherent, quad, fourth, photon_var)");
}

std::string to_string(Observable observable) {
    switch (observable) {
    case Observable::amp: return "amp";
    case Observable::intensity: return "intensity";
    case Observable::noise: return "noise";
    case Observable::incoherent: return "incoherent";
    case Observable::quad: return "quad";
    case Observable::fourth: return "fourth";
    case Observable::photon_var: return "photon_var";
    }
    return "unknown";
}

std::string to_string(ModeKind kind) { return kind == ModeKind::traveling ? "traveling" : "standing"; }

ModeKind parse_mode_kind(const std::string& name) {
    if (name == "traveling" || name == "travelling")
        return ModeKind::traveling;
    if (name == "standing")
        return ModeKind::standing;
    throw std::invalid_argument("unknown mode kind '" + name + "' (expected traveling or standing)");
}

std::vector<std::string> observable_columns(Observable observable) {
    switch (observable) {
    case Observable::amp: return {"amp_re", "amp_im"};
    case Observable::intensity: return {"intensity"};
    case Observable::noise: return {"noise_r"};
    case Observable::incoherent: return {"incoherent"};
    case Observable::quad: return {"quad_mean", "quad_var"};
    case Observable::fourth: return {"fourth", "fourth_var"};
    case Observable::photon_var: return {"photon_var"};
    }
    return {};
}

std::vector<double> GridSpec::points() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    if (count == 1) {
        out.push_back(min);
        return out;
    }
    for (int i = 0; i < count; ++i)
        out.push_back(i == count - 1 ? max : min + (max - min) * (static_cast<double>(i) / (count - 1)));
    return out;
}

GridSpec default_grid() { return {-pi, pi, 2001}; }

double parse_angle(const std::string& raw) {
    std::string text = raw;
    text.erase(std::remove_if(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }), text.end());
    const auto pos = text.find("pi");
    if (pos == std::string::npos)
        return parse_number(text);

    // [sign][factor]pi[/divisor]
    std::string factor_text = text.substr(0, pos);
    std::string rest = text.substr(pos + 2);
    double factor = 1.0;
    if (factor_text == "-")
        factor = -1.0;
    else if (!factor_text.empty() && factor_text != "+")
        factor = parse_number(factor_text.back() == '*' ? factor_text.substr(0, factor_text.size() - 1) : factor_text);
    double divisor = 1.0;
    if (!rest.empty()) {
        if (rest.front() != '/')
            throw std::invalid_argument("cannot parse angle '" + raw + "'");
        divisor = parse_number(rest.substr(1));
    }
    return factor * pi / divisor;
}

GridSpec parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');)
        parts.push_back(part);
    if (parts.size() != 3)
        throw std::invalid_argument("grid must look like min:max:count, got '" + text + "'");
    const double count = parse_number(parts[2]);
    if (count != std::floor(count) || count > std::numeric_limits<int>::max())
        throw std::invalid_argument("grid count must be an integer, got '" + parts[2] + "'");
    return {parse_angle(parts[0]), parse_angle(parts[1]), static_cast<int>(count)};
}

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::invalid_argument("invalid scan configuration: " + join(problems, "; ")), problems_(std::move(problems)) {}

std::vector<std::string> ScanConfig::problems() const {
    std::vector<std::string> out;
    if (big_n < 1)
        out.push_back("big_n (N) must be >= 1");
    if (big_m < 1)
        out.push_back("big_m (M) must be >= 1");
    if (big_m > std::numeric_limits<int>::max())
        out.push_back("big_m (M) is too large");
    if (state == StateKind::mott_insulator && big_m >= 1 && big_n % big_m != 0)
        out.push_back("Mott insulator needs N divisible by M (commensurate filling)");
    if (k < 1)
        out.push_back("k (K) must be >= 1");
    if (k > big_m)
        out.push_back("k (K) must not exceed big_m (M): K <= M");
    if (offset < 1)
        out.push_back("offset must be >= 1");
    if (static_cast<std::int64_t>(offset) + k - 1 > big_m)
        out.push_back("illuminated window must fit the lattice: offset + K - 1 <= M");
    for (const auto& [name, mode] : {std::pair{"pump", &pump}, std::pair{"probe", &probe}}) {
        if (!(mode->wavelength_ratio > 0.0) || !std::isfinite(mode->wavelength_ratio))
            out.push_back(std::string(name) + ".wavelength_ratio must be positive");
        if (!std::isfinite(mode->theta) || !std::isfinite(mode->phase))
            out.push_back(std::string(name) + " angles must be finite");
    }
    if (!std::isfinite(beta))
        out.push_back("beta must be finite");
    if (grid.count < 1)
        out.push_back("grid count must be >= 1");
    if (!std::isfinite(grid.min) || !std::isfinite(grid.max))
        out.push_back("grid bounds must be finite");
    if (observables.empty())
        out.push_back("observables must not be empty");
    for (std::size_t i = 0; i < observables.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (observables[i] == observables[j])
                out.push_back("observable '" + to_string(observables[i]) + "' listed twice");
    if (coupling) {
        if (!(coupling->kappa > 0.0))
            out.push_back("coupling.kappa must be > 0");
        if (!(std::abs(coupling->delta_0a) > 0.0))
            out.push_back("coupling.delta_0a must be nonzero");
    }
    return out;
}

void ScanConfig::validate() const {
    if (auto found = problems(); !found.empty())
        throw ConfigError(std::move(found));
}

ScanConfig config_from_json(const nlohmann::json& doc, ScanConfig base) {
    if (!doc.is_object())
        throw ConfigError({"configuration must be a JSON object"});
    std::vector<std::string> problems;
    for (const auto& [key, value] : doc.items()) {
        try {
            if (key == "state")
                base.state = parse_state_kind(value.get<std::string>());
            else if (key == "big_n")
                base.big_n = value.get<std::int64_t>();
            else if (key == "big_m")
                base.big_m = value.get<std::int64_t>();
            else if (key == "k")
                base.k = value.get<int>();
            else if (key == "offset")
                base.offset = value.get<int>();
            else if (key == "pump")
                base.pump = mode_from_json(value, base.pump, "pump");
            else if (key == "probe")
                base.probe = mode_from_json(value, base.probe, "probe");
            else if (key == "beta")
                base.beta = angle_from_json(value);
            else if (key == "grid") {
                if (value.is_string()) {
                    base.grid = parse_grid(value.get<std::string>());
                } else {
                    for (const auto& [gkey, gvalue] : value.items()) {
                        if (gkey == "min")
                            base.grid.min = angle_from_json(gvalue);
                        else if (gkey == "max")
                            base.grid.max = angle_from_json(gvalue);
                        else if (gkey == "count")
                            base.grid.count = gvalue.get<int>();
                        else
                            throw std::invalid_argument("unknown key 'grid." + gkey + "'");
                    }
                }
            } else if (key == "observables") {
                base.observables.clear();
                for (const auto& item : value)
                    base.observables.push_back(parse_observable(item.get<std::string>()));
            } else if (key == "coupling") {
                ScatterModel model = base.coupling.value_or(ScatterModel{});
                double a0_re = model.a0.real();
                double a0_im = model.a0.imag();
                for (const auto& [ckey, cvalue] : value.items()) {
                    if (ckey == "g0")
                        model.g0 = cvalue.get<double>();
                    else if (ckey == "a0_re")
                        a0_re = cvalue.get<double>();
                    else if (ckey == "a0_im")
                        a0_im = cvalue.get<double>();
                    else if (ckey == "delta_0a")
                        model.delta_0a = cvalue.get<double>();
                    else if (ckey == "kappa")
                        model.kappa = cvalue.get<double>();
                    else if (ckey == "delta_01")
                        model.delta_01 = cvalue.get<double>();
                    else
                        throw std::invalid_argument("unknown key 'coupling." + ckey + "'");
                }
                model.a0 = {a0_re, a0_im};
                base.coupling = model;
            } else if (key == "out")
                base.out = value.get<std::string>();
            else
                throw std::invalid_argument("unknown key '" + key + "'");
        } catch (const nlohmann::json::exception& e) {
            problems.push_back("field '" + key + "': " + e.what());
        } catch (const std::invalid_argument& e) {
            problems.push_back("field '" + key + "': " + e.what());
        }
    }
    if (!problems.empty())
        throw ConfigError(std::move(problems));
    return base;
}

std::string format_value(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

void write_scan_csv(const ScanConfig& config, std::ostream& out) {
    config.validate();
    const bool need_fourth = std::any_of(config.observables.begin(), config.observables.end(), [](Observable o) {
        return o == Observable::fourth || o == Observable::photon_var;
    });

    ScanRequest request;
    request.pump = config.pump;
    request.probe = config.probe;
    request.lattice = config.lattice();
    request.model = config.coupling.value_or(ScatterModel{});
    request.beta = config.beta;
    request.with_fourth = need_fourth;
    const std::vector<double> grid = config.grid.points();
    const std::vector<ObservableRow> rows = angular_scan(request, config.atom_state(), grid);

    out << "theta1_rad";
    for (Observable o : config.observables)
        for (const std::string& name : observable_columns(o))
            out << ',' << name;
    out << '\n';

    for (const ObservableRow& row : rows) {
        out << format_value(row.theta1);
        for (Observable o : config.observables) {
            switch (o) {
            case Observable::amp:
                out << ',' << format_value(row.amp.real()) << ',' << format_value(row.amp.imag());
                break;
            case Observable::intensity: out << ',' << format_value(row.intensity); break;
            case Observable::noise: out << ',' << format_value(row.noise_r); break;
            case Observable::incoherent: out << ',' << format_value(row.incoherent); break;
            case Observable::quad:
                out << ',' << format_value(row.quad_mean) << ',' << format_value(row.quad_var);
                break;
            case Observable::fourth:
                out << ',' << format_value(row.fourth) << ',' << format_value(row.fourth_var);
                break;
            case Observable::photon_var: out << ',' << format_value(row.photon_var); break;
            }
        }
        out << '\n';
    }
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"fig2", "fig3a", "fig3b", "fig3c", "fig4", "fig5", "cavity"};
    return names;
}

bool is_preset(const std::string& name) {
    const auto& names = preset_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

std::vector<std::filesystem::path> run_preset(const std::string& name, const std::filesystem::path& out_dir) {
    if (!is_preset(name))
        throw std::invalid_argument("unknown preset '" + name + "' (expected one of: " + join(preset_names(), ", ") +
                                    ")");
    std::filesystem::create_directories(out_dir);
    if (name == "fig2")
        return {preset_fig2(out_dir)};
    if (name == "fig3a")
        return {preset_fig3(out_dir, name, {ModeKind::traveling, 0.1 * pi})};
    if (name == "fig3b")
        return {preset_fig3(out_dir, name, {ModeKind::traveling, 0.0})};
    if (name == "fig3c")
        return {preset_fig3(out_dir, name, {ModeKind::standing, 0.1 * pi})};
    if (name == "fig4")
        return {preset_fig4(out_dir)};
    if (name == "fig5")
        return {preset_fig5(out_dir)};
    return {preset_cavity(out_dir)};
}

} // namespace latticeglow
