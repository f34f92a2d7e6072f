#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "latticeglow/atom_states.hpp"
#include "latticeglow/mode_geometry.hpp"
#include "latticeglow/observables.hpp"

namespace latticeglow {

enum class Observable { amp, intensity, noise, incoherent, quad, fourth, photon_var };

Observable parse_observable(const std::string& name);
std::string to_string(Observable observable);
std::string to_string(ModeKind kind);
ModeKind parse_mode_kind(const std::string& name);

// CSV column names an observable expands to.
std::vector<std::string> observable_columns(Observable observable);

// count points evenly spaced over [min, max], endpoints included.
struct GridSpec {
    double min;
    double max;
    int count;

    std::vector<double> points() const;
};

GridSpec default_grid();

// Parses "min:max:count"; min and max accept an optional "pi" factor
// ("-pi", "0.5pi", "pi/2").
GridSpec parse_grid(const std::string& text);
double parse_angle(const std::string& text);

class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

struct ScanConfig {
    StateKind state = StateKind::superfluid;
    std::int64_t big_n = 30;
    std::int64_t big_m = 30;
    int k = 30;
    int offset = 1;
    ModeSpec pump{ModeKind::traveling, 0.0, 0.5, 0.0};
    ModeSpec probe{ModeKind::traveling, 0.0, 0.5, 0.0};
    double beta = 0.0;
    GridSpec grid = default_grid();
    std::vector<Observable> observables{Observable::amp, Observable::intensity, Observable::noise};
    std::optional<ScatterModel> coupling;
    std::string out;

    // Every violated constraint, in a stable order; empty when valid.
    std::vector<std::string> problems() const;
    void validate() const;

    LatticeSpec lattice() const { return {static_cast<int>(big_m), k, offset}; }
    AtomState atom_state() const { return {state, big_n, big_m}; }
};

// Overlays the fields present in `doc` onto `base`. Unknown keys are errors.
ScanConfig config_from_json(const nlohmann::json& doc, ScanConfig base = {});

// Header "theta1_rad,<columns>" then one row per grid point.
void write_scan_csv(const ScanConfig& config, std::ostream& out);

// %.17g formatting used by every CSV the tool writes.
std::string format_value(double value);

const std::vector<std::string>& preset_names();
bool is_preset(const std::string& name);

// Writes the preset's CSV file(s) into out_dir and returns their paths.
std::vector<std::filesystem::path> run_preset(const std::string& name, const std::filesystem::path& out_dir);

} // namespace latticeglow
