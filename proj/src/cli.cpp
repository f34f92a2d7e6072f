#include "latticeglow/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "latticeglow/fock_oracle.hpp"
#include "latticeglow/scan_config.hpp"
#include "latticeglow/selftest.hpp"

namespace latticeglow {

namespace {

struct Flags {
    std::string preset;
    std::string config;
    std::string state;
    std::optional<std::int64_t> big_n;
    std::optional<std::int64_t> big_m;
    std::optional<int> k;
    std::optional<int> offset;
    std::string theta0;
    std::string pump;
    std::string probe;
    std::string beta;
    std::string grid;
    std::string out;
    std::string observables;
    bool selftest = false;
    int max_nm = 5;
    double tol = 1e-10;
    std::string dump_distribution;
};

std::vector<Observable> parse_observable_list(const std::string& text) {
    std::vector<Observable> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty())
            out.push_back(parse_observable(item));
    return out;
}

// Defaults, then the JSON document, then explicit flags.
ScanConfig build_config(const Flags& flags) {
    ScanConfig config;
    if (!flags.config.empty()) {
        std::ifstream in(flags.config);
        if (!in)
            throw ConfigError({"cannot open config file '" + flags.config + "'"});
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError({"config file '" + flags.config + "' is not valid JSON: " + e.what()});
        }
        config = config_from_json(doc, config);
    }

    std::vector<std::string> problems;
    const auto apply = [&](const char* flag, auto&& action) {
        try {
            action();
        } catch (const std::invalid_argument& e) {
            problems.push_back(std::string(flag) + ": " + e.what());
        }
    };
    if (!flags.state.empty())
        apply("--state", [&] { config.state = parse_state_kind(flags.state); });
    if (flags.big_n)
        config.big_n = *flags.big_n;
    if (flags.big_m)
        config.big_m = *flags.big_m;
    if (flags.k)
        config.k = *flags.k;
    if (flags.offset)
        config.offset = *flags.offset;
    if (!flags.theta0.empty())
        apply("--theta0", [&] { config.pump.theta = parse_angle(flags.theta0); });
    if (!flags.pump.empty())
        apply("--pump", [&] { config.pump.kind = parse_mode_kind(flags.pump); });
    if (!flags.probe.empty())
        apply("--probe", [&] { config.probe.kind = parse_mode_kind(flags.probe); });
    if (!flags.beta.empty())
        apply("--beta", [&] { config.beta = parse_angle(flags.beta); });
    if (!flags.grid.empty())
        apply("--grid", [&] { config.grid = parse_grid(flags.grid); });
    if (!flags.observables.empty())
        apply("--observables", [&] { config.observables = parse_observable_list(flags.observables); });
    if (!flags.out.empty())
        config.out = flags.out;
    if (!problems.empty())
        throw ConfigError(std::move(problems));
    return config;
}

int run_custom(const Flags& flags, std::ostream& out) {
    const ScanConfig config = build_config(flags);
    config.validate();
    if (config.out.empty() || config.out == "-") {
        write_scan_csv(config, out);
        return exit_ok;
    }
    // Render fully before touching the file so a failed run leaves no partial output.
    std::ostringstream buffer;
    write_scan_csv(config, buffer);
    std::ofstream file(config.out, std::ios::binary);
    if (!file)
        throw std::runtime_error("cannot write '" + config.out + "'");
    file << buffer.str();
    return exit_ok;
}

int dump_distribution(const Flags& flags, std::ostream& out) {
    const ScanConfig config = build_config(flags);
    const OccupationDistribution dist = enumerate(config.atom_state());
    std::ofstream file(flags.dump_distribution, std::ios::binary);
    if (!file)
        throw std::runtime_error("cannot write '" + flags.dump_distribution + "'");
    dist.write_csv(file);
    out << "wrote " << dist.size() << " entries to " << flags.dump_distribution << '\n';
    return exit_ok;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Light scattering from ultracold atoms in optical lattices: angular scans, figure presets "
                 "and an oracle self-test.",
                 "latticeglow"};
    Flags flags;

    std::string preset_help = "Write a frozen figure preset (";
    for (const auto& name : preset_names())
        preset_help += name + (name == preset_names().back() ? ")" : ", ");
    app.add_option("--preset", flags.preset, preset_help);
    app.add_option("--config", flags.config, "JSON scan configuration; flags override its fields");
    app.add_option("--state", flags.state, "mi | sf | coherent");
    app.add_option("--big-n", flags.big_n, "Atom number N");
    app.add_option("--big-m", flags.big_m, "Site number M");
    app.add_option("--k", flags.k, "Illuminated sites K");
    app.add_option("--offset", flags.offset, "First illuminated site (1-based)");
    app.add_option("--theta0", flags.theta0, "Pump angle in radians, e.g. 0.1pi");
    app.add_option("--pump", flags.pump, "Pump mode: traveling | standing");
    app.add_option("--probe", flags.probe, "Probe mode: traveling | standing");
    app.add_option("--beta", flags.beta, "Quadrature angle, e.g. pi/4");
    app.add_option("--grid", flags.grid, "theta1 grid min:max:count (default -pi:pi:2001)");
    app.add_option("--out", flags.out, "Output CSV (scan) or directory (preset); '-' or empty for stdout");
    app.add_option("--observables", flags.observables,
                   "Comma list of amp,intensity,noise,incoherent,quad,fourth,photon_var");
    app.add_flag("--selftest", flags.selftest, "Run the closed-form versus oracle suites");
    app.add_option("--max-nm", flags.max_nm, "Largest N = M for --selftest (2..8)");
    app.add_option("--tol", flags.tol, "Relative tolerance for --selftest");
    app.add_option("--dump-distribution", flags.dump_distribution,
                   "Write the enumerated occupation distribution of the chosen state to this CSV");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return exit_usage;
    }

    const int modes = (flags.selftest ? 1 : 0) + (flags.preset.empty() ? 0 : 1) +
                      (flags.dump_distribution.empty() ? 0 : 1);
    if (modes > 1) {
        err << "error: --selftest, --preset and --dump-distribution are mutually exclusive\n";
        return exit_usage;
    }

    try {
        if (flags.selftest) {
            if (flags.max_nm < 2 || flags.max_nm > 8) {
                err << "error: --max-nm must lie in 2..8, got " << flags.max_nm << '\n';
                return exit_usage;
            }
            return run_selftest({flags.max_nm, flags.tol}, out);
        }
        if (!flags.preset.empty()) {
            if (!is_preset(flags.preset)) {
                err << "error: unknown preset '" << flags.preset << "'; choose one of:";
                for (const auto& name : preset_names())
                    err << ' ' << name;
                err << '\n';
                return exit_usage;
            }
            const std::string dir = flags.out.empty() || flags.out == "-" ? "." : flags.out;
            for (const auto& path : run_preset(flags.preset, dir))
                out << "wrote " << path.string() << '\n';
            return exit_ok;
        }
        if (!flags.dump_distribution.empty())
            return dump_distribution(flags, out);
        return run_custom(flags, out);
    } catch (const ConfigError& e) {
        err << "invalid configuration:\n";
        for (const auto& problem : e.problems())
            err << "  - " << problem << '\n';
        return exit_failure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
}

} // namespace latticeglow
