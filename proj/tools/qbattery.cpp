// qbattery command-line front end: grid sweeps and verification runs.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qbattery/config.hpp"
#include "qbattery/emit.hpp"
#include "qbattery/sweep.hpp"
#include "qbattery/verify.hpp"

namespace {

using namespace qbattery;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitVerifyFailed = 2;

// Raw flag values; grids are parsed after the config file is applied so
// flags always win.
struct Flags {
    std::string config;
    std::map<std::string, std::string> grids;  // field name -> text
    std::optional<std::string> noise, out, format;
    std::optional<unsigned> workers;
    std::optional<std::uint64_t> draws, seed;
    bool brute{false};
    bool max_only{false};
};

struct GridFlag {
    const char* flag;
    const char* field;
    const char* help;
};

constexpr GridFlag kGridFlags[] = {
    {"--p", "p", "channel probability"},
    {"--n", "n", "number of channel applications"},
    {"--d", "D", "DM interaction strength"},
    {"--j", "J", "XY exchange coupling"},
    {"--jz", "Jz", "z exchange coupling (>= 0)"},
    {"--gamma", "gamma", "XY anisotropy"},
    {"--omega-t", "omega_t", "single-qubit charging phase"},
    {"--t", "t", "two-qubit charging time"},
    {"--omega", "omega", "two-qubit charging field"},
    {"--h0", "h0", "Zeeman field (> 0)"},
};

// Fields each subcommand actually reads.
const std::map<std::string, std::vector<std::string>>& used_fields() {
    static const std::map<std::string, std::vector<std::string>> m{
        {"single", {"p", "n", "omega_t"}},
        {"two", {"p", "n", "h0", "J", "Jz", "gamma", "D", "omega", "t"}},
        {"regions", {"h0", "J", "Jz", "gamma", "D"}},
        {"map", {"p", "n", "h0", "J", "Jz", "gamma", "D", "omega", "t"}},
        {"diag", {"p", "n", "h0", "J", "Jz", "gamma", "D", "omega", "t"}},
        {"verify", {}},
    };
    return m;
}

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "INI file with [run], [noise], [model] and [verify] sections");
    sub->add_option("--out", f.out, "output path (default: standard output)");
    sub->add_option("--format", f.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    sub->add_option("--workers", f.workers, "worker threads (default: all cores)");
    sub->add_option("--noise", f.noise, "pf, bf or ad")->check(CLI::IsMember({"pf", "bf", "ad"}));
    for (const auto& g : kGridFlags) {
        sub->add_option_function<std::string>(
            g.flag, [&f, field = g.field](const std::string& v) { f.grids[field] = v; },
            std::string(g.help) + ": value, a,b,c or start:stop:count");
    }
}

Experiment experiment_for(const std::string& sub, const SweepSpec& spec) {
    if (sub == "single") return Experiment::SingleQubitNoise;
    if (sub == "two") return spec.noise ? Experiment::TwoQubitNoise : Experiment::TwoQubitNoiseless;
    if (sub == "regions") return Experiment::RegionMap;
    if (sub == "map") return Experiment::AsymptoticMap;
    if (sub == "diag") return Experiment::DiagonalDistribution;
    return Experiment::Verify;
}

SweepSpec build_spec(const std::string& sub, const Flags& f) {
    SweepSpec spec;
    if (!f.config.empty()) apply_config(read_config_file(f.config), spec);
    if (f.noise) spec.noise = parse_noise_kind(*f.noise);
    if (f.out) spec.out = *f.out;
    if (f.format) spec.format = *parse_output_format(*f.format);
    if (f.workers) spec.workers = *f.workers;
    if (f.draws) spec.draws = *f.draws;
    if (f.seed) spec.seed = *f.seed;
    spec.brute = spec.brute || f.brute;
    spec.max_only = spec.max_only || f.max_only;

    const auto& used = used_fields().at(sub);
    for (const auto& [field, text] : f.grids) {
        if (std::find(used.begin(), used.end(), field) == used.end()) {
            std::cerr << "qbattery " << sub << ": note: " << field << " is not used by this subcommand\n";
        }
        detail::field(spec.params, field) = parse_grid(text, "--" + field);
    }
    spec.experiment = experiment_for(sub, spec);
    return spec;
}

int write_rows(const SweepSpec& spec) {
    const SweepSpec resolved = resolve(spec);
    const auto cols = columns(resolved);
    std::optional<RowWriter> writer;
    if (resolved.out.empty()) {
        writer.emplace(std::cout, cols, resolved.format);
    } else {
        writer.emplace(resolved.out, cols, resolved.format);
    }
    const auto errors = run_sweep(resolved, [&](const ResultRow& r) { writer->write(r); });
    writer->finish();
    if (errors) std::cerr << "qbattery: " << errors << " row(s) carry an error record\n";
    return kExitOk;
}

int run_verify_command(const SweepSpec& spec) {
    const SweepSpec resolved = resolve(spec);
    const auto report = run_verify(resolved.draws, resolved.seed);
    const auto cols = columns(resolved);
    std::optional<RowWriter> writer;
    if (resolved.out.empty()) {
        writer.emplace(std::cout, cols, resolved.format);
    } else {
        writer.emplace(resolved.out, cols, resolved.format);
    }
    for (const auto& s : report.suites) {
        writer->write(ResultRow{{s.name, static_cast<std::int64_t>(s.passed), static_cast<std::int64_t>(s.failed)}});
        if (s.failed) std::cerr << "qbattery verify: " << s.name << ": " << s.first_failure << '\n';
    }
    writer->finish();
    return report.ok() ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spin quantum battery sweeps: charging, repeated noise and ergotropy"};
    app.require_subcommand(1);

    Flags flags;
    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {
        {"single", "single-qubit ergotropy under repeated noise, over an omega_t grid"},
        {"two", "two-qubit XYZ+DM battery: noiseless closed form, or --noise for N channel steps"},
        {"regions", "critical DM values, region labels and energy gap"},
        {"map", "asymptotic ergotropy map under ad or bf noise"},
        {"diag", "diagonal populations after N channel steps"},
        {"verify", "seeded randomized cross-checks; exit 2 on any failure"},
    };
    std::map<std::string, CLI::App*> commands;
    for (const auto& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        add_common(sub, flags);
        commands[s.name] = sub;
    }
    commands["single"]->add_flag("--max", flags.max_only, "one row per (p, n): maximum over the omega_t grid");
    commands["map"]->add_flag("--brute", flags.brute, "add xi_brute from explicit channel iteration at sampled points");
    commands["verify"]->add_option("--draws", flags.draws, "random draws per suite (default 500)");
    commands["verify"]->add_option("--seed", flags.seed, "RNG seed (default 42)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "qbattery: " << e.what() << "\n\n";
        const CLI::App* where = &app;
        for (const auto* sub : app.get_subcommands()) where = sub;
        std::cerr << where->help();
        return kExitInvalid;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    try {
        const SweepSpec spec = build_spec(sub, flags);
        if (spec.experiment == Experiment::Verify) return run_verify_command(spec);
        return write_rows(spec);
    } catch (const std::exception& e) {
        // bad specs, unreadable configs and unwritable outputs alike
        std::cerr << "qbattery " << sub << ": " << e.what() << '\n';
        return kExitInvalid;
    }
}
