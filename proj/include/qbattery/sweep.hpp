// Declarative parameter grids and the parallel sweep engine

#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "qbattery/channels.hpp"
#include "qbattery/ergotropy.hpp"
#include "qbattery/models.hpp"

namespace qbattery {

// Invalid sweep input; the message starts with the offending field path.
struct SpecError : InvalidParameter {
    SpecError(const std::string& field, const std::string& what)
        : InvalidParameter(field + ": " + what), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

enum class Experiment {
    SingleQubitNoise,
    TwoQubitNoiseless,
    TwoQubitNoise,
    RegionMap,
    AsymptoticMap,
    DiagonalDistribution,
    Verify,
};

inline constexpr std::uint64_t kMaxGridPoints = 100'000'000;

// ---------------------------------------------------------------- grids

// "x", "a,b,c" or "start:stop:count" (inclusive endpoints).
struct Grid {
    std::vector<double> values;
    std::string text;

    std::size_t size() const { return values.size(); }
    bool scalar() const { return values.size() == 1; }
};

namespace detail {
inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline double parse_real(std::string_view s, const std::string& field) {
    s = trim(s);
    double v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw SpecError(field, "not a number: '" + std::string(s) + "'");
    }
    if (!std::isfinite(v)) throw SpecError(field, "must be finite");
    return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        out.push_back(s.substr(pos, next == std::string_view::npos ? next : next - pos));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}
}  // namespace detail

inline Grid parse_grid(std::string_view text, const std::string& field) {
    Grid g;
    g.text = std::string(detail::trim(text));
    if (g.text.empty()) throw SpecError(field, "empty value");
    if (g.text.find(':') != std::string::npos) {
        const auto parts = detail::split(g.text, ':');
        if (parts.size() != 3) throw SpecError(field, "range must be start:stop:count");
        const double start = detail::parse_real(parts[0], field);
        const double stop = detail::parse_real(parts[1], field);
        const double count_real = detail::parse_real(parts[2], field);
        if (count_real < 1 || count_real != std::floor(count_real)) {
            throw SpecError(field, "count must be an integer >= 1");
        }
        if (!(start <= stop)) throw SpecError(field, "start must be <= stop");
        if (count_real > static_cast<double>(kMaxGridPoints)) {
            throw SpecError(field, "count exceeds the grid size guard");
        }
        const auto count = static_cast<std::size_t>(count_real);
        g.values.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            // exact endpoints; interior points by interpolation
            g.values[i] = count == 1 ? start
                          : i + 1 == count
                              ? stop
                              : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
        }
        return g;
    }
    for (auto part : detail::split(g.text, ',')) g.values.push_back(detail::parse_real(part, field));
    return g;
}

inline Grid scalar_grid(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return Grid{{v}, std::string(buf, res.ptr)};
}

// ---------------------------------------------------------------- spec

enum class OutputFormat { Csv, JsonLines };

inline std::optional<OutputFormat> parse_output_format(std::string_view s) {
    if (s == "csv") return OutputFormat::Csv;
    if (s == "jsonl" || s == "jsonlines") return OutputFormat::JsonLines;
    return std::nullopt;
}

// Model fields a sweep may vary. Unset fields take the per-experiment
// default from default_grid().
struct SweepParams {
    std::optional<Grid> h0, J, Jz, gamma, D, omega, t, omega_t, p, n;
};

struct SweepSpec {
    Experiment experiment{Experiment::SingleQubitNoise};
    SweepParams params;
    std::optional<NoiseKind> noise;
    bool brute{false};     // AsymptoticMap: add xi_brute at sampled points
    bool max_only{false};  // SingleQubitNoise: one row per (p, n) with max over omega_t
    std::string out;       // empty: standard output
    OutputFormat format{OutputFormat::Csv};
    unsigned workers{0};   // 0: hardware concurrency
    std::uint64_t draws{500};
    std::uint64_t seed{42};
};

struct Axis {
    std::string name;
    const Grid* grid;
};

inline Grid default_grid(const SweepSpec& spec, std::string_view name) {
    if (name == "h0" || name == "omega") return scalar_grid(1.0);
    if (name == "p") return scalar_grid(0.1);
    if (name == "n") {
        return scalar_grid(spec.experiment == Experiment::AsymptoticMap ? 500.0 : 0.0);
    }
    return scalar_grid(0.0);
}

namespace detail {
inline const std::vector<std::string>& axis_names(const SweepSpec& spec) {
    static const std::vector<std::string> single{"p", "n", "omega_t"};
    static const std::vector<std::string> single_max{"p", "n"};
    static const std::vector<std::string> two{"h0", "J", "Jz", "gamma", "D", "omega", "t"};
    static const std::vector<std::string> two_noise{"p", "n", "h0", "J", "Jz", "gamma", "D", "omega", "t"};
    static const std::vector<std::string> regions{"h0", "J", "Jz", "gamma", "D"};
    static const std::vector<std::string> none{};
    switch (spec.experiment) {
        case Experiment::SingleQubitNoise: return spec.max_only ? single_max : single;
        case Experiment::TwoQubitNoiseless: return two;
        case Experiment::TwoQubitNoise:
        case Experiment::DiagonalDistribution: return two_noise;
        case Experiment::RegionMap:
        case Experiment::AsymptoticMap: return regions;
        case Experiment::Verify: return none;
    }
    return none;
}

template <class Params>
auto& field(Params& p, std::string_view name) {
    if (name == "h0") return p.h0;
    if (name == "J") return p.J;
    if (name == "Jz") return p.Jz;
    if (name == "gamma") return p.gamma;
    if (name == "D") return p.D;
    if (name == "omega") return p.omega;
    if (name == "t") return p.t;
    if (name == "omega_t") return p.omega_t;
    if (name == "p") return p.p;
    return p.n;
}
}  // namespace detail

// Fills unset fields with defaults, then checks ranges. Field paths follow
// the config file layout.
inline SweepSpec resolve(SweepSpec spec) {
    static const char* kAll[] = {"h0", "J", "Jz", "gamma", "D", "omega", "t", "omega_t", "p", "n"};
    for (const char* name : kAll) {
        auto& f = detail::field(spec.params, name);
        if (!f) f = default_grid(spec, name);
    }
    const auto check_all = [&](const char* name, const char* path, auto pred, const char* msg) {
        for (double v : detail::field(spec.params, name)->values) {
            if (!pred(v)) throw SpecError(path, msg);
        }
    };
    check_all("h0", "model.h0", [](double v) { return v > 0; }, "must be > 0");
    check_all("omega", "model.omega", [](double v) { return v > 0; }, "must be > 0");
    check_all("Jz", "model.jz", [](double v) { return v >= 0; }, "must be >= 0");
    check_all("t", "model.t", [](double v) { return v >= 0; }, "must be >= 0");
    check_all("omega_t", "model.omega_t", [](double v) { return v >= 0; }, "must be >= 0");
    check_all("p", "noise.p", [](double v) { return v >= 0 && v <= 1; }, "must lie in [0, 1]");
    check_all("n", "noise.n", [](double v) { return v >= 0 && v == std::floor(v) && v <= 9.0e15; },
              "must be a non-negative integer");

    const bool needs_noise = spec.experiment == Experiment::SingleQubitNoise ||
                             spec.experiment == Experiment::AsymptoticMap ||
                             spec.experiment == Experiment::DiagonalDistribution;
    if (needs_noise && !spec.noise) throw SpecError("noise.kind", "required for this experiment");
    if ((spec.experiment == Experiment::AsymptoticMap || spec.experiment == Experiment::DiagonalDistribution) &&
        spec.noise == NoiseKind::PhaseFlip) {
        throw SpecError("noise.kind", "must be ad or bf for this experiment");
    }
    if (spec.brute && spec.experiment != Experiment::AsymptoticMap) {
        throw SpecError("run.brute", "only meaningful for the asymptotic map");
    }
    if (spec.max_only && spec.experiment != Experiment::SingleQubitNoise) {
        throw SpecError("run.max", "only meaningful for single-qubit sweeps");
    }
    if (spec.experiment == Experiment::Verify && spec.draws == 0) {
        throw SpecError("verify.draws", "must be >= 1");
    }

    std::uint64_t total = 1;
    for (const auto& name : detail::axis_names(spec)) {
        total *= detail::field(spec.params, name)->size();
        if (total > kMaxGridPoints) throw SpecError("model", "grid exceeds 1e8 points");
    }
    if (spec.max_only) {
        if (total * spec.params.omega_t->size() > kMaxGridPoints) {
            throw SpecError("model.omega_t", "grid exceeds 1e8 points");
        }
    }
    return spec;
}

// Swept axes in nesting order (last varies fastest).
inline std::vector<Axis> axes(const SweepSpec& resolved) {
    std::vector<Axis> out;
    for (const auto& name : detail::axis_names(resolved)) {
        out.push_back({name, &*detail::field(resolved.params, name)});
    }
    return out;
}

inline std::uint64_t point_count(const std::vector<Axis>& ax) {
    std::uint64_t total = 1;
    for (const auto& a : ax) total *= a.grid->size();
    return total;
}

// ---------------------------------------------------------------- rows

enum class ColumnType { Integer, Real, Text };

struct Column {
    std::string name;
    ColumnType type;
};

using Cell = std::variant<std::int64_t, double, std::string>;

struct ResultRow {
    std::vector<Cell> values;
    friend bool operator==(const ResultRow& a, const ResultRow& b) {
        if (a.values.size() != b.values.size()) return false;
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            const auto* x = std::get_if<double>(&a.values[i]);
            const auto* y = std::get_if<double>(&b.values[i]);
            if (x && y) {
                // bitwise, so NaN == NaN and -0 != +0
                if (std::bit_cast<std::uint64_t>(*x) != std::bit_cast<std::uint64_t>(*y)) return false;
            } else if (a.values[i] != b.values[i]) {
                return false;
            }
        }
        return true;
    }
};

inline std::vector<Column> columns(const SweepSpec& resolved) {
    std::vector<Column> cols;
    const bool noisy = resolved.noise.has_value() && resolved.experiment != Experiment::TwoQubitNoiseless &&
                       resolved.experiment != Experiment::RegionMap;
    if (noisy) cols.push_back({"noise", ColumnType::Text});
    for (const auto& a : axes(resolved)) {
        cols.push_back({a.name, a.name == "n" ? ColumnType::Integer : ColumnType::Real});
    }
    const auto real = [&](const char* name) { cols.push_back({name, ColumnType::Real}); };
    switch (resolved.experiment) {
        case Experiment::SingleQubitNoise:
            real(resolved.max_only ? "xi_max" : "xi");
            break;
        case Experiment::TwoQubitNoiseless:
            cols.push_back({"region", ColumnType::Text});
            real("e_g");
            real("xi");
            break;
        case Experiment::TwoQubitNoise:
            cols.push_back({"region", ColumnType::Text});
            real("xi");
            break;
        case Experiment::RegionMap:
            real("d_c");
            real("d_c_prime");
            cols.push_back({"region", ColumnType::Text});
            real("e_g");
            break;
        case Experiment::AsymptoticMap:
            real("d_c");
            real("d_c_prime");
            cols.push_back({"region", ColumnType::Text});
            real("zeta");
            real("xi");
            if (resolved.brute) real("xi_brute");
            break;
        case Experiment::DiagonalDistribution:
            real("diag0");
            real("diag1");
            real("diag2");
            real("diag3");
            break;
        case Experiment::Verify:
            cols.push_back({"suite", ColumnType::Text});
            cols.push_back({"passed", ColumnType::Integer});
            cols.push_back({"failed", ColumnType::Integer});
            return cols;
    }
    cols.push_back({"error", ColumnType::Text});
    return cols;
}

namespace detail {
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline double value_of(const std::vector<Axis>& ax, const std::vector<std::size_t>& idx, std::string_view name) {
    for (std::size_t k = 0; k < ax.size(); ++k) {
        if (ax[k].name == name) return ax[k].grid->values[idx[k]];
    }
    return std::numeric_limits<double>::quiet_NaN();
}

inline XYZDMParams model_at(const std::vector<Axis>& ax, const std::vector<std::size_t>& idx, const SweepSpec& s) {
    XYZDMParams p;
    const auto get = [&](const char* name, const std::optional<Grid>& fallback) {
        const double v = value_of(ax, idx, name);
        return std::isnan(v) ? fallback->values.front() : v;
    };
    p.h0 = get("h0", s.params.h0);
    p.J = get("J", s.params.J);
    p.Jz = get("Jz", s.params.Jz);
    p.gamma = get("gamma", s.params.gamma);
    p.D = get("D", s.params.D);
    p.omega = get("omega", s.params.omega);
    return p;
}

// Points whose brute-force cross-check is run: at most about 100 per map.
inline std::uint64_t brute_stride(std::uint64_t total) { return std::max<std::uint64_t>(1, total / 100); }

inline DensityMatrix iterate_two(const XYZDMParams& p, double t, NoiseKind kind, double prob, std::int64_t n) {
    return apply_channel_n(kraus_two(kind, prob), charged_state_two(p, t), n);
}

// Outputs for one grid point, appended after the axis values.
inline void evaluate_outputs(const SweepSpec& s, const std::vector<Axis>& ax, const std::vector<std::size_t>& idx,
                             std::uint64_t index, std::uint64_t total, std::vector<Cell>& out) {
    const auto at = [&](const char* name) { return value_of(ax, idx, name); };
    switch (s.experiment) {
        case Experiment::SingleQubitNoise: {
            const NoiseParams np{*s.noise, at("p"), static_cast<std::int64_t>(at("n"))};
            if (!s.max_only) {
                out.emplace_back(ergotropy_closed(at_omega_t(at("omega_t")), np));
                return;
            }
            double best = 0.0;
            for (double wt : s.params.omega_t->values) {
                best = std::max(best, ergotropy_closed(at_omega_t(wt), np));
            }
            out.emplace_back(best);
            return;
        }
        case Experiment::TwoQubitNoiseless: {
            const auto p = model_at(ax, idx, s);
            out.emplace_back(std::string(to_string(classify_region(p))));
            out.emplace_back(energy_gap(p));
            out.emplace_back(ergotropy_two_closed(p, at("t")));
            return;
        }
        case Experiment::TwoQubitNoise: {
            const auto p = model_at(ax, idx, s);
            out.emplace_back(std::string(to_string(classify_region(p))));
            const auto rho = iterate_two(p, at("t"), *s.noise, at("p"), static_cast<std::int64_t>(at("n")));
            out.emplace_back(ergotropy_spectral(two_qubit_hamiltonian(p), rho));
            return;
        }
        case Experiment::RegionMap: {
            const auto p = model_at(ax, idx, s);
            const auto cv = critical_dmi(p);
            out.emplace_back(cv.d_c);
            out.emplace_back(cv.d_c_prime);
            out.emplace_back(std::string(to_string(classify_region(p))));
            out.emplace_back(energy_gap(p));
            return;
        }
        case Experiment::AsymptoticMap: {
            const auto p = model_at(ax, idx, s);
            const auto cv = critical_dmi(p);
            out.emplace_back(cv.d_c);
            out.emplace_back(cv.d_c_prime);
            out.emplace_back(std::string(to_string(classify_region(p))));
            out.emplace_back(bf_asymptotic_coherence(p));
            out.emplace_back(*s.noise == NoiseKind::AmplitudeDamping ? asymptotic_ergotropy_ad(p)
                                                                     : asymptotic_ergotropy_bf(p));
            if (s.brute) {
                if (index % brute_stride(total) == 0) {
                    const auto rho = iterate_two(p, s.params.t->values.front(), *s.noise, s.params.p->values.front(),
                                                 static_cast<std::int64_t>(s.params.n->values.front()));
                    out.emplace_back(ergotropy_spectral(two_qubit_hamiltonian(p), rho));
                } else {
                    out.emplace_back(kNaN);
                }
            }
            return;
        }
        case Experiment::DiagonalDistribution: {
            const auto p = model_at(ax, idx, s);
            const auto d0 = diagonal_of(charged_state_two(p, at("t")).mat());
            const auto d = diag_recursion_two(*s.noise, at("p"), d0, static_cast<std::int64_t>(at("n")));
            for (double x : d) out.emplace_back(x);
            return;
        }
        case Experiment::Verify:
            return;
    }
}

inline ResultRow evaluate_point(const SweepSpec& s, const std::vector<Axis>& ax, const std::vector<Column>& cols,
                                std::uint64_t index, std::uint64_t total) {
    std::vector<std::size_t> idx(ax.size());
    std::uint64_t rem = index;
    for (std::size_t k = ax.size(); k-- > 0;) {
        idx[k] = static_cast<std::size_t>(rem % ax[k].grid->size());
        rem /= ax[k].grid->size();
    }
    ResultRow row;
    row.values.reserve(cols.size());
    if (cols.front().name == "noise") row.values.emplace_back(std::string(to_string(*s.noise)));
    for (std::size_t k = 0; k < ax.size(); ++k) {
        const double v = ax[k].grid->values[idx[k]];
        if (ax[k].name == "n") {
            row.values.emplace_back(static_cast<std::int64_t>(v));
        } else {
            row.values.emplace_back(v);
        }
    }
    const std::size_t prefix = row.values.size();
    try {
        evaluate_outputs(s, ax, idx, index, total, row.values);
        row.values.emplace_back(std::string{});
    } catch (const std::exception& e) {
        // error record: every output is NaN (region empty), message kept
        row.values.resize(prefix);
        for (std::size_t c = prefix; c + 1 < cols.size(); ++c) {
            if (cols[c].type == ColumnType::Text) {
                row.values.emplace_back(std::string{});
            } else {
                row.values.emplace_back(kNaN);
            }
        }
        row.values.emplace_back(std::string(e.what()));
    }
    return row;
}
}  // namespace detail

inline unsigned effective_workers(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

using RowSink = std::function<void(const ResultRow&)>;

inline constexpr std::uint64_t kSweepChunk = 8192;

// Evaluates the grid in chunks; rows within a chunk are computed in
// parallel and handed to the sink in grid order. Returns the number of
// rows that carry an error record.
inline std::uint64_t run_sweep(const SweepSpec& spec, const RowSink& sink) {
    if (spec.experiment == Experiment::Verify) {
        throw SpecError("run.experiment", "verify is not a grid sweep");
    }
    const SweepSpec s = resolve(spec);
    const auto ax = axes(s);
    const auto cols = columns(s);
    const std::uint64_t total = point_count(ax);
    const unsigned workers = effective_workers(s.workers);
    std::uint64_t errors = 0;

    std::vector<ResultRow> chunk;
    for (std::uint64_t begin = 0; begin < total; begin += kSweepChunk) {
        const std::uint64_t end = std::min(total, begin + kSweepChunk);
        chunk.assign(end - begin, ResultRow{});
        std::atomic<std::uint64_t> next{begin};
        const auto work = [&] {
            for (std::uint64_t i = next++; i < end; i = next++) {
                chunk[i - begin] = detail::evaluate_point(s, ax, cols, i, total);
            }
        };
        const unsigned n_threads =
            static_cast<unsigned>(std::min<std::uint64_t>(workers, end - begin));
        if (n_threads <= 1) {
            work();
        } else {
            std::vector<std::jthread> pool;
            pool.reserve(n_threads);
            for (unsigned w = 0; w < n_threads; ++w) pool.emplace_back(work);
        }
        for (const auto& row : chunk) {
            if (!std::get<std::string>(row.values.back()).empty()) ++errors;
            sink(row);
        }
    }
    return errors;
}

inline std::vector<ResultRow> collect_sweep(const SweepSpec& spec) {
    std::vector<ResultRow> rows;
    run_sweep(spec, [&](const ResultRow& r) { rows.push_back(r); });
    return rows;
}

}  // namespace qbattery
