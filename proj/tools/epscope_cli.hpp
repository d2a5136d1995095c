#pragma once

// Command-line front end: turns a RunConfig into one table and writes it as CSV or JSON.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "epscope/epscope.hpp"

namespace epscope::cli {

using json = nlohmann::ordered_json;

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_numeric = 3;

/// Bad flags, unreadable fixtures, unwritable outputs.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// min:max:count, endpoints included.
struct Grid {
    double min = 0.0;
    double max = 0.0;
    int count = 1;

    [[nodiscard]] std::vector<double> values() const {
        std::vector<double> v(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i)
            v[static_cast<std::size_t>(i)] = count == 1 ? min : min + (max - min) * i / (count - 1);
        if (count > 1) v.back() = max;
        return v;
    }
    [[nodiscard]] bool is_scalar() const { return count == 1 && min == max; }
};

inline Grid parse_grid(const std::string& text) {
    auto number = [&](const std::string& s) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
            throw ConfigError("not a number: '" + s + "'");
        return v;
    };
    const auto first = text.find(':');
    if (first == std::string::npos) {
        const double v = number(text);
        return {v, v, 1};
    }
    const auto second = text.find(':', first + 1);
    if (second == std::string::npos) throw ConfigError("grid must be min:max:count, got '" + text + "'");
    Grid g{number(text.substr(0, first)), number(text.substr(first + 1, second - first - 1)), 0};
    const std::string count = text.substr(second + 1);
    const auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), g.count);
    if (ec != std::errc() || ptr != count.data() + count.size()) throw ConfigError("bad grid count in '" + text + "'");
    if (g.count < 1) throw ConfigError("grid count must be >= 1");
    if (g.min > g.max) throw ConfigError("grid min must not exceed max");
    return g;
}

inline std::string format_grid(const Grid& g) {
    std::ostringstream os;
    os.precision(17);
    if (g.is_scalar()) {
        os << g.min;
        return os.str();
    }
    os << g.min << ':' << g.max << ':' << g.count;
    return os.str();
}

enum class Format { Csv, Json };

struct RunConfig {
    std::string subcommand;
    double g = 0.67;
    double F = 0.5;
    Grid eps_d{0.0, 0.0, 1};
    bool eps_d_set = false;
    std::uint64_t nd = 1;
    std::uint64_t nc = 1;
    double delta = 0.05;
    int steps = 400;
    int loops = 1;
    std::string side = "plus";
    std::optional<double> center;  // contour center (real); defaults to the EP center
    double radius = 0.05;
    std::string sheet = "II";
    int points = 2048;
    int order = 8;
    int x_max = 10;
    std::vector<int> sites{250, 500, 1000, 2000};
    Format format = Format::Csv;
    std::string output;  // empty: stdout
};

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"spectrum", "ep",          "puiseux", "winding", "encircle",
                                                "count",    "wroots",      "correlation", "qpt", "oracle"};
    return names;
}

inline json to_json(const RunConfig& c) {
    json j;
    j["subcommand"] = c.subcommand;
    j["g"] = c.g;
    j["F"] = c.F;
    if (c.eps_d_set) j["eps_d"] = format_grid(c.eps_d);
    j["nd"] = c.nd;
    j["nc"] = c.nc;
    j["delta"] = c.delta;
    j["steps"] = c.steps;
    j["loops"] = c.loops;
    j["side"] = c.side;
    if (c.center) j["center"] = *c.center;
    j["radius"] = c.radius;
    j["sheet"] = c.sheet;
    j["points"] = c.points;
    j["order"] = c.order;
    j["x_max"] = c.x_max;
    j["sites"] = c.sites;
    j["format"] = c.format == Format::Csv ? "csv" : "json";
    return j;
}

inline RunConfig config_from_json(const json& doc) {
    const json& j = doc.contains("config") ? doc.at("config") : doc;
    RunConfig c;
    try {
        c.subcommand = j.at("subcommand").get<std::string>();
        c.g = j.value("g", c.g);
        c.F = j.value("F", c.F);
        if (j.contains("eps_d")) {
            c.eps_d = parse_grid(j.at("eps_d").get<std::string>());
            c.eps_d_set = true;
        }
        c.nd = j.value("nd", c.nd);
        c.nc = j.value("nc", c.nc);
        c.delta = j.value("delta", c.delta);
        c.steps = j.value("steps", c.steps);
        c.loops = j.value("loops", c.loops);
        c.side = j.value("side", c.side);
        if (j.contains("center")) c.center = j.at("center").get<double>();
        c.radius = j.value("radius", c.radius);
        c.sheet = j.value("sheet", c.sheet);
        c.points = j.value("points", c.points);
        c.order = j.value("order", c.order);
        c.x_max = j.value("x_max", c.x_max);
        c.sites = j.value("sites", c.sites);
        c.format = j.value("format", std::string("csv")) == "json" ? Format::Json : Format::Csv;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config fixture: ") + e.what());
    }
    return c;
}

inline void validate(const RunConfig& c) {
    bool known = false;
    for (const auto& s : subcommands()) known = known || s == c.subcommand;
    if (!known) throw ConfigError("unknown subcommand '" + c.subcommand + "'");
    if (c.eps_d.count < 1 || c.eps_d.min > c.eps_d.max) throw ConfigError("invalid eps_d grid");
    if (c.side != "plus" && c.side != "minus") throw ConfigError("side must be plus or minus");
    if (c.sheet != "I" && c.sheet != "II") throw ConfigError("sheet must be I or II");
    if (c.steps < 1 || c.points < 1 || c.order < 1 || c.loops < 1 || c.x_max < 0)
        throw ConfigError("steps, points, order and loops must be positive");
    const bool needs_scalar = c.subcommand == "winding" || c.subcommand == "wroots" ||
                              c.subcommand == "correlation" || c.subcommand == "oracle";
    if (needs_scalar && c.eps_d_set && !c.eps_d.is_scalar())
        throw ConfigError(c.subcommand + " takes a single eps_d value");
    if ((c.subcommand == "spectrum" || c.subcommand == "qpt") && !c.eps_d_set)
        throw ConfigError(c.subcommand + " needs --eps-d min:max:count");
}

/// One output cell: empty (failed computation), number, integer or text.
using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    bool single_record = false;  // JSON output flattens the lone row into the document
};

inline Cell num(double v) { return std::isfinite(v) ? Cell{v} : Cell{}; }

namespace detail {

inline Branch side_of(const RunConfig& c) { return c.side == "plus" ? Branch::Plus : Branch::Minus; }
inline RiemannSheet sheet_of(const RunConfig& c) { return c.sheet == "I" ? RiemannSheet::First : RiemannSheet::Second; }
inline double scalar_eps(const RunConfig& c, double fallback) { return c.eps_d_set ? c.eps_d.min : fallback; }

inline Table run_spectrum(const RunConfig& c, unsigned threads) {
    Table t;
    t.columns = {"eps_d",      "re_z_minus", "im_z_minus",  "re_z_plus",  "im_z_plus",   "re_k_minus", "im_k_minus",
                 "re_k_plus",  "im_k_plus",  "label_minus", "label_plus", "sheet_minus", "sheet_plus", "status"};
    const auto grid = c.eps_d.values();
    for (const auto& row : sweep(c.g, grid, threads)) {
        std::vector<Cell> r{row.eps_d};
        if (row.points) {
            const auto& [m, p] = *row.points;
            for (const double v : {m.z.real(), m.z.imag(), p.z.real(), p.z.imag(), m.k.real(), m.k.imag(), p.k.real(),
                                   p.k.imag()})
                r.push_back(num(v));
            r.insert(r.end(), {std::string(to_string(m.label)), std::string(to_string(p.label)),
                               std::string(to_string(m.sheet)), std::string(to_string(p.sheet)), std::string("ok")});
        } else {
            r.resize(t.columns.size() - 1);
            r.push_back(std::string(to_string(*row.error)));
        }
        t.rows.push_back(std::move(r));
    }
    return t;
}

inline std::vector<Cell> ep_row(const char* method, const char* side, const EpRecord& r) {
    return {std::string(method),
            std::string(side),
            num(r.eps_bar.real()),
            num(r.eps_bar.imag()),
            num(r.z_center.real()),
            num(r.z_center.imag()),
            std::int64_t{r.period},
            std::string(to_string(r.sign_q)),
            std::string(to_string(r.sheet)),
            r.factor_id,
            num(r.residual)};
}

inline Table run_ep(const RunConfig& c) {
    Table t;
    t.columns = {"method", "side",  "re_eps_bar", "im_eps_bar", "re_z_center", "im_z_center",
                 "period", "sign_q", "sheet",     "factor",     "residual"};
    const ModelParams base{0.0, c.g, c.F};
    require_prototype(base);
    for (const Branch side : {Branch::Plus, Branch::Minus}) {
        const char* name = to_string(side);
        EpRecord closed = ep_record_closed_form(c.g, side);
        const double f1 = coupling_factor(c.g);
        const double radius = std::min(0.05, 0.5 * (std::abs(closed.z_center.real()) - 1.0));
        const auto w = winding_period(ContourSpec{closed.z_center, radius, RiemannSheet::Second, c.points},
                                      ModelParams{closed.eps_bar, c.g});
        closed.period = w.period;
        t.rows.push_back(ep_row("closed-form", name, closed));

        const double guess = (side == Branch::Plus ? 1.0 : -1.0) * (1.0 + std::sqrt(f1));
        EpRecord numeric = locate_ep_numeric(ChainSelfEnergy{c.g}, RiemannSheet::Second, guess);
        numeric.period = winding_period(ContourSpec{numeric.z_center, radius, numeric.sheet, c.points},
                                        ModelParams{numeric.eps_bar, c.g})
                             .period;
        t.rows.push_back(ep_row("newton", name, numeric));
    }
    return t;
}

inline Table run_puiseux(const RunConfig& c) {
    Table t;
    t.columns = {"l", "re_coefficient", "im_coefficient"};
    const auto s = puiseux_coefficients_prototype(side_of(c), c.g, c.order);
    t.rows.push_back({std::int64_t{0}, num(s.z_center.real()), num(s.z_center.imag())});
    for (std::size_t l = 0; l < s.beta.size(); ++l)
        t.rows.push_back({static_cast<std::int64_t>(l + 1), num(s.beta[l].real()), num(s.beta[l].imag())});
    return t;
}

inline Table run_winding(const RunConfig& c) {
    Table t;
    t.single_record = true;
    t.columns = {"period", "residual", "re_w", "im_w", "argument_count"};
    const auto eps = ep_locations_closed_form(c.g);
    const double eps_d = scalar_eps(c, (side_of(c) == Branch::Plus ? eps.plus : eps.minus).real());
    double center = 0.0;
    if (c.center) {
        center = *c.center;
    } else {
        const auto [cp, cm] = centers_closed_form(c.g);
        center = side_of(c) == Branch::Plus ? cp : cm;
    }
    const auto w = winding_period(ContourSpec{center, c.radius, sheet_of(c), c.points}, ModelParams{eps_d, c.g, c.F});
    t.rows.push_back({std::int64_t{w.period}, num(w.residual), num(w.quadrature.real()), num(w.quadrature.imag()),
                      std::int64_t{w.argument_count}});
    return t;
}

inline Table run_encircle(const RunConfig& c) {
    Table t;
    t.single_record = true;
    t.columns = {"permutation", "loops_to_identity"};
    const auto r = encircle_ep(c.g, c.delta, c.steps, c.loops, side_of(c));
    t.rows.push_back({std::string(to_string(r.permutation)), std::int64_t{r.loops_to_identity}});
    return t;
}

inline Table run_count(const RunConfig& c) {
    Table t;
    t.single_record = true;
    t.columns = {"n_solutions", "n_eps"};
    const SystemShape shape{c.nd, c.nc};
    t.rows.push_back({static_cast<std::int64_t>(n_solutions(shape)), static_cast<std::int64_t>(n_eps_open(shape))});
    return t;
}

inline Table run_wroots(const RunConfig& c) {
    Table t;
    t.columns = {"index", "degree", "re_w", "im_w", "re_z", "im_z"};
    const auto poly = w_polynomial(ModelParams{scalar_eps(c, 0.0), c.g, c.F});
    std::int64_t i = 0;
    for (const auto& r : w_roots(poly))
        t.rows.push_back({i++, std::int64_t{poly.degree}, num(r.w.real()), num(r.w.imag()), num(r.z.real()),
                          num(r.z.imag())});
    return t;
}

inline Table run_correlation(const RunConfig& c) {
    Table t;
    t.columns = {"x", "re_c", "im_c", "abs_c", "arg_c"};
    const ModelParams p{scalar_eps(c, 0.1), c.g, c.F};
    for (int x = 0; x <= c.x_max; ++x) {
        const complex v = correlation(x, p);
        t.rows.push_back({std::int64_t{x}, num(v.real()), num(v.imag()), num(std::abs(v)), num(std::arg(v))});
    }
    return t;
}

inline Table run_qpt(const RunConfig& c, unsigned threads) {
    Table t;
    t.columns = {"eps_d", "gamma", "gap", "phi_res", "xi_inv", "side", "status"};
    const auto grid = c.eps_d.values();
    t.rows = parallel_map(
        grid.size(),
        [&](std::size_t i) {
            std::vector<Cell> r{grid[i]};
            try {
                const auto o = observables(ModelParams{grid[i], c.g, c.F});
                r.push_back(num(o.gamma));
                r.push_back(o.gap ? num(*o.gap) : Cell{});
                // xi^{-1} is phi_res by definition; both columns are kept for the figure mapping
                r.push_back(o.xi_inverse ? num(*o.xi_inverse) : Cell{});
                r.push_back(o.xi_inverse ? num(*o.xi_inverse) : Cell{});
                r.push_back(std::string(to_string(o.side)));
                r.push_back(std::string("ok"));
            } catch (const Error& e) {
                r.resize(6);
                r.push_back(std::string(to_string(e.kind())));
            }
            return r;
        },
        threads);
    return t;
}

inline Table run_oracle(const RunConfig& c) {
    Table t;
    t.columns = {"n_sites", "top_eigenvalue", "closed_form", "abs_error"};
    const ModelParams p{scalar_eps(c, 1.0), c.g, c.F};
    const auto pts = spectrum(p);
    double closed = -std::numeric_limits<double>::infinity();
    for (const auto& s : pts)
        if (s.label == StateLabel::Bound && s.z.real() > closed) closed = s.z.real();
    for (const int n : c.sites) {
        if (n < 2) throw ConfigError("oracle sites must be >= 2");
        const double top = largest_eigenvalue(finite_chain_matrix(static_cast<std::size_t>(n), p));
        t.rows.push_back({std::int64_t{n}, num(top), num(closed), std::isfinite(closed) ? num(std::abs(top - closed)) : Cell{}});
    }
    return t;
}

}  // namespace detail

/// Computes the table for a validated config. Library failures propagate as epscope::Error.
inline Table run(const RunConfig& c, unsigned threads = 1) {
    validate(c);
    if (c.subcommand == "spectrum") return detail::run_spectrum(c, threads);
    if (c.subcommand == "ep") return detail::run_ep(c);
    if (c.subcommand == "puiseux") return detail::run_puiseux(c);
    if (c.subcommand == "winding") return detail::run_winding(c);
    if (c.subcommand == "encircle") return detail::run_encircle(c);
    if (c.subcommand == "count") return detail::run_count(c);
    if (c.subcommand == "wroots") return detail::run_wroots(c);
    if (c.subcommand == "correlation") return detail::run_correlation(c);
    if (c.subcommand == "qpt") return detail::run_qpt(c, threads);
    return detail::run_oracle(c);
}

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
    if (v == 0.0) return "0";  // no "-0" in datasets
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline std::string write_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>)
                        out += format_double(v);
                    else if constexpr (std::is_same_v<T, std::int64_t>)
                        out += std::to_string(v);
                    else if constexpr (std::is_same_v<T, std::string>)
                        out += v;
                },
                row[i]);
        }
        out += '\n';
    }
    return out;
}

inline json cell_json(const Cell& c) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>)
                return nullptr;
            else
                return v;
        },
        c);
}

inline json table_json(const RunConfig& c, const Table& t) {
    json doc;
    doc["config"] = to_json(c);
    auto record = [&](const std::vector<Cell>& row) {
        json r = json::object();
        for (std::size_t i = 0; i < t.columns.size(); ++i) r[t.columns[i]] = cell_json(row[i]);
        return r;
    };
    if (t.single_record && t.rows.size() == 1) {
        const json flat = record(t.rows.front());
        for (const auto& [k, v] : flat.items()) doc[k] = v;
    } else {
        doc["columns"] = t.columns;
        doc["rows"] = json::array();
        for (const auto& row : t.rows) doc["rows"].push_back(record(row));
    }
    return doc;
}

inline std::string render(const RunConfig& c, const Table& t) {
    if (c.format == Format::Csv) return write_csv(t);
    return table_json(c, t).dump(2) + "\n";
}

inline unsigned threads_from_env(const char* value) {
    if (value == nullptr || *value == '\0') return 1;
    const std::string s(value);
    unsigned n = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc() || ptr != s.data() + s.size() || n == 0)
        throw ConfigError("EPSCOPE_THREADS must be a positive integer");
    return n;
}

/// Parses argv into a RunConfig. Returns nullopt when CLI11 handled the request
/// itself (--help); `exit_code` then holds the status to return.
inline std::optional<RunConfig> parse_args(int argc, const char* const* argv, int& exit_code) {
    CLI::App app{"epscope: exceptional points of the chain-with-impurity open quantum system"};
    app.require_subcommand(1);
    RunConfig c;
    std::string eps_text, format_text = "csv", config_path;
    std::optional<double> center;
    for (const auto& name : subcommands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--g", c.g, "impurity-chain coupling");
        sub->add_option("--F", c.F, "lower-right weight of the effective Hamiltonian");
        sub->add_option("--eps-d", eps_text, "impurity energy, value or min:max:count");
        sub->add_option("--nd", c.nd, "number of discrete sites");
        sub->add_option("--nc", c.nc, "number of continua");
        sub->add_option("--delta", c.delta, "encirclement radius in eps_d^2");
        sub->add_option("--steps", c.steps, "steps per loop");
        sub->add_option("--loops", c.loops, "number of loops");
        sub->add_option("--side", c.side, "EP side: plus or minus");
        sub->add_option("--center", center, "contour center (real)");
        sub->add_option("--radius", c.radius, "contour radius");
        sub->add_option("--sheet", c.sheet, "Riemann sheet: I or II");
        sub->add_option("--points", c.points, "contour quadrature points");
        sub->add_option("--order", c.order, "series order");
        sub->add_option("--x-max", c.x_max, "largest site for correlation output");
        sub->add_option("--sites", c.sites, "chain lengths for the finite-chain oracle")->delimiter(',');
        sub->add_option("--format", format_text, "csv or json");
        sub->add_option("-o,--output", c.output, "output file (default stdout)");
        sub->add_option("--config", config_path, "replay a JSON config or JSON output document");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        exit_code = app.exit(e);
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }
    c.subcommand = app.get_subcommands().front()->get_name();
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw IoError("cannot read config '" + config_path + "'");
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        RunConfig replay = config_from_json(doc);
        if (replay.subcommand != c.subcommand)
            throw ConfigError("config fixture is for '" + replay.subcommand + "', not '" + c.subcommand + "'");
        replay.output = c.output;
        return replay;
    }
    if (!eps_text.empty()) {
        c.eps_d = parse_grid(eps_text);
        c.eps_d_set = true;
    }
    c.center = center;
    if (format_text != "csv" && format_text != "json") throw ConfigError("format must be csv or json");
    c.format = format_text == "json" ? Format::Json : Format::Csv;
    return c;
}

inline void emit_error(std::ostream& err, std::string_view kind, std::string_view message) {
    err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

/// Entire CLI behind main(): parse, run, write. Returns the process exit status.
inline int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
                      const char* threads_env) {
    try {
        int code = exit_ok;
        const auto config = parse_args(argc, argv, code);
        if (!config) return code;
        const unsigned threads = threads_from_env(threads_env);
        const Table table = run(*config, threads);
        const std::string text = render(*config, table);
        if (config->output.empty()) {
            out << text;
        } else {
            std::ofstream file(config->output, std::ios::binary);
            if (!file) throw IoError("cannot open '" + config->output + "' for writing");
            file << text;
            if (!file) throw IoError("failed writing '" + config->output + "'");
        }
        return exit_ok;
    } catch (const ConfigError& e) {
        emit_error(err, "ConfigError", e.what());
        return exit_config;
    } catch (const IoError& e) {
        emit_error(err, "IoError", e.what());
        return exit_config;
    } catch (const Error& e) {
        emit_error(err, to_string(e.kind()), e.what());
        return exit_numeric;
    }
}

}  // namespace epscope::cli
