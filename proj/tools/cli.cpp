#include "cli.hpp"

#include "chowla/error.hpp"
#include "chowla/stats.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <unistd.h>

namespace chowla::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

/// Raised for bad flag values discovered after CLI11 has parsed them.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Formatting

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_complex(Complex z)
{
    std::string out = format_double(z.real());
    const double im = z.imag();
    if (std::signbit(im))
        out += "-" + format_double(-im) + "i";
    else
        out += "+" + format_double(im) + "i";
    return out;
}

json json_double(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

using Cell = std::variant<std::monostate, bool, std::int64_t, std::uint64_t, double, std::string, Complex>;

std::string cell_csv(const Cell& c)
{
    struct Visitor {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(std::uint64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(Complex z) const { return format_complex(z); }
    };
    return std::visit(Visitor{}, c);
}

json cell_json(const Cell& c)
{
    struct Visitor {
        json operator()(std::monostate) const { return nullptr; }
        json operator()(bool b) const { return b; }
        json operator()(std::int64_t v) const { return v; }
        json operator()(std::uint64_t v) const { return v; }
        json operator()(double v) const { return json_double(v); }
        json operator()(const std::string& s) const { return s; }
        json operator()(Complex z) const { return json{{"re", json_double(z.real())}, {"im", json_double(z.imag())}}; }
    };
    return std::visit(Visitor{}, c);
}

/// What a subcommand produces: scalar fields, an optional table and a summary.
struct Result {
    std::string command;
    json config = json::object();
    std::vector<std::pair<std::string, Cell>> fields;
    json extra = json::object(); // JSON-only structured fields
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::string summary;

    void field(std::string key, Cell value) { fields.emplace_back(std::move(key), std::move(value)); }
};

std::string render_csv(const Result& r)
{
    std::ostringstream os;
    os << "# chowla " << kVersion << "\n";
    os << "# command: " << r.command << "\n";
    for (const auto& [key, value] : r.config.items())
        os << "# config." << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
    for (const auto& [key, value] : r.fields) os << "# " << key << ": " << cell_csv(value) << "\n";
    for (const auto& [key, value] : r.extra.items()) os << "# " << key << ": " << value.dump() << "\n";
    if (!r.columns.empty()) {
        for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i];
        os << "\n";
        for (const auto& row : r.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_csv(row[i]);
            os << "\n";
        }
    }
    return os.str();
}

std::string render_json(const Result& r)
{
    json doc;
    doc["meta"] = {{"artifact", "chowla"}, {"version", kVersion}, {"command", r.command}, {"config", r.config}};
    for (const auto& [key, value] : r.fields) doc[key] = cell_json(value);
    for (const auto& [key, value] : r.extra.items()) doc[key] = value;
    if (!r.columns.empty()) {
        json rows = json::array();
        for (const auto& row : r.rows) {
            json obj = json::object();
            for (std::size_t i = 0; i < row.size(); ++i) obj[r.columns[i]] = cell_json(row[i]);
            rows.push_back(std::move(obj));
        }
        doc["rows"] = std::move(rows);
    }
    return doc.dump(2) + "\n";
}

void write_atomically(const std::filesystem::path& path, const std::string& content)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open " + tmp.string() + " for writing");
        os << content;
        os.flush();
        if (!os) throw Error("failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot move output into place at " + path.string() + ": " + ec.message());
    }
}

// ---------------------------------------------------------------------------
// Parsing helpers

u64 to_count(double v, const std::string& flag)
{
    if (!(v >= 0.0) || v > 1.8e19 || v != std::floor(v))
        throw UsageError(flag + ": expected a non-negative integer, got " + format_double(v));
    return static_cast<u64>(v);
}

Complex parse_complex(const std::string& text)
{
    static const std::regex number(R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*$)");
    static const std::regex imaginary(R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)\s*i\s*$)");
    static const std::regex full(
        R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*([+-])\s*((?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)\s*i\s*$)");
    auto coefficient = [](const std::string& s) {
        if (s.empty() || s == "+") return 1.0;
        if (s == "-") return -1.0;
        return std::stod(s);
    };
    std::smatch m;
    if (std::regex_match(text, m, number)) return {std::stod(m[1]), 0.0};
    if (std::regex_match(text, m, imaginary)) return {0.0, coefficient(m[1])};
    if (std::regex_match(text, m, full)) {
        const double im = coefficient(m[3]);
        return {std::stod(m[1]), m[2] == "-" ? -im : im};
    }
    throw UsageError("--z: cannot parse complex number '" + text + "' (expected a+bi)");
}

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(text);
    while (std::getline(is, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<double> parse_grid(const std::string& text, const std::string& flag)
{
    const auto parts = split(text, ':');
    try {
        if (parts.size() == 1) return {std::stod(parts[0])};
        if (parts.size() == 3) {
            const double a = std::stod(parts[0]), b = std::stod(parts[1]), step = std::stod(parts[2]);
            if (!(step > 0.0) || b < a) throw UsageError(flag + ": expected A:B:STEP with A <= B and STEP > 0");
            std::vector<double> grid;
            for (u64 i = 0;; ++i) {
                const double t = a + static_cast<double>(i) * step;
                if (t > b + 1e-9 * std::max(1.0, std::fabs(b))) break;
                grid.push_back(t);
                if (grid.size() > 100000) throw UsageError(flag + ": grid too long");
            }
            return grid;
        }
    } catch (const std::invalid_argument&) {
    }
    throw UsageError(flag + ": expected T or A:B:STEP, got '" + text + "'");
}

std::vector<u64> parse_u64_list(const std::string& text, const std::string& flag)
{
    std::vector<u64> out;
    for (const std::string& part : split(text, ',')) {
        try {
            out.push_back(to_count(std::stod(part), flag));
        } catch (const std::invalid_argument&) {
            throw UsageError(flag + ": cannot parse '" + part + "'");
        }
    }
    if (out.empty()) throw UsageError(flag + ": empty list");
    return out;
}

// ---------------------------------------------------------------------------
// Subcommands

struct Globals {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string format = "csv";
    std::string output;
};

unsigned default_threads()
{
    if (const char* env = std::getenv("CHOWLA_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    return 1;
}

Result cmd_enumerate(double x)
{
    Result r;
    r.command = "enumerate";
    r.config["x"] = x;
    if (!(x >= 5.0)) throw UsageError("--x: must be >= 5");
    r.columns = {"m", "d"};
    FamilyStream stream(x);
    while (auto f = stream.next()) r.rows.push_back({Cell{f->m}, Cell{f->d}});
    r.field("count", static_cast<u64>(r.rows.size()));
    r.summary = "enumerate: " + std::to_string(r.rows.size()) + " members with d <= " + format_double(x);
    return r;
}

Result cmd_lvalue(u64 d, const std::string& mode_text, double target, double y)
{
    Result r;
    r.command = "lvalue";
    r.config = {{"d", d}, {"mode", mode_text}, {"target", target}, {"y", y}};
    const LMode mode = parse_l_mode(mode_text);
    LValue l;
    switch (mode) {
    case LMode::rigorous: l = l_value_rigorous(d, target); break;
    case LMode::fast: l = l_value_fast(d, y > 0.0 ? y : default_fast_smoothing(d)); break;
    case LMode::exact: l = l_value_exact(d); break;
    }
    r.field("d", l.d);
    r.field("mode", std::string(to_string(l.mode)));
    r.field("value", l.value);
    r.field("abs_error_bound", l.abs_error_bound);
    r.field("terms", l.terms);
    r.summary = "L(1, chi_" + std::to_string(d) + ") = " + format_double(l.value) + " +- " +
                format_double(l.abs_error_bound) + " (" + std::string(to_string(l.mode)) + ")";
    return r;
}

Result cmd_classnum(u64 d)
{
    Result r;
    r.command = "classnum";
    r.config = {{"d", d}};
    const ClassNumberResult c = class_number(d);
    r.field("d", c.d);
    r.field("h_true", c.h_true);
    r.field("h_paper", c.h_paper);
    r.field("paper_canonical", c.paper_canonical);
    r.field("margin", c.margin);
    r.field("h_estimate", c.h_estimate);
    r.field("regulator", c.regulator);
    r.field("L", c.l.value);
    r.field("L_abs_error_bound", c.l.abs_error_bound);
    r.summary = "h(" + std::to_string(d) + ") = " + std::to_string(c.h_true) + " (paper normalization " +
                std::to_string(c.h_paper) + (c.paper_canonical ? "" : ", non-canonical") + ")";
    return r;
}

Result cmd_jacobsthal(u64 pmax)
{
    Result r;
    r.command = "jacobsthal";
    r.config = {{"pmax", pmax}};
    if (pmax < 3) throw UsageError("--pmax: must be >= 3");
    r.columns = {"p", "sum"};
    u64 failures = 0;
    for_each_prime_segment(3, pmax, [&](std::span<const u64> seg) {
        for (u64 p : seg) {
            const i64 s = jacobsthal_sum(p);
            failures += s != -1;
            r.rows.push_back({Cell{p}, Cell{s}});
        }
    });
    r.field("primes", static_cast<u64>(r.rows.size()));
    r.field("failures", failures);
    r.field("all_minus_one", failures == 0);
    r.summary = "jacobsthal: " + std::to_string(r.rows.size()) + " odd primes <= " + std::to_string(pmax) +
                ", " + std::to_string(failures) + " sums differ from -1";
    return r;
}

Result cmd_char_average(const std::string& m_text, double x)
{
    Result r;
    r.command = "char-average";
    r.config = {{"m", m_text}, {"x", x}};
    if (!(x >= 100.0)) throw UsageError("--x: must be >= 100");
    const std::vector<u64> ms = parse_u64_list(m_text, "--m");
    const std::vector<FamilyDiscriminant> members = enumerate(x);
    r.columns = {"m", "n", "empirical", "model", "stderr", "z_score"};
    double worst = 0.0;
    for (u64 m : ms) {
        if (m == 0) throw UsageError("--m: values must be >= 1");
        const CharAverage a = char_average(m, members, x);
        const double z = a.stderr_ > 0.0 ? (a.empirical - a.model) / a.stderr_ : 0.0;
        worst = std::max(worst, std::fabs(z));
        r.rows.push_back({Cell{a.m}, Cell{a.n_discriminants}, Cell{a.empirical}, Cell{a.model},
                          Cell{a.stderr_}, Cell{z}});
    }
    r.field("n_discriminants", static_cast<u64>(members.size()));
    r.summary = "char-average: " + std::to_string(ms.size()) + " moduli over " + std::to_string(members.size()) +
                " members, max |z| = " + format_double(worst);
    return r;
}

BulkOptions bulk_options(const std::string& mode_text, unsigned threads)
{
    BulkOptions b;
    b.mode = parse_l_mode(mode_text);
    b.threads = threads;
    return b;
}

Result cmd_moments(double x, const std::string& z_text, const std::string& mode_text, unsigned threads)
{
    Result r;
    r.command = "moments";
    r.config = {{"x", x}, {"z", z_text}, {"mode", mode_text}};
    if (!(x >= 5.0)) throw UsageError("--x: must be >= 5");
    std::vector<Complex> zs;
    for (const std::string& part : split(z_text, ',')) zs.push_back(parse_complex(part));
    if (zs.empty()) throw UsageError("--z: empty list");
    for (Complex z : zs) {
        try {
            check_moment_domain(z);
        } catch (const DomainError& e) {
            throw UsageError(std::string("--z: ") + e.what());
        }
    }
    const BulkOptions bulk = bulk_options(mode_text, threads);
    const std::vector<FamilyLRecord> records = family_l_values(x, bulk);
    const RandomModel model(RandomModel::kDefaultPrimeLimit, threads);
    r.columns = {"z", "empirical", "empirical_stderr", "model", "model_rel_error", "rel_diff"};
    double worst = 0.0;
    for (Complex z : zs) {
        const MomentEstimate m = moment_compare(z, records, x, model, bulk.mode);
        const double rel = std::abs(m.empirical - m.model) / std::abs(m.model);
        worst = std::max(worst, rel);
        r.rows.push_back({Cell{z}, Cell{m.empirical}, Cell{m.empirical_stderr}, Cell{m.model},
                          Cell{m.model_rel_error}, Cell{rel}});
    }
    r.field("n_discriminants", static_cast<u64>(records.size()));
    r.field("mode", std::string(to_string(bulk.mode)));
    r.summary = "moments: " + std::to_string(zs.size()) + " values of z over " + std::to_string(records.size()) +
                " members, max relative difference " + format_double(worst);
    return r;
}

void write_per_d(const std::string& path, const std::vector<FamilyLRecord>& records, double x)
{
    std::ostringstream os;
    os << "# chowla " << kVersion << "\n# command: tail per-d\n# config.x: " << format_double(x) << "\n";
    os << "m,d,L,L_abs_error,h\n";
    for (const FamilyLRecord& rec : records)
        os << rec.m << "," << rec.d << "," << format_double(rec.L) << "," << format_double(rec.abs_error) << ","
           << rec.h << "\n";
    write_atomically(path, os.str());
}

Result cmd_tail(double x, const std::string& grid_text, double samples, const std::string& mode_text,
                const std::string& per_d, const Globals& g)
{
    Result r;
    r.command = "tail";
    const u64 n_samples = to_count(samples, "--samples");
    r.config = {{"x", x}, {"tau", grid_text}, {"samples", n_samples}, {"seed", g.seed}, {"mode", mode_text}};
    if (!(x >= 5.0)) throw UsageError("--x: must be >= 5");
    const std::vector<double> grid = parse_grid(grid_text, "--tau");
    for (double t : grid)
        if (!(t >= 1.0 && t <= 3.0)) throw UsageError("--tau: grid must lie in [1, 3]");
    const BulkOptions bulk = bulk_options(mode_text, g.threads);
    const std::vector<FamilyLRecord> records = family_l_values(x, bulk);
    const RandomModel model(RandomModel::kDefaultPrimeLimit, g.threads);
    TailOptions opts;
    opts.mc_samples = n_samples;
    opts.seed = g.seed;
    opts.threads = g.threads;
    const TailReport t = tail_report(records, x, grid, model, opts);
    if (!per_d.empty()) write_per_d(per_d, records, x);

    r.columns = {"tau", "upper_count", "empirical_upper", "phi", "mc_upper", "reference_upper",
                 "expected_upper_count", "ratio_upper", "lower_count", "empirical_lower", "psi",
                 "mc_lower", "reference_lower", "expected_lower_count", "ratio_lower", "advisory"};
    const bool mc = n_samples > 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double ru = t.reference_upper[i] > 0.0 ? t.empirical_upper[i] / t.reference_upper[i] : NAN;
        const double rl = t.reference_lower[i] > 0.0 ? t.empirical_lower[i] / t.reference_lower[i] : NAN;
        r.rows.push_back({Cell{t.tau[i]}, Cell{t.upper_counts[i]}, Cell{t.empirical_upper[i]}, Cell{t.model_phi[i]},
                          mc ? Cell{t.mc_upper[i]} : Cell{}, Cell{t.reference_upper[i]},
                          Cell{t.expected_upper_count[i]}, Cell{ru}, Cell{t.lower_counts[i]},
                          Cell{t.empirical_lower[i]}, Cell{t.model_psi[i]}, mc ? Cell{t.mc_lower[i]} : Cell{},
                          Cell{t.reference_lower[i]}, Cell{t.expected_lower_count[i]}, Cell{rl},
                          Cell{static_cast<bool>(t.saddle_advisory[i])}});
    }
    r.field("n_discriminants", t.n_discriminants);
    r.field("mode", std::string(to_string(bulk.mode)));
    r.summary = "tail: " + std::to_string(grid.size()) + " tau values over " + std::to_string(t.n_discriminants) +
                " members";
    return r;
}

Result cmd_saddle(double tau, const Globals& g)
{
    Result r;
    r.command = "saddle";
    r.config = {{"tau", tau}};
    if (!(tau >= 1.0)) throw UsageError("--tau: must be >= 1");
    const RandomModel model(RandomModel::kDefaultPrimeLimit, g.threads);
    const SaddleResult s = solve_saddle(model, tau);
    r.field("tau", s.tau);
    r.field("kappa", s.kappa);
    r.field("phi", s.phi);
    r.field("psi", s.psi);
    r.field("C0", C0());
    r.field("log_phi", s.log_phi);
    r.field("log_psi", s.log_psi);
    r.field("L_at", s.L_at);
    r.field("L2_at", s.L2_at);
    r.field("kappa_lower", s.kappa_lower);
    r.field("L_at_lower", s.L_at_lower);
    r.field("L2_at_lower", s.L2_at_lower);
    r.field("rel_error_indicator", s.rel_error_indicator);
    r.field("iterations", static_cast<std::int64_t>(s.iterations));
    r.field("advisory", s.advisory);
    r.field("phi_asymptotic", phi_asymptotic(tau));
    r.summary = "saddle: tau = " + format_double(tau) + ", kappa = " + format_double(s.kappa) +
                ", phi = " + format_double(s.phi) + ", psi = " + format_double(s.psi);
    return r;
}

Result cmd_model_tail(const std::string& grid_text, double samples, const Globals& g)
{
    Result r;
    r.command = "model-tail";
    const u64 n = to_count(samples, "--samples");
    r.config = {{"tau", grid_text}, {"samples", n}, {"seed", g.seed}};
    if (n == 0) throw UsageError("--samples: must be >= 1");
    const std::vector<double> grid = parse_grid(grid_text, "--tau");
    for (double t : grid)
        if (!(t >= 1.0)) throw UsageError("--tau: values must be >= 1");
    const RandomModel model(RandomModel::kDefaultPrimeLimit, g.threads);
    const EulerProductSampler sampler(g.seed);
    const MonteCarloTails mc = monte_carlo_tails(sampler, n, grid, g.threads);
    r.columns = {"tau", "upper_hits", "mc_upper", "phi", "ratio_upper", "lower_hits", "mc_lower", "psi",
                 "ratio_lower", "rel_error_indicator", "advisory"};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const SaddleResult s = solve_saddle(model, grid[i]);
        r.rows.push_back({Cell{grid[i]}, Cell{mc.upper_hits[i]}, Cell{mc.upper(i)}, Cell{s.phi},
                          Cell{s.phi > 0.0 ? mc.upper(i) / s.phi : NAN}, Cell{mc.lower_hits[i]},
                          Cell{mc.lower(i)}, Cell{s.psi}, Cell{s.psi > 0.0 ? mc.lower(i) / s.psi : NAN},
                          Cell{s.rel_error_indicator}, Cell{s.advisory}});
    }
    r.field("samples", n);
    r.field("mean", mc.mean);
    r.field("mean_stderr", mc.mean_stderr);
    r.field("model_mean", std::exp(model.script_L(1.0).value.real()));
    r.field("residual_bias_bound", sampler.residual_bias_bound());
    r.summary = "model-tail: " + std::to_string(n) + " samples, " + std::to_string(grid.size()) + " tau values";
    return r;
}

Result cmd_constants(double bound)
{
    Result r;
    r.command = "constants";
    const u64 P = to_count(bound, "--density-prime-bound");
    r.config = {{"density_prime_bound", P}};
    if (P < 1000) throw UsageError("--density-prime-bound: must be >= 1000");
    const Constants c = compute_constants(P);
    r.columns = {"name", "value", "error_bound"};
    r.rows = {
        {Cell{std::string("euler_gamma")}, Cell{c.euler_gamma}, Cell{0.0}},
        {Cell{std::string("zeta2")}, Cell{c.zeta2}, Cell{0.0}},
        {Cell{std::string("C0")}, Cell{c.C0.value}, Cell{c.C0.error}},
        {Cell{std::string("catalan_G")}, Cell{c.catalan_G.value}, Cell{c.catalan_G.error}},
        {Cell{std::string("density_constant")}, Cell{c.density_constant.value}, Cell{c.density_constant.error}},
        {Cell{std::string("C1")}, Cell{c.C1.value}, Cell{c.C1.error}},
    };
    r.summary = "constants: C0 = " + format_double(c.C0.value) + ", G = " + format_double(c.catalan_G.value);
    return r;
}

Result cmd_count(double H_value, const std::string& norm_text, const std::string& mode_text,
                 const std::string& trajectory_text, const Globals& g)
{
    Result r;
    r.command = "count";
    const u64 H = to_count(H_value, "--H");
    r.config = {{"H", H}, {"normalization", norm_text}, {"mode", mode_text}, {"trajectory", trajectory_text}, {"seed", g.seed}};
    if (H < 1 || H > 500) throw UsageError("--H: must lie in [1, 500]");
    ClassCountOptions opts;
    opts.mode = parse_l_mode(mode_text);
    if (opts.mode == LMode::fast) throw UsageError("--mode: class counting needs exact or rigorous");
    opts.threads = g.threads;
    opts.seed = g.seed;
    if (!trajectory_text.empty()) opts.trajectory = parse_u64_list(trajectory_text, "--trajectory");
    for (u64 t : opts.trajectory)
        if (t < 1 || t > 500) throw UsageError("--trajectory: values must lie in [1, 500]");
    const ClassCountReport c = class_count_report(H, parse_normalization(norm_text), opts);

    r.field("H", c.H);
    r.field("normalization", std::string(to_string(c.normalization)));
    r.field("total", c.total);
    r.field("threshold_total", c.threshold_total);
    r.field("predicted", c.predicted);
    r.field("ratio", c.ratio);
    r.field("refined", c.refined);
    r.field("catalan_G", c.catalan_G);
    r.field("members_scanned", c.members_scanned);
    r.field("last_d", c.last_d);
    r.field("d_cutoff", c.d_cutoff);
    r.field("l_floor_violations", static_cast<u64>(c.l_floor_violations.size()));
    json histogram = json::object();
    for (const auto& [h, count] : c.histogram) histogram[std::to_string(h)] = count;
    r.extra["histogram"] = histogram;
    json trajectory = json::array();
    for (const ClassCountPoint& p : c.trajectory)
        trajectory.push_back({{"H", p.H}, {"total", p.total}, {"predicted", json_double(p.predicted)},
                              {"ratio", json_double(p.ratio)}, {"refined", json_double(p.refined)}});
    r.extra["trajectory"] = trajectory;
    json violations = json::array();
    for (const LFloorViolation& v : c.l_floor_violations) violations.push_back({{"d", v.d}, {"L", v.L}});
    r.extra["l_floor_violation_list"] = violations;
    r.summary = "count: H = " + std::to_string(H) + ", total = " + std::to_string(c.total) +
                ", predicted = " + format_double(c.predicted) + ", ratio = " + format_double(c.ratio);
    return r;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Class numbers, L-values and the random Euler product model for d = 4m^2+1", "chowla"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.set_version_flag("--version", kVersion);

    Globals g;
    g.threads = default_threads();
    app.add_option("--seed", g.seed, "Seed for Monte Carlo sampling")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads (default: CHOWLA_THREADS or 1)")
        ->check(CLI::Range(1u, 1024u));
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--output", g.output, "Write output to this file atomically");

    double x = 0.0, target = 1e-6, y = 0.0, samples = 1e7, pmax = 1e4, H = 0.0, density_bound = 3e8, tau = 0.0;
    double d_value = 0.0;
    std::string mode = "rigorous", bulk_mode = "exact", count_mode = "exact", normalization = "paper";
    std::string m_list, z_list, tau_grid, per_d, trajectory;

    auto* s_enum = app.add_subcommand("enumerate", "List family members d = 4m^2+1 <= x");
    s_enum->add_option("--x", x, "Upper bound for d")->required();

    auto* s_lval = app.add_subcommand("lvalue", "L(1, chi_d) for one discriminant");
    s_lval->add_option("--d", d_value, "Discriminant")->required();
    s_lval->add_option("--mode", mode, "rigorous | fast | exact")
        ->check(CLI::IsMember({"rigorous", "fast", "exact"}))->capture_default_str();
    s_lval->add_option("--target", target, "Error budget for rigorous mode")->capture_default_str();
    s_lval->add_option("--y", y, "Smoothing length for fast mode (default 1e4 log^2 d)");

    auto* s_cls = app.add_subcommand("classnum", "Class number of a family member");
    s_cls->add_option("--d", d_value, "Discriminant")->required();

    auto* s_jac = app.add_subcommand("jacobsthal", "Jacobsthal sums for odd primes up to pmax");
    s_jac->add_option("--pmax", pmax, "Largest prime")->capture_default_str();

    auto* s_chr = app.add_subcommand("char-average", "Average of chi_d(m) over the family");
    s_chr->add_option("--m", m_list, "Modulus or comma-separated list")->required();
    s_chr->add_option("--x", x, "Upper bound for d")->required();

    auto* s_mom = app.add_subcommand("moments", "Complex moments of L(1, chi_d) against the model");
    s_mom->add_option("--x", x, "Upper bound for d")->required();
    s_mom->add_option("--z", z_list, "Comma-separated exponents, a+bi syntax")->required();
    s_mom->add_option("--mode", bulk_mode, "L evaluation mode")
        ->check(CLI::IsMember({"rigorous", "fast", "exact"}))->capture_default_str();

    auto* s_tail = app.add_subcommand("tail", "Empirical tails of L(1, chi_d) against the model");
    s_tail->add_option("--x", x, "Upper bound for d")->required();
    s_tail->add_option("--tau", tau_grid, "T or A:B:STEP inside [1, 3]")->required();
    s_tail->add_option("--samples", samples, "Monte Carlo samples (0 disables)")->capture_default_str();
    s_tail->add_option("--mode", bulk_mode, "L evaluation mode")
        ->check(CLI::IsMember({"rigorous", "fast", "exact"}))->capture_default_str();
    s_tail->add_option("--per-d", per_d, "Also write m,d,L,h rows to this CSV file");

    auto* s_sad = app.add_subcommand("saddle", "Saddle point tail estimate");
    s_sad->add_option("--tau", tau, "tau >= 1")->required();

    auto* s_mt = app.add_subcommand("model-tail", "Monte Carlo tails of L(1, X) against the saddle point");
    s_mt->add_option("--tau", tau_grid, "T or A:B:STEP")->required();
    s_mt->add_option("--samples", samples, "Number of samples")->capture_default_str();

    auto* s_con = app.add_subcommand("constants", "Constants used by the model");
    s_con->add_option("--density-prime-bound", density_bound, "Prime bound for the density product")
        ->capture_default_str();

    auto* s_cnt = app.add_subcommand("count", "Counting function of class numbers up to H");
    s_cnt->add_option("--H", H, "Class number bound")->required();
    s_cnt->add_option("--normalization", normalization, "paper | classical")
        ->check(CLI::IsMember({"paper", "classical"}))->capture_default_str();
    s_cnt->add_option("--mode", count_mode, "exact | rigorous")
        ->check(CLI::IsMember({"exact", "rigorous"}))->capture_default_str();
    s_cnt->add_option("--trajectory", trajectory, "Comma-separated extra H values, e.g. 50,100,200,400");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        Result result;
        if (*s_enum) result = cmd_enumerate(x);
        else if (*s_lval) result = cmd_lvalue(to_count(d_value, "--d"), mode, target, y);
        else if (*s_cls) result = cmd_classnum(to_count(d_value, "--d"));
        else if (*s_jac) result = cmd_jacobsthal(to_count(pmax, "--pmax"));
        else if (*s_chr) result = cmd_char_average(m_list, x);
        else if (*s_mom) result = cmd_moments(x, z_list, bulk_mode, g.threads);
        else if (*s_tail) result = cmd_tail(x, tau_grid, samples, bulk_mode, per_d, g);
        else if (*s_sad) result = cmd_saddle(tau, g);
        else if (*s_mt) result = cmd_model_tail(tau_grid, samples, g);
        else if (*s_con) result = cmd_constants(density_bound);
        else if (*s_cnt) result = cmd_count(H, normalization, count_mode, trajectory, g);

        const std::string content = g.format == "json" ? render_json(result) : render_csv(result);
        if (g.output.empty()) {
            out << content;
        } else {
            write_atomically(g.output, content);
            out << result.summary << " -> " << g.output << "\n";
        }
        return 0;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int run(int argc, char** argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

} // namespace chowla::cli
