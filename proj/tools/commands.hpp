#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "oblique/oblique.hpp"

namespace oblique::cli {

struct ExperimentConfig {
    std::string command;
    std::vector<std::string> bcs{"dirichlet"};
    std::vector<std::string> schemes{"mxe"};
    std::size_t count = 6;
    std::size_t count_min = 0; // sweep range; 0 means "use count"
    std::size_t count_max = 0;
    std::vector<double> fractions{0.1};
    double length = std::numbers::pi;
    double nu = 0.1;
    double lambda = 1.0;
    std::size_t nodes = 1001;
    double time_step = 1e-3;
    double final_time = 4.5;
    std::vector<double> feed_on; // empty: whole run; otherwise {t0, t1}
    bool no_feedback = false;
    std::string reaction = "constant:-3.5";
    std::string initial = "linear:0.1";
    std::string function = "constant:1";
    std::string input;
    std::size_t samples = 1001;
    double a_bound = 0.0;
    std::size_t threads = 0;
    bool skip_infeasible = false;
    std::vector<double> snapshots;
    std::string snapshot_prefix = "snapshot";

    std::pair<std::size_t, std::size_t> count_range() const
    {
        if (count_max == 0) {
            return {count, count};
        }
        return {count_min == 0 ? 1 : count_min, count_max};
    }
};

namespace detail {

inline std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, sep)) {
        out.push_back(item);
    }
    return out;
}

inline double parse_real(const std::string& text, const std::string& what)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse " + what + " '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(v)) {
        throw std::invalid_argument("cannot parse " + what + " '" + text + "'");
    }
    return v;
}

/// Splits "name:arg" into {name, arg}.
inline std::pair<std::string, std::string> selector(const std::string& text)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        return {text, {}};
    }
    return {text.substr(0, colon), text.substr(colon + 1)};
}

/// Reads a numeric CSV, skipping '#' comments and any non-numeric header line.
inline std::vector<std::vector<double>> read_numeric_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open '" + path + "'");
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        std::vector<double> row;
        bool numeric = true;
        for (const auto& cell : split(line, ',')) {
            try {
                row.push_back(parse_real(cell, "CSV cell"));
            } catch (const std::invalid_argument&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue; // header
            }
            throw std::invalid_argument("non-numeric row in '" + path + "': " + line);
        }
        first = false;
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace detail

inline std::string describe(const ExperimentConfig& c)
{
    auto join = [](const auto& items) {
        std::ostringstream os;
        for (std::size_t i = 0; i < items.size(); ++i) {
            os << (i ? "," : "") << items[i];
        }
        return os.str();
    };
    std::vector<std::string> rs;
    for (double r : c.fractions) {
        rs.push_back(csv::real(r));
    }
    std::ostringstream os;
    const auto [lo, hi] = c.count_range();
    os << "oblique-stab " << c.command << " bc=" << join(c.bcs) << " scheme=" << join(c.schemes)
       << " M=" << lo << ':' << hi << " r=" << join(rs) << " L=" << csv::real(c.length);
    if (c.command == "simulate") {
        std::vector<std::string> fo;
        for (double t : c.feed_on) {
            fo.push_back(csv::real(t));
        }
        os << " nu=" << csv::real(c.nu) << " lambda=" << csv::real(c.lambda) << " N=" << c.nodes
           << " k=" << csv::real(c.time_step) << " T=" << csv::real(c.final_time)
           << " feed_on=" << (fo.empty() ? std::string("all") : join(fo))
           << " feedback=" << (c.no_feedback ? "off" : "on") << " reaction=" << c.reaction
           << " y0=" << c.initial;
    } else if (c.command == "suffcond") {
        os << " nu=" << csv::real(c.nu) << " a_bound=" << csv::real(c.a_bound);
    } else if (c.command == "project") {
        os << " function=" << (c.input.empty() ? c.function : "file:" + c.input)
           << " samples=" << c.samples;
    }
    return os.str();
}

// --- eigs ----------------------------------------------------------------------------

struct SlopeEstimate {
    BoundaryCondition bc;
    PlacementScheme scheme;
    double fraction;
    std::size_t from;
    std::size_t to;
    double slope;
};

struct EigsResult {
    std::vector<SweepRow> rows;
    std::vector<SlopeEstimate> slopes;
};

inline const std::vector<std::pair<std::size_t, std::size_t>>& slope_windows()
{
    static const std::vector<std::pair<std::size_t, std::size_t>> windows{
        {10, 20}, {50, 60}, {110, 120}};
    return windows;
}

/// Runs fn(i) for i in [0, n) on a pool of threads. Exceptions are rethrown
/// in index order so failures are reported deterministically.
inline void parallel_for(std::size_t n, std::size_t threads,
                         const std::function<void(std::size_t)>& fn)
{
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min(threads, std::max<std::size_t>(n, 1));
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += threads) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

inline EigsResult compute_eigs(const ExperimentConfig& cfg)
{
    struct Item {
        BoundaryCondition bc;
        PlacementScheme scheme;
        std::size_t count;
        double fraction;
    };
    const auto [lo, hi] = cfg.count_range();
    if (lo == 0 || hi < lo) {
        throw std::invalid_argument("empty M range");
    }
    std::vector<Item> items;
    for (const auto& b : cfg.bcs) {
        const BoundaryCondition bc = parse_boundary_condition(b);
        for (const auto& s : cfg.schemes) {
            const PlacementScheme scheme = parse_placement_scheme(s);
            if (scheme == PlacementScheme::Custom) {
                throw std::invalid_argument("eigs: custom placement is not supported in sweeps");
            }
            for (double r : cfg.fractions) {
                for (std::size_t m = lo; m <= hi; ++m) {
                    if (scheme == PlacementScheme::Uni && !uniform_placement_feasible(m, r)) {
                        if (cfg.skip_infeasible) {
                            continue;
                        }
                        std::ostringstream os;
                        os << "constraint M >= r/(1-r) violated for uni placement: M = " << m
                           << ", r/(1-r) = " << r / (1.0 - r);
                        throw ConstraintViolation(os.str());
                    }
                    items.push_back({bc, scheme, m, r});
                }
            }
        }
    }

    EigsResult result;
    result.rows.resize(items.size());
    parallel_for(items.size(), cfg.threads, [&](std::size_t i) {
        const Item& it = items[i];
        result.rows[i] = evaluate_configuration(it.bc, it.scheme, it.count, it.fraction, cfg.length);
    });

    // Rows are grouped by (bc, scheme, r) with M ascending inside each group.
    std::map<std::tuple<int, int, double>, std::map<std::size_t, double>> groups;
    std::vector<std::tuple<int, int, double>> order;
    for (const auto& row : result.rows) {
        const auto key = std::make_tuple(static_cast<int>(row.bc), static_cast<int>(row.scheme),
                                         row.fraction);
        if (!groups.count(key)) {
            order.push_back(key);
        }
        groups[key][row.count] = row.vartheta_numeric;
    }
    for (const auto& key : order) {
        const auto& series = groups[key];
        for (const auto& [a, b] : slope_windows()) {
            if (series.count(a) && series.count(b)) {
                result.slopes.push_back({static_cast<BoundaryCondition>(std::get<0>(key)),
                                         static_cast<PlacementScheme>(std::get<1>(key)),
                                         std::get<2>(key), a, b,
                                         (series.at(b) - series.at(a)) /
                                             static_cast<double>(b - a)});
            }
        }
    }
    return result;
}

inline void write_eigs(const ExperimentConfig& cfg, const EigsResult& result, std::ostream& os)
{
    csv::comment(os, describe(cfg));
    os << "bc,scheme,M,r,vartheta_numeric,vartheta_analytic,op_norm,limit,max_offdiag_theta\n";
    for (const auto& row : result.rows) {
        os << to_string(row.bc) << ',' << to_string(row.scheme) << ',' << row.count << ','
           << csv::real(row.fraction) << ',' << csv::real(row.vartheta_numeric) << ','
           << csv::real(row.vartheta_analytic) << ',' << csv::real(row.op_norm) << ','
           << csv::real(row.limit) << ',' << csv::real(row.max_offdiag_theta) << '\n';
    }
    for (const auto& s : result.slopes) {
        std::ostringstream line;
        line << "slope bc=" << to_string(s.bc) << " scheme=" << to_string(s.scheme)
             << " r=" << csv::real(s.fraction) << " window=" << s.from << ':' << s.to
             << " dvartheta_dM=" << csv::real(s.slope);
        csv::comment(os, line.str());
    }
}

inline void cmd_eigs(const ExperimentConfig& cfg, std::ostream& os)
{
    write_eigs(cfg, compute_eigs(cfg), os);
}

// --- norm ----------------------------------------------------------------------------

inline void cmd_norm(const ExperimentConfig& cfg, std::ostream& os)
{
    if (cfg.bcs.size() != 1 || cfg.schemes.size() != 1 || cfg.fractions.size() != 1) {
        throw std::invalid_argument("norm: expects a single bc, scheme and r");
    }
    const BoundaryCondition bc = parse_boundary_condition(cfg.bcs.front());
    const PlacementScheme scheme = parse_placement_scheme(cfg.schemes.front());
    const double r = cfg.fractions.front();
    const ActuatorSet set = place(Placement{scheme, {}}, cfg.length, cfg.count, r);
    const ProjectionData data = build_projection(bc, set);
    const auto diag = check_theta_diagonal(data);
    const auto analytic = analytic_vartheta(bc, scheme, cfg.count, r);

    csv::comment(os, describe(cfg));
    csv::comment(os, "actuators " + set.to_csv_line());
    os << "key,value\n";
    os << "vartheta_numeric," << csv::real(data.vartheta) << '\n';
    os << "vartheta_analytic," << csv::real(analytic) << '\n';
    os << "op_norm," << csv::real(data.op_norm) << '\n';
    os << "vartheta_limit," << csv::real(vartheta_limit(r)) << '\n';
    os << "norm_limit," << csv::real(norm_limit(r)) << '\n';
    os << "theta_diagonal," << (diag.is_diagonal ? 1 : 0) << '\n';
    os << "max_offdiag_theta," << csv::real(diag.max_offdiag) << '\n';
    os << "disjoint," << (set.disjoint() ? 1 : 0) << '\n';
    for (std::size_t i = 0; i < data.theta.rows(); ++i) {
        std::ostringstream line;
        line << "theta row " << i + 1 << ':';
        for (std::size_t k = 0; k < data.theta.cols(); ++k) {
            line << ' ' << csv::real(data.theta(i, k));
        }
        csv::comment(os, line.str());
    }
}

// --- project ---------------------------------------------------------------------------

struct ProjectResult {
    std::vector<double> xs;
    std::vector<double> values;
    std::vector<double> oblique;
    std::vector<double> orthogonal;
    std::vector<double> oblique_coefficients;    // normalised-actuator basis
    std::vector<double> orthogonal_coefficients; // normalised-actuator basis
    double oblique_residual;
    double orthogonal_residual;
};

/// Input function for `project`: a selector (constant:V, bump) or samples
/// x,f on a uniform grid over [0, L], linearly interpolated. Returns the
/// function and its known discontinuities.
inline std::pair<std::function<double(double)>, std::vector<double>> make_project_input(
    const ExperimentConfig& cfg)
{
    if (!cfg.input.empty()) {
        const auto rows = detail::read_numeric_csv(cfg.input);
        if (rows.size() < 2) {
            throw std::invalid_argument("project: input needs at least two samples");
        }
        std::vector<double> xs;
        std::vector<double> fs;
        for (const auto& row : rows) {
            if (row.size() != 2) {
                throw std::invalid_argument("project: input rows must be x,f");
            }
            xs.push_back(row[0]);
            fs.push_back(row[1]);
        }
        const double h = cfg.length / static_cast<double>(xs.size() - 1);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (std::abs(xs[i] - h * static_cast<double>(i)) > 1e-9 * cfg.length) {
                throw std::invalid_argument("project: samples must lie on a uniform grid over [0, L]");
            }
        }
        auto f = [fs, h](double x) {
            const double u = std::clamp(x / h, 0.0, static_cast<double>(fs.size() - 1));
            const auto i = std::min(static_cast<std::size_t>(u), fs.size() - 2);
            const double w = u - static_cast<double>(i);
            return (1.0 - w) * fs[i] + w * fs[i + 1];
        };
        return {f, {}};
    }
    const auto [name, arg] = detail::selector(cfg.function);
    if (name == "constant") {
        const double v = arg.empty() ? 1.0 : detail::parse_real(arg, "constant value");
        return {[v](double) { return v; }, {}};
    }
    if (name == "bump") {
        // 1_{(0,1/2)}(x) (x-1)(x-2)(x-3)
        return {[](double x) { return (x > 0.0 && x < 0.5) ? (x - 1.0) * (x - 2.0) * (x - 3.0) : 0.0; },
                {0.5}};
    }
    throw std::invalid_argument("project: unknown function selector '" + cfg.function + "'");
}

inline ProjectResult compute_project(const ExperimentConfig& cfg)
{
    if (cfg.bcs.size() != 1 || cfg.schemes.size() != 1 || cfg.fractions.size() != 1) {
        throw std::invalid_argument("project: expects a single bc, scheme and r");
    }
    if (cfg.samples < 2) {
        throw std::invalid_argument("project: need at least two output samples");
    }
    const BoundaryCondition bc = parse_boundary_condition(cfg.bcs.front());
    const PlacementScheme scheme = parse_placement_scheme(cfg.schemes.front());
    const ActuatorSet set = place(Placement{scheme, {}}, cfg.length, cfg.count, cfg.fractions.front());
    const ProjectionData data = build_projection(bc, set);
    const auto [f, jumps] = make_project_input(cfg);

    const ActuatorExpansion oblique = apply_projection(data, f, jumps);
    const ActuatorExpansion orthogonal = apply_orthogonal_projection(set, f, jumps);

    std::vector<double> bps = set.breakpoints();
    bps.insert(bps.end(), jumps.begin(), jumps.end());
    const double freq = spectral::frequency(bc, cfg.length, set.size());

    ProjectResult out;
    out.oblique_coefficients = oblique.coefficients;
    out.orthogonal_coefficients = orthogonal.coefficients;
    out.oblique_residual = l2_distance(f, oblique, cfg.length, bps, freq);
    out.orthogonal_residual = l2_distance(f, orthogonal, cfg.length, bps, freq);
    const double h = cfg.length / static_cast<double>(cfg.samples - 1);
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        const double x = i + 1 == cfg.samples ? cfg.length : h * static_cast<double>(i);
        out.xs.push_back(x);
        out.values.push_back(f(x));
        out.oblique.push_back(oblique(x));
        out.orthogonal.push_back(orthogonal(x));
    }
    return out;
}

inline void cmd_project(const ExperimentConfig& cfg, std::ostream& os)
{
    const ProjectResult res = compute_project(cfg);
    auto list = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            s += (i ? " " : "") + csv::real(v[i]);
        }
        return s;
    };
    csv::comment(os, describe(cfg));
    csv::comment(os, "oblique_coefficients " + list(res.oblique_coefficients));
    csv::comment(os, "orthogonal_coefficients " + list(res.orthogonal_coefficients));
    csv::comment(os, "oblique_residual_l2 " + csv::real(res.oblique_residual));
    csv::comment(os, "orthogonal_residual_l2 " + csv::real(res.orthogonal_residual));
    os << "x,f,oblique,orthogonal\n";
    for (std::size_t i = 0; i < res.xs.size(); ++i) {
        os << csv::real(res.xs[i]) << ',' << csv::real(res.values[i]) << ','
           << csv::real(res.oblique[i]) << ',' << csv::real(res.orthogonal[i]) << '\n';
    }
}

// --- simulate ----------------------------------------------------------------------------

inline fem::ReactionField make_reaction(const ExperimentConfig& cfg)
{
    const auto [name, arg] = detail::selector(cfg.reaction);
    if (name == "constant") {
        return fem::constant_reaction(detail::parse_real(arg, "constant reaction"));
    }
    if (name == "oscillating" || name == "paper-8.4") {
        return fem::oscillating_reaction(cfg.nu, cfg.length);
    }
    if (name == "table") {
        // First row: header cell then x positions; further rows: t, a(t, x_1), ...
        std::ifstream in(arg);
        if (!in) {
            throw std::invalid_argument("cannot open reaction table '" + arg + "'");
        }
        std::vector<std::vector<double>> rows;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (line.empty() || line.front() == '#') {
                continue;
            }
            auto cells = detail::split(line, ',');
            std::vector<double> row;
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (rows.empty() && i == 0) {
                    row.push_back(0.0); // corner cell is a label
                    continue;
                }
                row.push_back(detail::parse_real(cells[i], "reaction table cell"));
            }
            rows.push_back(std::move(row));
        }
        if (rows.size() < 2 || rows.front().size() < 2) {
            throw std::invalid_argument("reaction table needs an x header row and one t row");
        }
        std::vector<double> xs(rows.front().begin() + 1, rows.front().end());
        std::vector<double> ts;
        std::vector<std::vector<double>> values;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].size() != xs.size() + 1) {
                throw std::invalid_argument("reaction table row has wrong length");
            }
            ts.push_back(rows[i].front());
            values.emplace_back(rows[i].begin() + 1, rows[i].end());
        }
        return fem::tabulated_reaction(std::move(ts), std::move(xs), std::move(values));
    }
    throw std::invalid_argument("unknown reaction selector '" + cfg.reaction + "'");
}

inline std::function<double(double)> make_initial(const ExperimentConfig& cfg)
{
    const auto [name, arg] = detail::selector(cfg.initial);
    const double length = cfg.length;
    if (name == "linear") {
        const double slope = arg.empty() ? 1.0 : detail::parse_real(arg, "initial slope");
        return [slope](double x) { return slope * x; };
    }
    if (name == "constant") {
        const double v = arg.empty() ? 1.0 : detail::parse_real(arg, "initial value");
        return [v](double) { return v; };
    }
    if (name == "sin") {
        const double amp = arg.empty() ? 1.0 : detail::parse_real(arg, "initial amplitude");
        return [amp, length](double x) { return amp * std::sin(std::numbers::pi * x / length); };
    }
    throw std::invalid_argument("unknown initial condition selector '" + cfg.initial + "'");
}

inline fem::ClosedLoopConfig make_closed_loop(const ExperimentConfig& cfg)
{
    if (cfg.bcs.size() != 1 || cfg.schemes.size() != 1 || cfg.fractions.size() != 1) {
        throw std::invalid_argument("simulate: expects a single bc, scheme and r");
    }
    if (!cfg.feed_on.empty() && (cfg.feed_on.size() != 2 || cfg.feed_on[1] < cfg.feed_on[0])) {
        throw std::invalid_argument("simulate: --feed-on expects t0,t1 with t0 <= t1");
    }
    if (!(cfg.final_time > 0.0)) {
        throw std::invalid_argument("simulate: T must be positive");
    }
    fem::ClosedLoopConfig c;
    c.bc = parse_boundary_condition(cfg.bcs.front());
    c.length = cfg.length;
    c.nodes = cfg.nodes;
    c.nu = cfg.nu;
    c.time_step = cfg.time_step;
    c.final_time = cfg.final_time;
    c.reaction = make_reaction(cfg);
    c.initial = make_initial(cfg);
    c.feedback.enabled = !cfg.no_feedback;
    c.feedback.lambda = cfg.lambda;
    if (!cfg.feed_on.empty()) {
        c.feedback.on_begin = cfg.feed_on[0];
        c.feedback.on_end = cfg.feed_on[1];
    }
    if (c.feedback.enabled) {
        c.actuators = place(Placement{parse_placement_scheme(cfg.schemes.front()), {}},
                            cfg.length, cfg.count, cfg.fractions.front());
    }
    c.snapshot_times = cfg.snapshots;
    return c;
}

inline void write_trajectory(const ExperimentConfig& cfg, const fem::ClosedLoopRun& run,
                             std::ostream& os)
{
    csv::comment(os, describe(cfg));
    os << "t,l2_norm,feedback_on\n";
    for (std::size_t j = 0; j < run.times.size(); ++j) {
        os << csv::real(run.times[j]) << ',' << csv::real(run.norms[j]) << ','
           << static_cast<int>(run.feedback_on[j]) << '\n';
    }
}

inline void write_snapshot(const ExperimentConfig& cfg, const fem::ClosedLoopRun& run,
                           const fem::Snapshot& snap, std::ostream& os)
{
    csv::comment(os, describe(cfg) + " snapshot_t=" + csv::real(snap.time));
    os << "x,y\n";
    for (std::size_t i = 0; i < snap.values.size(); ++i) {
        os << csv::real(run.grid.node(i)) << ',' << csv::real(snap.values[i]) << '\n';
    }
}

inline fem::ClosedLoopRun cmd_simulate(const ExperimentConfig& cfg, std::ostream& os)
{
    auto run = fem::run_closed_loop(make_closed_loop(cfg));
    write_trajectory(cfg, run, os);
    return run;
}

// --- suffcond ------------------------------------------------------------------------------

struct SuffcondResult {
    std::vector<SufficientConditionReport> reports; // M = 1..M_max
    std::optional<std::size_t> minimal_swept;
    std::size_t corollary_threshold;
};

inline SuffcondResult compute_suffcond(const ExperimentConfig& cfg)
{
    if (cfg.bcs.size() != 1 || cfg.schemes.size() != 1 || cfg.fractions.size() != 1) {
        throw std::invalid_argument("suffcond: expects a single bc, scheme and r");
    }
    if (!(cfg.a_bound >= 0.0)) {
        throw std::invalid_argument("suffcond: a_bound must be nonnegative");
    }
    const BoundaryCondition bc = parse_boundary_condition(cfg.bcs.front());
    const PlacementScheme scheme = parse_placement_scheme(cfg.schemes.front());
    const double r = cfg.fractions.front();
    const std::size_t m_max = cfg.count_max == 0 ? cfg.count : cfg.count_max;

    SuffcondResult out;
    out.reports.resize(m_max);
    parallel_for(m_max, cfg.threads, [&](std::size_t i) {
        const std::size_t m = i + 1;
        if (scheme == PlacementScheme::Uni && !uniform_placement_feasible(m, r)) {
            out.reports[i] = {cfg.nu, m, spectral::eigenvalue(bc, cfg.length, m + 1),
                              std::numeric_limits<double>::infinity(), cfg.a_bound, false,
                              -std::numeric_limits<double>::infinity()};
            return;
        }
        const ProjectionData data = build_projection(bc, place(Placement{scheme, {}}, cfg.length, m, r));
        out.reports[i] = check_sufficient_condition(cfg.nu, bc, cfg.length, m, data.op_norm, cfg.a_bound);
    });
    for (const auto& rep : out.reports) {
        if (rep.satisfied) {
            out.minimal_swept = rep.count;
            break;
        }
    }
    out.corollary_threshold = corollary_threshold(bc, cfg.nu, cfg.length, r, cfg.a_bound);
    return out;
}

inline void cmd_suffcond(const ExperimentConfig& cfg, std::ostream& os)
{
    const SuffcondResult res = compute_suffcond(cfg);
    csv::comment(os, describe(cfg));
    csv::comment(os, "minimal_M_swept " +
                         (res.minimal_swept ? std::to_string(*res.minimal_swept) : std::string("none")));
    csv::comment(os, "minimal_M_limit_norm " + std::to_string(res.corollary_threshold));
    os << "M,op_norm,alpha_next,lhs,rhs,margin,satisfied\n";
    for (const auto& rep : res.reports) {
        const double lhs = rep.nu * rep.alpha_next;
        os << rep.count << ',' << csv::real(rep.op_norm) << ',' << csv::real(rep.alpha_next) << ','
           << csv::real(lhs) << ',' << csv::real(lhs - rep.margin) << ',' << csv::real(rep.margin)
           << ',' << (rep.satisfied ? 1 : 0) << '\n';
    }
}

} // namespace oblique::cli
