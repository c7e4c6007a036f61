#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oblique/actuators.hpp"
#include "oblique/errors.hpp"
#include "oblique/linalg.hpp"
#include "oblique/spectral.hpp"

namespace oblique::fem {

using linalg::DenseMatrix;
using linalg::SymTriDiag;

/// Uniform mesh x_i = i h, i = 0..N-1, h = L / (N - 1).
class FemGrid {
public:
    FemGrid(std::size_t nodes, double length) : nodes_{nodes}, length_{length}
    {
        if (nodes < 2) {
            throw std::invalid_argument("FemGrid: need at least 2 nodes");
        }
        if (!(length > 0.0) || !std::isfinite(length)) {
            throw std::invalid_argument("FemGrid: L must be positive");
        }
    }

    std::size_t size() const noexcept { return nodes_; }
    double length() const noexcept { return length_; }
    double spacing() const noexcept { return length_ / static_cast<double>(nodes_ - 1); }
    double node(std::size_t i) const
    {
        return i + 1 == nodes_ ? length_ : spacing() * static_cast<double>(i);
    }

    template <class F>
    std::vector<double> sample(F&& f) const
    {
        std::vector<double> out(nodes_);
        for (std::size_t i = 0; i < nodes_; ++i) {
            out[i] = f(node(i));
        }
        return out;
    }

private:
    std::size_t nodes_;
    double length_;
};

/// Mass and stiffness matrices of the piecewise-linear hat functions.
struct FemMatrices {
    SymTriDiag mass;
    SymTriDiag stiffness;
};

inline FemMatrices assemble_fem(const FemGrid& grid)
{
    const std::size_t n = grid.size();
    if (n < 3) {
        throw std::invalid_argument("assemble_fem: need at least 3 nodes");
    }
    const double h = grid.spacing();
    std::vector<double> md(n, 2.0 * h / 3.0);
    std::vector<double> sd(n, 2.0 / h);
    md.front() = md.back() = h / 3.0;
    sd.front() = sd.back() = 1.0 / h;
    return FemMatrices{SymTriDiag(std::move(md), std::vector<double>(n - 1, h / 6.0)),
                       SymTriDiag(std::move(sd), std::vector<double>(n - 1, -1.0 / h))};
}

/// R = (M Diag(a) + Diag(a) M) / 2, tridiagonal and symmetric.
inline SymTriDiag reaction_matrix(const FemMatrices& fem, std::span<const double> a_nodal)
{
    const SymTriDiag& m = fem.mass;
    const std::size_t n = m.size();
    if (a_nodal.size() != n) {
        throw std::invalid_argument("reaction_matrix: nodal reaction has wrong length");
    }
    SymTriDiag r(std::vector<double>(n), std::vector<double>(n - 1));
    for (std::size_t i = 0; i < n; ++i) {
        r.diag[i] = m.diag[i] * a_nodal[i];
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        r.offdiag[i] = m.offdiag[i] * 0.5 * (a_nodal[i] + a_nodal[i + 1]);
    }
    return r;
}

inline double mass_norm(const FemMatrices& fem, std::span<const double> y)
{
    const auto my = fem.mass * y;
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        s += y[i] * my[i];
    }
    return std::sqrt(std::max(s, 0.0));
}

// --- feedback ----------------------------------------------------------------

/// Discrete oblique projection and feedback force.
///
/// Holds the nodal actuator matrix [U_M] (plain indicators, 1 strictly inside
/// ω_j), the nodal eigenfunction matrix [E_M], and
/// P_M = [e_iᵀ M 1_{ω_j}]⁻¹ [E_M]ᵀ. All three are stored transposed (M x N)
/// so the products below run over contiguous rows.
class FeedbackOperator {
public:
    FeedbackOperator(const ActuatorSet& set, const EigenBasis& basis, const FemGrid& grid,
                     const FemMatrices& fem)
        : mass_{fem.mass}, stiffness_{fem.stiffness}
    {
        const std::size_t m = set.size();
        const std::size_t n = grid.size();
        if (basis.size() != m) {
            throw std::invalid_argument("FeedbackOperator: basis and actuator counts differ");
        }
        if (std::abs(basis.length() - grid.length()) > 1e-12 * grid.length() ||
            std::abs(set.length() - grid.length()) > 1e-12 * grid.length()) {
            throw std::invalid_argument("FeedbackOperator: inconsistent domain lengths");
        }
        if (fem.mass.size() != n) {
            throw std::invalid_argument("FeedbackOperator: matrices do not match grid");
        }
        actuators_t_ = DenseMatrix(m, n);
        eigen_t_ = DenseMatrix(m, n);
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                const double x = grid.node(i);
                actuators_t_(j, i) = set.indicator(j + 1, x);
                eigen_t_(j, i) = basis(j + 1, x);
            }
        }
        // small(i, j) = e_iᵀ M 1_{ω_j}
        DenseMatrix small(m, m);
        for (std::size_t j = 0; j < m; ++j) {
            const auto mu = mass_ * std::span<const double>(actuators_t_.row(j));
            for (std::size_t i = 0; i < m; ++i) {
                const auto e = eigen_t_.row(i);
                double s = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    s += e[k] * mu[k];
                }
                small(i, j) = s;
            }
        }
        try {
            // P_M = small⁻¹ [E_M]ᵀ, and [E_M]ᵀ is exactly eigen_t_.
            projector_t_ = linalg::solve_dense(small, eigen_t_);
        } catch (const SingularMatrixError&) {
            throw DirectSumFailure(
                "discrete matrix [e_i' M 1_w_j] is singular; refine the mesh so that every "
                "actuator covers several nodes (h much smaller than the actuator half-width)");
        }
    }

    std::size_t size() const noexcept { return actuators_t_.rows(); }
    std::size_t nodes() const noexcept { return actuators_t_.cols(); }
    const DenseMatrix& actuator_nodes_t() const noexcept { return actuators_t_; }
    const DenseMatrix& eigen_nodes_t() const noexcept { return eigen_t_; }
    const DenseMatrix& projector() const noexcept { return projector_t_; }

    /// q = P_M v (v already carries the mass/stiffness product).
    std::vector<double> apply_projector(std::span<const double> v) const
    {
        return projector_t_ * v;
    }

    /// [U_M] q
    std::vector<double> expand(std::span<const double> q) const
    {
        return linalg::transpose_times(actuators_t_, q);
    }

    /// Coefficients q = P_M M z of the projected function in the plain-indicator basis.
    std::vector<double> coefficients(std::span<const double> z) const
    {
        return apply_projector(mass_ * z);
    }

    /// Nodal values [U_M] P_M M z of P_{U_M}^{E_M^⊥} z.
    std::vector<double> project(std::span<const double> z) const
    {
        return expand(coefficients(z));
    }

    /// f = -[U_M] P_M (-ν S - R + λ M) y
    std::vector<double> force(std::span<const double> y, const SymTriDiag& reaction, double nu,
                              double lambda) const
    {
        const auto sy = stiffness_ * y;
        const auto ry = reaction * y;
        const auto my = mass_ * y;
        std::vector<double> v(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            v[i] = -nu * sy[i] - ry[i] + lambda * my[i];
        }
        auto f = expand(apply_projector(v));
        for (double& x : f) {
            x = -x;
        }
        return f;
    }

private:
    SymTriDiag mass_;
    SymTriDiag stiffness_;
    DenseMatrix actuators_t_;
    DenseMatrix eigen_t_;
    DenseMatrix projector_t_;
};

inline FeedbackOperator feedback_matrices(const ActuatorSet& set, const EigenBasis& basis,
                                          const FemGrid& grid, const FemMatrices& fem)
{
    return FeedbackOperator(set, basis, grid, fem);
}

inline std::vector<double> feedback_apply(const FeedbackOperator& op, std::span<const double> y,
                                          const SymTriDiag& reaction, double nu, double lambda)
{
    return op.force(y, reaction, nu, lambda);
}

// --- reaction ------------------------------------------------------------------

struct ReactionField {
    std::function<double(double x, double t)> a;
    std::string description;
    bool time_independent = false;
};

inline ReactionField constant_reaction(double value)
{
    return {[value](double, double) { return value; }, "constant(" + std::to_string(value) + ")",
            true};
}

/// a(x, t) = -35 ν (π/L)² - 2 |cos(4t) cos(x t) x|
inline ReactionField oscillating_reaction(double nu, double length)
{
    const double base = -35.0 * nu * (std::numbers::pi / length) * (std::numbers::pi / length);
    return {[base](double x, double t) {
                return base - 2.0 * std::abs(std::cos(4.0 * t) * std::cos(x * t) * x);
            },
            "oscillating", false};
}

/// Bilinear interpolation on a table a(times[i], xs[j]) = values[i][j];
/// clamped outside the table.
inline ReactionField tabulated_reaction(std::vector<double> times, std::vector<double> xs,
                                       std::vector<std::vector<double>> values)
{
    if (times.empty() || xs.empty() || values.size() != times.size()) {
        throw std::invalid_argument("tabulated_reaction: table shape mismatch");
    }
    for (const auto& row : values) {
        if (row.size() != xs.size()) {
            throw std::invalid_argument("tabulated_reaction: ragged table");
        }
        for (double v : row) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("tabulated_reaction: non-finite entry");
            }
        }
    }
    if (!std::is_sorted(times.begin(), times.end()) || !std::is_sorted(xs.begin(), xs.end())) {
        throw std::invalid_argument("tabulated_reaction: axes must be increasing");
    }
    auto locate = [](const std::vector<double>& axis, double v) {
        if (axis.size() == 1 || v <= axis.front()) {
            return std::pair<std::size_t, double>{0, 0.0};
        }
        if (v >= axis.back()) {
            return std::pair<std::size_t, double>{axis.size() - 2, 1.0};
        }
        const auto it = std::upper_bound(axis.begin(), axis.end(), v);
        const auto i = static_cast<std::size_t>(it - axis.begin()) - 1;
        return std::pair<std::size_t, double>{i, (v - axis[i]) / (axis[i + 1] - axis[i])};
    };
    const bool constant_in_time = times.size() == 1;
    return {[times = std::move(times), xs = std::move(xs), values = std::move(values),
             locate](double x, double t) {
                const auto [i, u] = locate(times, t);
                const auto [j, w] = locate(xs, x);
                const std::size_t i1 = std::min(i + 1, times.size() - 1);
                const std::size_t j1 = std::min(j + 1, xs.size() - 1);
                const double lo = (1.0 - w) * values[i][j] + w * values[i][j1];
                const double hi = (1.0 - w) * values[i1][j] + w * values[i1][j1];
                return (1.0 - u) * lo + u * hi;
            },
            "table", constant_in_time};
}

// --- time stepping -----------------------------------------------------------------

using TimeFunction = std::function<double(double)>;

/// Dirichlet: boundary values y(0, t), y(L, t).
/// Neumann: boundary fluxes y_x(0, t), y_x(L, t).
struct BoundaryData {
    TimeFunction left = [](double) { return 0.0; };
    TimeFunction right = [](double) { return 0.0; };
};

/// Crank-Nicolson step with the external force h extrapolated as
/// 3 h(y^{j-1}) - h(y^{j-2}):
///
///   (2M + kνS) y^j = (2M - kνS) y^{j-1} + k (3 h^{j-1} - h^{j-2}) [+ k (G^j + G^{j-1})]
///
/// Dirichlet solves only the interior block (natural node order, which is
/// already tridiagonal) and moves the boundary coupling to the right side.
/// Neumann solves the full system with the flux load
/// G(t) = ν (-y_x(0, t), 0, ..., 0, y_x(L, t)).
class CrankNicolson {
public:
    CrankNicolson(BoundaryCondition bc, const FemMatrices& fem, double nu, double time_step)
        : bc_{bc}, fem_{fem}, nu_{nu}, k_{time_step}
    {
        if (!(nu > 0.0) || !std::isfinite(nu)) {
            throw std::invalid_argument("CrankNicolson: nu must be positive");
        }
        if (!(time_step > 0.0) || !std::isfinite(time_step)) {
            throw std::invalid_argument("CrankNicolson: time step must be positive");
        }
        const std::size_t n = fem.mass.size();
        if (n < 3) {
            throw std::invalid_argument("CrankNicolson: need at least 3 nodes");
        }
        lhs_full_ = linalg::combine(2.0, fem.mass, k_ * nu_, fem.stiffness);
        rhs_full_ = linalg::combine(2.0, fem.mass, -k_ * nu_, fem.stiffness);
        if (bc_ == BoundaryCondition::Dirichlet) {
            lhs_interior_ = SymTriDiag(
                std::vector<double>(lhs_full_.diag.begin() + 1, lhs_full_.diag.end() - 1),
                std::vector<double>(lhs_full_.offdiag.begin() + 1, lhs_full_.offdiag.end() - 1));
        }
    }

    BoundaryCondition bc() const noexcept { return bc_; }
    double time_step() const noexcept { return k_; }

    std::vector<double> step(std::span<const double> y_prev, std::span<const double> h_prev,
                              std::span<const double> h_prevprev, double t_prev, double t_next,
                              const BoundaryData& boundary) const
    {
        const std::size_t n = y_prev.size();
        if (n != lhs_full_.size() || h_prev.size() != n || h_prevprev.size() != n) {
            throw std::invalid_argument("CrankNicolson::step: vector length mismatch");
        }
        std::vector<double> rhs = rhs_full_ * y_prev;
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] += k_ * (3.0 * h_prev[i] - h_prevprev[i]);
        }

        if (bc_ == BoundaryCondition::Neumann) {
            const double g_next_left = boundary.left(t_next);
            const double g_prev_left = boundary.left(t_prev);
            const double g_next_right = boundary.right(t_next);
            const double g_prev_right = boundary.right(t_prev);
            rhs.front() += k_ * nu_ * -(g_next_left + g_prev_left);
            rhs.back() += k_ * nu_ * (g_next_right + g_prev_right);
            return linalg::solve_spd_tridiag(lhs_full_, rhs);
        }

        // Rows 1..n-2 of rhs already hold (2M - kνS)_{ib} y_b^{j-1}.
        const double left = boundary.left(t_next);
        const double right = boundary.right(t_next);
        std::vector<double> interior(rhs.begin() + 1, rhs.end() - 1);
        interior.front() -= lhs_full_.offdiag.front() * left;
        interior.back() -= lhs_full_.offdiag.back() * right;
        const auto solved = linalg::solve_spd_tridiag(lhs_interior_, interior);
        std::vector<double> y(n);
        y.front() = left;
        y.back() = right;
        std::copy(solved.begin(), solved.end(), y.begin() + 1);
        return y;
    }

private:
    BoundaryCondition bc_;
    FemMatrices fem_;
    double nu_;
    double k_;
    SymTriDiag lhs_full_;
    SymTriDiag rhs_full_;
    SymTriDiag lhs_interior_;
};

inline std::vector<double> cn_step(const CrankNicolson& stepper, std::span<const double> y_prev,
                                   std::span<const double> h_prev,
                                   std::span<const double> h_prevprev, double t_prev,
                                   double t_next, const BoundaryData& boundary)
{
    return stepper.step(y_prev, h_prev, h_prevprev, t_prev, t_next, boundary);
}

// --- closed loop -----------------------------------------------------------------

/// Feedback is applied at t_j iff enabled and t_j ∈ [on_begin, on_end].
struct FeedbackConfig {
    bool enabled = true;
    double on_begin = 0.0;
    double on_end = std::numeric_limits<double>::infinity();
    double lambda = 1.0;

    bool active(double t, double tolerance = 0.0) const
    {
        return enabled && t >= on_begin - tolerance && t <= on_end + tolerance;
    }
};

struct ClosedLoopConfig {
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    double length = std::numbers::pi;
    std::size_t nodes = 1001;
    double nu = 0.1;
    double time_step = 1e-3;
    double final_time = 1.0;
    ReactionField reaction = constant_reaction(0.0);
    std::optional<ActuatorSet> actuators;
    FeedbackConfig feedback;
    std::function<double(double)> initial = [](double) { return 0.0; };
    BoundaryData boundary;
    std::vector<double> snapshot_times;
    /// Keep every stride-th nodal vector in the trajectory; 0 keeps none.
    std::size_t trajectory_stride = 0;
};

struct Snapshot {
    double time;
    std::vector<double> values;
};

struct ClosedLoopRun {
    BoundaryCondition bc;
    FemGrid grid;
    double time_step;
    std::vector<double> times;
    std::vector<double> norms;        ///< (yᵀ M y)^{1/2} at each t_j
    std::vector<char> feedback_on;    ///< 0/1 at each t_j
    std::vector<Snapshot> snapshots;
    std::vector<Snapshot> trajectory; ///< every trajectory_stride-th state
    std::vector<double> final_state;
};

inline std::size_t step_count(double final_time, double time_step)
{
    return static_cast<std::size_t>(std::floor(final_time / time_step + 1e-9));
}

inline ClosedLoopRun run_closed_loop(const ClosedLoopConfig& cfg)
{
    if (!(cfg.final_time >= 0.0)) {
        throw std::invalid_argument("run_closed_loop: final time must be nonnegative");
    }
    const FemGrid grid(cfg.nodes, cfg.length);
    const FemMatrices fem = assemble_fem(grid);
    const CrankNicolson stepper(cfg.bc, fem, cfg.nu, cfg.time_step);
    const double k = cfg.time_step;

    std::optional<FeedbackOperator> feedback;
    if (cfg.feedback.enabled) {
        if (!cfg.actuators) {
            throw std::invalid_argument("run_closed_loop: feedback enabled without actuators");
        }
        if (std::abs(cfg.actuators->length() - cfg.length) > 1e-12 * cfg.length) {
            throw std::invalid_argument("run_closed_loop: actuators and domain lengths differ");
        }
        if (!(cfg.feedback.lambda > 0.0)) {
            throw std::invalid_argument("run_closed_loop: lambda must be positive");
        }
        const EigenBasis basis(cfg.bc, cfg.length, cfg.actuators->size());
        feedback.emplace(*cfg.actuators, basis, grid, fem);
    }

    std::optional<SymTriDiag> cached_reaction;
    auto reaction_at = [&](double t) -> SymTriDiag {
        if (cfg.reaction.time_independent && cached_reaction) {
            return *cached_reaction;
        }
        const auto a = grid.sample([&](double x) { return cfg.reaction.a(x, t); });
        auto r = reaction_matrix(fem, a);
        if (cfg.reaction.time_independent) {
            cached_reaction = r;
        }
        return r;
    };

    const double tol = 1e-9 * k;
    auto force = [&](const std::vector<double>& y, double t, bool on) {
        const SymTriDiag r = reaction_at(t);
        std::vector<double> h = r * y;
        for (double& v : h) {
            v = -v;
        }
        if (on) {
            const auto f = feedback->force(y, r, cfg.nu, cfg.feedback.lambda);
            const auto mf = fem.mass * f;
            for (std::size_t i = 0; i < h.size(); ++i) {
                h[i] += mf[i];
            }
        }
        return h;
    };

    const std::size_t steps = step_count(cfg.final_time, k);
    ClosedLoopRun run{cfg.bc, grid, k, {}, {}, {}, {}, {}, {}};
    run.times.reserve(steps + 1);
    run.norms.reserve(steps + 1);
    run.feedback_on.reserve(steps + 1);

    std::vector<double> snapshot_times = cfg.snapshot_times;
    std::sort(snapshot_times.begin(), snapshot_times.end());
    std::size_t next_snapshot = 0;

    std::vector<double> y = grid.sample(cfg.initial);
    if (cfg.bc == BoundaryCondition::Dirichlet) {
        y.front() = cfg.boundary.left(0.0);
        y.back() = cfg.boundary.right(0.0);
    }

    auto record = [&](std::size_t j, double t, bool on) {
        run.times.push_back(t);
        run.norms.push_back(mass_norm(fem, y));
        run.feedback_on.push_back(on ? 1 : 0);
        while (next_snapshot < snapshot_times.size() &&
               snapshot_times[next_snapshot] < t + 0.5 * k) {
            run.snapshots.push_back({t, y});
            ++next_snapshot;
        }
        if (cfg.trajectory_stride > 0 && j % cfg.trajectory_stride == 0) {
            run.trajectory.push_back({t, y});
        }
    };

    bool on = feedback.has_value() && cfg.feedback.active(0.0, tol);
    record(0, 0.0, on);
    std::vector<double> h_prev = force(y, 0.0, on);
    std::vector<double> h_prevprev = h_prev; // ghost value h(y⁰) := h(y¹)

    for (std::size_t j = 1; j <= steps; ++j) {
        const double t_prev = static_cast<double>(j - 1) * k;
        const double t = static_cast<double>(j) * k;
        y = stepper.step(y, h_prev, h_prevprev, t_prev, t, cfg.boundary);
        on = feedback.has_value() && cfg.feedback.active(t, tol);
        record(j, t, on);
        h_prevprev = std::move(h_prev);
        h_prev = force(y, t, on);
    }
    run.final_state = std::move(y);
    return run;
}

} // namespace oblique::fem
