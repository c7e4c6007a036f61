#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oblique/fem.hpp"

using namespace oblique;
using namespace oblique::fem;

constexpr double pi = std::numbers::pi;

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

/// Max nodal error of CN for y_t = ν y_xx, y = e^{-νt} sin x, at T = 1.
double heat_error(std::size_t nodes, double k)
{
    const double nu = 0.1;
    const FemGrid grid(nodes, pi);
    const auto fem = assemble_fem(grid);
    const CrankNicolson cn(BoundaryCondition::Dirichlet, fem, nu, k);
    auto y = grid.sample([](double x) { return std::sin(x); });
    const std::vector<double> zero(nodes, 0.0);
    const std::size_t steps = step_count(1.0, k);
    for (std::size_t j = 1; j <= steps; ++j) {
        y = cn.step(y, zero, zero, (j - 1) * k, j * k, {});
    }
    double err = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
        err = std::max(err, std::abs(y[i] - std::exp(-nu) * std::sin(grid.node(i))));
    }
    return err;
}

} // namespace

TEST(Grid, Nodes)
{
    const FemGrid grid(5, 2.0);
    EXPECT_DOUBLE_EQ(grid.spacing(), 0.5);
    EXPECT_DOUBLE_EQ(grid.node(4), 2.0);
    EXPECT_THROW(FemGrid(1, 1.0), std::invalid_argument);
    EXPECT_THROW(assemble_fem(FemGrid(2, 1.0)), std::invalid_argument);
}

TEST(Assembly, ExactForLinearInterpolants)
{
    const FemGrid grid(11, 2.0);
    const auto fem = assemble_fem(grid);
    const auto one = grid.sample([](double) { return 1.0; });
    const auto x = grid.sample([](double t) { return t; });
    EXPECT_NEAR(dot(one, fem.mass * one), 2.0, 1e-14);
    EXPECT_NEAR(dot(x, fem.mass * x), 8.0 / 3.0, 1e-13);
    EXPECT_NEAR(dot(x, fem.stiffness * x), 2.0, 1e-13);
    for (double v : fem.stiffness * one) {
        EXPECT_NEAR(v, 0.0, 1e-13);
    }
    EXPECT_NEAR(mass_norm(fem, x), std::sqrt(8.0 / 3.0), 1e-13);
}

TEST(Assembly, ReactionMatrix)
{
    const FemGrid grid(6, 1.0);
    const auto fem = assemble_fem(grid);
    const auto r = reaction_matrix(fem, std::vector<double>(6, -2.0));
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_DOUBLE_EQ(r.diag[i], -2.0 * fem.mass.diag[i]);
    }
    const auto a = grid.sample([](double x) { return x; });
    const auto ra = reaction_matrix(fem, a);
    const auto dense = ra.to_dense();
    EXPECT_DOUBLE_EQ(dense(1, 2), fem.mass.offdiag[1] * 0.5 * (a[1] + a[2]));
    EXPECT_THROW(reaction_matrix(fem, std::vector<double>(3, 0.0)), std::invalid_argument);
}

TEST(CrankNicolson, SecondOrderConvergence)
{
    const double e1 = heat_error(41, 0.05);
    const double e2 = heat_error(81, 0.025);
    const double e3 = heat_error(161, 0.0125);
    EXPECT_GT(e1 / e2, 3.2);
    EXPECT_LT(e1 / e2, 4.8);
    EXPECT_GT(e2 / e3, 3.2);
    EXPECT_LT(e2 / e3, 4.8);
}

TEST(CrankNicolson, InhomogeneousDirichletSteadyState)
{
    const FemGrid grid(21, 2.0);
    const auto fem = assemble_fem(grid);
    const CrankNicolson cn(BoundaryCondition::Dirichlet, fem, 0.3, 0.01);
    BoundaryData bd{[](double) { return 1.0; }, [](double) { return 3.0; }};
    auto y = grid.sample([](double x) { return 1.0 + x; });
    const std::vector<double> zero(21, 0.0);
    for (int j = 1; j <= 50; ++j) {
        y = cn.step(y, zero, zero, (j - 1) * 0.01, j * 0.01, bd);
    }
    for (std::size_t i = 0; i < 21; ++i) {
        EXPECT_NEAR(y[i], 1.0 + grid.node(i), 1e-12);
    }
}

TEST(CrankNicolson, NeumannFluxSteadyState)
{
    // y = x solves y_t = ν y_xx with y_x(0) = y_x(L) = 1.
    const FemGrid grid(31, pi);
    const auto fem = assemble_fem(grid);
    const CrankNicolson cn(BoundaryCondition::Neumann, fem, 0.1, 0.01);
    BoundaryData flux{[](double) { return 1.0; }, [](double) { return 1.0; }};
    auto y = grid.sample([](double x) { return x; });
    const std::vector<double> zero(31, 0.0);
    for (int j = 1; j <= 100; ++j) {
        y = cn.step(y, zero, zero, (j - 1) * 0.01, j * 0.01, flux);
    }
    for (std::size_t i = 0; i < 31; ++i) {
        EXPECT_NEAR(y[i], grid.node(i), 1e-11);
    }
}

TEST(CrankNicolson, NeumannConservesMass)
{
    const FemGrid grid(41, pi);
    const auto fem = assemble_fem(grid);
    const CrankNicolson cn(BoundaryCondition::Neumann, fem, 0.1, 0.01);
    auto y = grid.sample([](double x) { return std::cos(x) + 0.5; });
    const auto one = grid.sample([](double) { return 1.0; });
    const double mass0 = dot(one, fem.mass * y);
    const std::vector<double> zero(41, 0.0);
    for (int j = 1; j <= 100; ++j) {
        y = cn.step(y, zero, zero, (j - 1) * 0.01, j * 0.01, {});
    }
    EXPECT_NEAR(dot(one, fem.mass * y), mass0, 1e-12);
}

TEST(CrankNicolson, ArgumentChecks)
{
    const auto fem = assemble_fem(FemGrid(5, 1.0));
    EXPECT_THROW(CrankNicolson(BoundaryCondition::Dirichlet, fem, 0.0, 0.1), std::invalid_argument);
    EXPECT_THROW(CrankNicolson(BoundaryCondition::Dirichlet, fem, 0.1, -0.1), std::invalid_argument);
}

TEST(Feedback, ProjectorReproducesActuators)
{
    const FemGrid grid(401, pi);
    const auto fem = assemble_fem(grid);
    const auto set = place(Placement::mxe(), pi, 4, 0.2);
    for (auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
        const FeedbackOperator op(set, EigenBasis(bc, pi, 4), grid, fem);
        for (std::size_t j = 0; j < 4; ++j) {
            std::vector<double> z(grid.size());
            for (std::size_t i = 0; i < grid.size(); ++i) {
                z[i] = op.actuator_nodes_t()(j, i);
            }
            const auto q = op.coefficients(z);
            for (std::size_t k = 0; k < 4; ++k) {
                EXPECT_NEAR(q[k], j == k ? 1.0 : 0.0, 1e-10);
            }
        }
        // higher eigenfunctions lie (up to discretisation error) in the kernel
        const auto e5 = grid.sample([&](double x) { return spectral::eigenfunction(bc, pi, 5, x); });
        for (double c : op.coefficients(e5)) {
            EXPECT_NEAR(c, 0.0, 1e-3);
        }
    }
}

TEST(Feedback, ForceVanishesWithoutState)
{
    const FemGrid grid(51, pi);
    const auto fem = assemble_fem(grid);
    const auto set = place(Placement::mxe(), pi, 2, 0.2);
    const auto op = feedback_matrices(set, EigenBasis(BoundaryCondition::Dirichlet, pi, 2), grid, fem);
    const auto r = reaction_matrix(fem, std::vector<double>(51, -1.0));
    for (double v : feedback_apply(op, std::vector<double>(51, 0.0), r, 0.1, 1.0)) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(Reaction, Fields)
{
    EXPECT_DOUBLE_EQ(constant_reaction(-3.5).a(1.0, 2.0), -3.5);
    const auto osc = oscillating_reaction(0.1, pi);
    EXPECT_NEAR(osc.a(1.0, 0.0), -3.5 - 2.0, 1e-14);
    EXPECT_FALSE(osc.time_independent);
    const auto tab = tabulated_reaction({0.0, 1.0}, {0.0, 2.0}, {{0.0, 2.0}, {4.0, 6.0}});
    EXPECT_NEAR(tab.a(1.0, 0.5), 3.0, 1e-15);
    EXPECT_NEAR(tab.a(5.0, 9.0), 6.0, 1e-15);
    EXPECT_THROW(tabulated_reaction({0.0}, {0.0, 1.0}, {{1.0}}), std::invalid_argument);
}

TEST(ClosedLoop, FreeHeatEquationDecays)
{
    ClosedLoopConfig cfg;
    cfg.nodes = 101;
    cfg.time_step = 0.01;
    cfg.final_time = 1.0;
    cfg.feedback.enabled = false;
    cfg.initial = [](double x) { return std::sin(x); };
    const auto run = run_closed_loop(cfg);
    ASSERT_EQ(run.times.size(), 101u);
    EXPECT_NEAR(run.norms.back() / run.norms.front(), std::exp(-0.1), 1e-4);
}

TEST(ClosedLoop, FeedbackWindowAndSnapshots)
{
    ClosedLoopConfig cfg;
    cfg.nodes = 101;
    cfg.time_step = 0.01;
    cfg.final_time = 0.5;
    cfg.reaction = constant_reaction(-1.0);
    cfg.actuators = place(Placement::mxe(), pi, 3, 0.1);
    cfg.feedback.on_begin = 0.1;
    cfg.feedback.on_end = 0.3;
    cfg.initial = [](double x) { return x; };
    cfg.snapshot_times = {0.25, 0.0};
    const auto run = run_closed_loop(cfg);
    EXPECT_EQ(run.feedback_on[5], 0);
    EXPECT_EQ(run.feedback_on[10], 1);
    EXPECT_EQ(run.feedback_on[30], 1);
    EXPECT_EQ(run.feedback_on[31], 0);
    ASSERT_EQ(run.snapshots.size(), 2u);
    EXPECT_NEAR(run.snapshots[1].time, 0.25, 1e-12);
    EXPECT_EQ(run.snapshots[0].values.front(), 0.0); // Dirichlet value imposed
    EXPECT_EQ(step_count(4.5, 1e-3), 4500u);
}

TEST(ClosedLoop, FeedbackNeedsActuators)
{
    ClosedLoopConfig cfg;
    cfg.nodes = 11;
    EXPECT_THROW(run_closed_loop(cfg), std::invalid_argument);
}
