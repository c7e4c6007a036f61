// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
// Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "oblique/oblique.hpp"

using namespace oblique;

namespace {

constexpr double pi = std::numbers::pi;
const BoundaryCondition kDir = BoundaryCondition::Dirichlet;
const BoundaryCondition kNeu = BoundaryCondition::Neumann;
const std::vector<double> kFractions{0.1, 0.25, 0.5, 0.75, 0.9};

struct Covered {
    BoundaryCondition bc;
    PlacementScheme scheme;
    const char* name;
};
const std::vector<Covered> kCovered{{kDir, PlacementScheme::Mxe, "dirichlet/mxe"},
                                    {kDir, PlacementScheme::Uni, "dirichlet/uni"},
                                    {kNeu, PlacementScheme::Mxe, "neumann/mxe"}};

bool feasible(PlacementScheme s, std::size_t m, double r)
{
    return s != PlacementScheme::Uni || uniform_placement_feasible(m, r);
}

class Report {
public:
    void criterion(int id, const std::string& title, const std::function<bool(std::ostream&)>& body)
    {
        std::ostringstream details;
        bool ok = false;
        const auto start = std::chrono::steady_clock::now();
        try {
            ok = body(details);
        } catch (const std::exception& e) {
            details << "exception: " << e.what() << '\n';
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %2d %s (%.2f s)\n", ok ? "PASS" : "FAIL", id, title.c_str(), secs);
        std::istringstream lines(details.str());
        for (std::string line; std::getline(lines, line);) {
            std::printf("       %s\n", line.c_str());
        }
        std::fflush(stdout);
        failures_ += ok ? 0 : 1;
    }

    int failures() const { return failures_; }

private:
    int failures_ = 0;
};

double elapsed_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fem::ClosedLoopRun simulate(BoundaryCondition bc, std::size_t m, bool feedback,
                            fem::ReactionField reaction, double final_time, double feed_end)
{
    fem::ClosedLoopConfig cfg;
    cfg.bc = bc;
    cfg.length = pi;
    cfg.nodes = 1001;
    cfg.nu = 0.1;
    cfg.time_step = 1e-3;
    cfg.final_time = final_time;
    cfg.reaction = std::move(reaction);
    cfg.feedback.enabled = feedback;
    cfg.feedback.on_end = feed_end;
    if (feedback) {
        cfg.actuators = place(Placement::mxe(), pi, m, 0.1);
    }
    cfg.initial = [](double x) { return 0.1 * x; };
    return fem::run_closed_loop(cfg);
}

double norm_at(const fem::ClosedLoopRun& run, double t)
{
    for (std::size_t j = 0; j < run.times.size(); ++j) {
        if (std::abs(run.times[j] - t) < 0.5 * run.time_step) {
            return run.norms[j];
        }
    }
    throw std::runtime_error("time not on the grid");
}

double heat_l2_error(std::size_t nodes, double k)
{
    const double nu = 0.1;
    const fem::FemGrid grid(nodes, pi);
    const auto mats = fem::assemble_fem(grid);
    const fem::CrankNicolson cn(kDir, mats, nu, k);
    auto y = grid.sample([](double x) { return std::sin(x); });
    const std::vector<double> zero(nodes, 0.0);
    const std::size_t steps = fem::step_count(1.0, k);
    for (std::size_t j = 1; j <= steps; ++j) {
        y = cn.step(y, zero, zero, static_cast<double>(j - 1) * k, static_cast<double>(j) * k, {});
    }
    const auto exact = grid.sample([&](double x) { return std::exp(-nu) * std::sin(x); });
    for (std::size_t i = 0; i < nodes; ++i) {
        y[i] -= exact[i];
    }
    return fem::mass_norm(mats, y);
}

double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

} // namespace

int main()
{
    Report report;

    report.criterion(1, "analytic vs numeric vartheta, M=1..60, rel err <= 1e-8, < 10 s",
                     [&](std::ostream& os) {
        const auto t0 = std::chrono::steady_clock::now();
        double worst = 0.0;
        std::size_t cases = 0;
        for (const auto& c : kCovered) {
            for (double r : kFractions) {
                for (std::size_t m = 1; m <= 60; ++m) {
                    if (!feasible(c.scheme, m, r)) {
                        continue;
                    }
                    const auto row = evaluate_configuration(c.bc, c.scheme, m, r);
                    const double rel = std::abs(row.vartheta_numeric - *row.vartheta_analytic) /
                                       std::abs(*row.vartheta_analytic);
                    worst = std::max(worst, rel);
                    ++cases;
                }
            }
        }
        os << cases << " configurations, max relative error " << worst << '\n';
        return worst <= 1e-8 && elapsed_since(t0) < 10.0;
    });

    report.criterion(2, "vartheta(200) within 1% of limit; norm increasing from M=2 and bounded",
                     [&](std::ostream& os) {
        bool ok = true;
        for (const auto& c : kCovered) {
            for (double r : kFractions) {
                const double limit = vartheta_limit(r);
                const double nlimit = norm_limit(r);
                const auto last = evaluate_configuration(c.bc, c.scheme, 200, r);
                const double rel = std::abs(last.vartheta_numeric - limit) / limit;
                bool monotone = true;
                bool bounded = true;
                double prev = 0.0;
                bool first = true;
                for (std::size_t m = 2; m <= 200; ++m) {
                    if (!feasible(c.scheme, m, r)) {
                        continue;
                    }
                    const double n = evaluate_configuration(c.bc, c.scheme, m, r).op_norm;
                    if (!first && !(n > prev)) {
                        monotone = false;
                    }
                    if (n > nlimit * (1.0 + 1e-12)) {
                        bounded = false;
                    }
                    prev = n;
                    first = false;
                }
                const bool pass = rel <= 0.01 && monotone && bounded;
                ok = ok && pass;
                os << c.name << " r=" << r << ": rel(200)=" << rel << " monotone=" << monotone
                   << " bounded=" << bounded << (pass ? "" : "  <-- fails") << '\n';
            }
        }
        return ok;
    });

    report.criterion(3, "Theta diagonal for covered cases; Theta_13 = -16 sin(pi/12) sin(pi/4)/pi^2 "
                        "for dirichlet/con, neumann/con, neumann/uni (M=3, r=1/2)",
                     [&](std::ostream& os) {
        bool diagonal = true;
        double worst = 0.0;
        for (const auto& c : kCovered) {
            for (double r : kFractions) {
                for (std::size_t m = 1; m <= 60; ++m) {
                    if (!feasible(c.scheme, m, r)) {
                        continue;
                    }
                    const auto data = build_projection(c.bc, place(Placement{c.scheme, {}}, pi, m, r));
                    const auto chk = check_theta_diagonal(data);
                    diagonal = diagonal && chk.is_diagonal;
                    worst = std::max(worst, chk.max_offdiag);
                }
            }
        }
        os << "diagonality over covered cases: " << (diagonal ? "yes" : "no")
           << " (max offdiagonal " << worst << ")\n";

        const double target = -16.0 * std::sin(pi / 12.0) * std::sin(pi / 4.0) / (pi * pi);
        bool entries = true;
        for (auto [bc, scheme, name] :
             {Covered{kDir, PlacementScheme::Con, "dirichlet/con"},
              Covered{kNeu, PlacementScheme::Con, "neumann/con"},
              Covered{kNeu, PlacementScheme::Uni, "neumann/uni"}}) {
            const auto data = build_projection(bc, place(Placement{scheme, {}}, pi, 3, 0.5));
            const double t13 = data.theta(0, 2);
            const bool pass = std::abs(t13 - target) <= 1e-10;
            entries = entries && pass;
            char line[200];
            std::snprintf(line, sizeof line, "%s: Theta_13 = %.17g, expected %.17g, diff %.3g%s",
                          name, t13, target, t13 - target, pass ? "" : "  <-- fails");
            os << line << '\n';
        }
        if (!entries) {
            // Neumann rows index frequencies 0, 1, 2, so entry (1, 3) pairs the constant
            // mode with cos(2x); the expected value pairs cos(x) with cos(3x).
            os << "note: with neumann eigenfunctions 1/sqrt(pi), sqrt(2/pi) cos((i-1)x), entry (1,3)\n"
               << "      involves frequencies 0 and 2; the expected value corresponds to the\n"
               << "      dirichlet/con entry and is not the neumann (1,3) entry\n";
        }
        return diagonal && entries;
    });

    report.criterion(4, "cosine sums: mxe zero for m=1..2M-1, uni 0/-1 by parity for m=1..2M, M<=50",
                     [&](std::ostream& os) {
        double worst_mxe = 0.0;
        double worst_uni = 0.0;
        for (std::size_t m = 1; m <= 50; ++m) {
            const auto mxe = place(Placement::mxe(), pi, m, 0.1);
            for (long k = 1; k <= static_cast<long>(2 * m - 1); ++k) {
                worst_mxe = std::max(worst_mxe, std::abs(cosine_sum(mxe, k)));
            }
            const auto uni = place(Placement::uni(), pi, m, 0.1);
            for (long k = 1; k <= static_cast<long>(2 * m); ++k) {
                const double expected = k % 2 ? 0.0 : -1.0;
                worst_uni = std::max(worst_uni, std::abs(cosine_sum(uni, k) - expected));
            }
        }
        os << "max deviation mxe " << worst_mxe << ", uni " << worst_uni << '\n';
        return worst_mxe <= 1e-12 && worst_uni <= 1e-12;
    });

    report.criterion(5, "projector laws (idempotence, range, kernel, adjoint, norm > 1), M<=20, 1e-9",
                     [&](std::ostream& os) {
        double idem = 0.0;
        double range = 0.0;
        double kernel = 0.0;
        double adjoint = 0.0;
        double min_norm = 1e300;
        const Function f = [](double x) { return std::exp(0.3 * x) * std::cos(2.0 * x) + x * x / 7.0; };
        const Function g = [](double x) { return 1.0 / (1.0 + x) - std::sin(5.0 * x); };
        for (auto bc : {kDir, kNeu}) {
            for (auto placement : {Placement::mxe(), Placement::uni(), Placement::con()}) {
                // clustered actuators lose the direct sum numerically beyond a few M
                const std::size_t m_max = placement.scheme == PlacementScheme::Con ? 6 : 20;
                for (std::size_t m = 1; m <= m_max; ++m) {
                    const auto set = place(placement, pi, m, 0.3);
                    const auto data = build_projection(bc, set);
                    const auto cuts = set.breakpoints();
                    const auto pf = apply_projection(data, f);
                    const auto ppf = apply_projection(data, pf, cuts);
                    std::vector<double> coeff(m);
                    for (std::size_t j = 0; j < m; ++j) {
                        coeff[j] = std::cos(static_cast<double>(j)) + 1.5;
                        idem = std::max(idem, std::abs(ppf.coefficients[j] - pf.coefficients[j]));
                    }
                    const auto pu = apply_projection(data, ActuatorExpansion{set, coeff}, cuts);
                    for (std::size_t j = 0; j < m; ++j) {
                        range = std::max(range, std::abs(pu.coefficients[j] - coeff[j]));
                    }
                    for (std::size_t extra = 1; extra <= 3; ++extra) {
                        const Function e = [&](double x) {
                            return spectral::eigenfunction(bc, pi, m + extra, x);
                        };
                        for (double c : apply_projection(data, e).coefficients) {
                            kernel = std::max(kernel, std::abs(c));
                        }
                    }
                    // (P f, g) = Σ α_j (1̄_j, g) and (f, P* g) = Σ β_i (e_i, f)
                    const auto pstar = apply_adjoint_projection(data, g);
                    const double lhs = dot(pf.coefficients, actuator_moments(set, g));
                    const double rhs = dot(pstar.coefficients, eigen_moments(bc, set, f));
                    adjoint = std::max(adjoint, std::abs(lhs - rhs));
                    min_norm = std::min(min_norm, data.op_norm);
                }
            }
        }
        os << "idempotence " << idem << ", range " << range << ", kernel " << kernel
           << ", adjoint " << adjoint << ", min norm " << min_norm << '\n';
        return idem <= 1e-9 && range <= 1e-9 && kernel <= 1e-9 && adjoint <= 1e-9 && min_norm > 1.0;
    });

    report.criterion(6, "op_norm independent of L in {1, pi, 2.5} within 1e-9", [&](std::ostream& os) {
        // Clustered placements reach vartheta ~ 1e-10 within a few actuators; there the
        // norm is only determined to ~1e-16 / vartheta relative, so those cases are
        // listed separately rather than held to an absolute 1e-9.
        constexpr double kConditioned = 1e-6;
        double worst = 0.0;
        double worst_ill_rel = 0.0;
        std::size_t cases = 0;
        std::size_t ill = 0;
        std::size_t no_direct_sum = 0;
        for (auto bc : {kDir, kNeu}) {
            for (auto placement : {Placement::mxe(), Placement::uni(), Placement::con()}) {
                for (std::size_t m : {1u, 2u, 5u, 12u, 30u}) {
                    for (double r : {0.1, 0.5}) {
                        std::optional<ProjectionData> ref_opt;
                        try {
                            ref_opt.emplace(build_projection(bc, place(placement, pi, m, r)));
                        } catch (const DirectSumFailure&) {
                            ++no_direct_sum;
                            continue;
                        }
                        const ProjectionData& ref = *ref_opt;
                        for (double length : {1.0, 2.5}) {
                            const double n = build_projection(bc, place(placement, length, m, r)).op_norm;
                            if (ref.vartheta >= kConditioned) {
                                worst = std::max(worst, std::abs(n - ref.op_norm));
                                ++cases;
                            } else {
                                worst_ill_rel =
                                    std::max(worst_ill_rel, std::abs(n - ref.op_norm) / ref.op_norm);
                                ++ill;
                            }
                        }
                    }
                }
            }
        }
        os << cases << " comparisons with vartheta >= " << kConditioned
           << ": max |op_norm(L) - op_norm(pi)| = " << worst << '\n';
        os << ill << " ill-conditioned con comparisons (not checked): max relative difference "
           << worst_ill_rel << '\n';
        os << no_direct_sum << " con configurations without a numerical direct sum (skipped)\n";
        return worst <= 1e-9;
    });

    report.criterion(7, "Crank-Nicolson error ratio in [3.2, 4.8] under (h,k) halving, < 30 s",
                     [&](std::ostream& os) {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<double> errs;
        std::size_t nodes = 41;
        double k = 0.05;
        for (int level = 0; level < 4; ++level) {
            errs.push_back(heat_l2_error(nodes, k));
            os << "N=" << nodes << " k=" << k << " L2 error " << errs.back() << '\n';
            nodes = 2 * nodes - 1;
            k /= 2.0;
        }
        bool ok = true;
        for (std::size_t i = 1; i < errs.size(); ++i) {
            const double ratio = errs[i - 1] / errs[i];
            os << "ratio " << ratio << '\n';
            ok = ok && ratio >= 3.2 && ratio <= 4.8;
        }
        return ok && elapsed_since(t0) < 30.0;
    });

    report.criterion(8, "closed loop, constant reaction: M=6 decays 10x, M=5 dirichlet decays and "
                        "neumann grows, free dynamics grow, < 2 min",
                     [&](std::ostream& os) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto reaction = fem::constant_reaction(-35.0 * 0.1);
        bool ok = true;
        auto ratio = [](const fem::ClosedLoopRun& run) { return run.norms.back() / run.norms.front(); };
        for (auto bc : {kDir, kNeu}) {
            const double r6 = ratio(simulate(bc, 6, true, reaction, 4.5, 1e9));
            const double r5 = ratio(simulate(bc, 5, true, reaction, 4.5, 1e9));
            const double free = ratio(simulate(bc, 1, false, reaction, 4.5, 1e9));
            const bool p6 = r6 < 0.1;
            const bool p5 = bc == kDir ? r5 < 1.0 : r5 > 1.0;
            const bool pf = free > 1.0;
            ok = ok && p6 && p5 && pf;
            os << to_string(bc) << ": |y(T)|/|y(0)| M=6 " << r6 << (p6 ? "" : " <-- fails")
               << ", M=5 " << r5 << (p5 ? "" : " <-- fails") << ", free " << free
               << (pf ? "" : " <-- fails") << '\n';
        }
        const double secs = elapsed_since(t0);
        return ok && secs < 120.0;
    });

    report.criterion(9, "feedback on [0, 4.5], T=6: norm(6) > norm(4.5)", [&](std::ostream& os) {
        bool ok = true;
        for (auto bc : {kDir, kNeu}) {
            const auto run = simulate(bc, 6, true, fem::constant_reaction(-3.5), 6.0, 4.5);
            const double a = norm_at(run, 4.5);
            const double b = norm_at(run, 6.0);
            ok = ok && b > a;
            os << to_string(bc) << ": norm(4.5) " << a << ", norm(6) " << b << '\n';
        }
        return ok;
    });

    report.criterion(10, "time-dependent reaction: M=8 decays for both bc; M=7 recorded",
                     [&](std::ostream& os) {
        bool ok = true;
        const auto reaction = fem::oscillating_reaction(0.1, pi);
        for (auto bc : {kDir, kNeu}) {
            const auto r8 = simulate(bc, 8, true, reaction, 4.5, 1e9);
            const auto r7 = simulate(bc, 7, true, reaction, 4.5, 1e9);
            const double q8 = r8.norms.back() / r8.norms.front();
            const double q7 = r7.norms.back() / r7.norms.front();
            ok = ok && q8 < 1.0;
            if (bc == kDir) {
                ok = ok && q7 < 1.0;
            }
            os << to_string(bc) << ": |y(T)|/|y(0)| M=8 " << q8 << ", M=7 " << q7
               << (q7 < 1.0 ? " (decays)" : " (does not decay)") << '\n';
        }
        return ok;
    });

    report.criterion(11, "neumann/uni slopes (r=0.2) within factor 2 of -1e-3, -6e-5, -1.5e-5",
                     [&](std::ostream& os) {
        cli::ExperimentConfig cfg;
        cfg.command = "eigs";
        cfg.bcs = {"neumann"};
        cfg.schemes = {"uni"};
        cfg.fractions = {0.2};
        cfg.count_min = 1;
        cfg.count_max = 120;
        const auto res = cli::compute_eigs(cfg);
        const std::vector<double> targets{-1e-3, -6e-5, -1.5e-5};
        bool ok = res.slopes.size() == targets.size();
        for (std::size_t i = 0; i < res.slopes.size() && i < targets.size(); ++i) {
            const double q = res.slopes[i].slope / targets[i];
            const bool pass = q >= 0.5 && q <= 2.0;
            ok = ok && pass;
            os << "window [" << res.slopes[i].from << ',' << res.slopes[i].to << "]: slope "
               << res.slopes[i].slope << " (target " << targets[i] << ")"
               << (pass ? "" : " <-- fails") << '\n';
        }
        return ok;
    });

    std::printf("%d criterion(s) failed\n", report.failures());
    return report.failures() == 0 ? 0 : 1;
}
