#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace oblique {

enum class BoundaryCondition { Dirichlet, Neumann };

inline std::string_view to_string(BoundaryCondition bc)
{
    switch (bc) {
    case BoundaryCondition::Dirichlet:
        return "dirichlet";
    case BoundaryCondition::Neumann:
        return "neumann";
    }
    return "?";
}

inline BoundaryCondition parse_boundary_condition(std::string_view text)
{
    if (text == "dirichlet" || text == "dir" || text == "d") {
        return BoundaryCondition::Dirichlet;
    }
    if (text == "neumann" || text == "neu" || text == "n") {
        return BoundaryCondition::Neumann;
    }
    throw std::invalid_argument("unknown boundary condition '" + std::string(text) + "'");
}

namespace spectral {

/// Angular frequency of the i-th (1-based) eigenfunction on (0, L).
inline double frequency(BoundaryCondition bc, double length, std::size_t i)
{
    const auto k = static_cast<double>(bc == BoundaryCondition::Dirichlet ? i : i - 1);
    return k * std::numbers::pi / length;
}

/// i-th eigenvalue of -d²/dx² on (0, L); no upper bound on i.
inline double eigenvalue(BoundaryCondition bc, double length, std::size_t i)
{
    if (i == 0) {
        throw std::invalid_argument("eigenvalue: index is 1-based");
    }
    const double w = frequency(bc, length, i);
    return w * w;
}

/// L²(0, L)-normalised i-th eigenfunction at x, closed form.
inline double eigenfunction(BoundaryCondition bc, double length, std::size_t i, double x)
{
    if (i == 0) {
        throw std::invalid_argument("eigenfunction: index is 1-based");
    }
    const double w = frequency(bc, length, i);
    if (bc == BoundaryCondition::Dirichlet) {
        return std::sqrt(2.0 / length) * std::sin(w * x);
    }
    if (i == 1) {
        return std::sqrt(1.0 / length);
    }
    return std::sqrt(2.0 / length) * std::cos(w * x);
}

inline double eigenfunction_derivative(BoundaryCondition bc, double length, std::size_t i,
                                       double x)
{
    if (i == 0) {
        throw std::invalid_argument("eigenfunction_derivative: index is 1-based");
    }
    const double w = frequency(bc, length, i);
    if (bc == BoundaryCondition::Dirichlet) {
        return std::sqrt(2.0 / length) * w * std::cos(w * x);
    }
    if (i == 1) {
        return 0.0;
    }
    return -std::sqrt(2.0 / length) * w * std::sin(w * x);
}

} // namespace spectral

/// First M eigenpairs of the Laplacian on (0, L) under one boundary condition.
///
/// Eigenfunctions are closed-form evaluators. On (0, π) they are
/// √(2/π) sin(i x) (Dirichlet) and √(1/π), √(2/π) cos((i-1) x) (Neumann); on
/// (0, L) they are rescaled so that L²(0, L)-orthonormality holds.
/// Indices are 1-based throughout the public interface.
class EigenBasis {
public:
    EigenBasis(BoundaryCondition bc, double length, std::size_t count)
        : bc_{bc}, length_{length}, count_{count}
    {
        if (count == 0) {
            throw std::invalid_argument("EigenBasis: M must be at least 1");
        }
        if (!(length > 0.0) || !std::isfinite(length)) {
            throw std::invalid_argument("EigenBasis: L must be positive");
        }
        alphas_.reserve(count);
        for (std::size_t i = 1; i <= count; ++i) {
            alphas_.push_back(spectral::eigenvalue(bc, length, i));
        }
    }

    BoundaryCondition bc() const noexcept { return bc_; }
    double length() const noexcept { return length_; }
    std::size_t size() const noexcept { return count_; }
    const std::vector<double>& alphas() const noexcept { return alphas_; }

    double eigenvalue(std::size_t i) const
    {
        check_index(i);
        return alphas_[i - 1];
    }

    double frequency(std::size_t i) const
    {
        check_index(i);
        return spectral::frequency(bc_, length_, i);
    }

    double operator()(std::size_t i, double x) const
    {
        check_index(i);
        if (!(x >= 0.0 && x <= length_)) {
            throw std::invalid_argument("EigenBasis: x = " + std::to_string(x) +
                                        " outside [0, L]");
        }
        return spectral::eigenfunction(bc_, length_, i, x);
    }

    double derivative(std::size_t i, double x) const
    {
        check_index(i);
        return spectral::eigenfunction_derivative(bc_, length_, i, x);
    }

private:
    void check_index(std::size_t i) const
    {
        if (i < 1 || i > count_) {
            throw std::invalid_argument("EigenBasis: index " + std::to_string(i) +
                                        " outside 1.." + std::to_string(count_));
        }
    }

    BoundaryCondition bc_;
    double length_;
    std::size_t count_;
    std::vector<double> alphas_;
};

inline EigenBasis build_basis(BoundaryCondition bc, double length, std::size_t count)
{
    return EigenBasis(bc, length, count);
}

inline double eval_eigenfunction(const EigenBasis& basis, std::size_t i, double x)
{
    return basis(i, x);
}

/// Samples of a function at the uniform grid x_k = k * length / (n - 1).
struct SampledFunction {
    double length = std::numbers::pi;
    std::vector<double> values;

    double spacing() const { return length / static_cast<double>(values.size() - 1); }
    double node(std::size_t k) const { return spacing() * static_cast<double>(k); }
};

/// Rescaling (S f)(y) = f(π y / L) between (0, π) and (0, L).
///
/// On matched uniform grids the node y_k of (0, L) maps onto the node x_k of
/// (0, π), so S only relabels the grid and S⁻¹ ∘ S is exact.
inline SampledFunction rescale_function(const SampledFunction& on_pi, double length)
{
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw std::invalid_argument("rescale_function: L must be positive");
    }
    if (on_pi.values.size() < 2) {
        throw std::invalid_argument("rescale_function: need at least two samples");
    }
    return SampledFunction{length, on_pi.values};
}

inline SampledFunction unscale_function(const SampledFunction& on_l)
{
    if (on_l.values.size() < 2) {
        throw std::invalid_argument("unscale_function: need at least two samples");
    }
    return SampledFunction{std::numbers::pi, on_l.values};
}

/// Evaluator form of the rescaling: returns y ↦ f(π y / L).
inline std::function<double(double)> rescale_function(std::function<double(double)> f,
                                                      double length)
{
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw std::invalid_argument("rescale_function: L must be positive");
    }
    return [f = std::move(f), s = std::numbers::pi / length](double y) { return f(s * y); };
}

/// Squared L² norm of the piecewise-linear interpolant of the samples.
inline double squared_l2_norm(const SampledFunction& f)
{
    const double h = f.spacing();
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < f.values.size(); ++k) {
        const double a = f.values[k];
        const double b = f.values[k + 1];
        total += h * (a * a + a * b + b * b) / 3.0;
    }
    return total;
}

} // namespace oblique
