#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "oblique/errors.hpp"

namespace oblique {

/// mxe: extremisers of sin(Mx); uni: uniform jL/(M+1); con: packed at the
/// center; custom: caller-supplied centers.
enum class PlacementScheme { Mxe, Uni, Con, Custom };

inline std::string_view to_string(PlacementScheme s)
{
    switch (s) {
    case PlacementScheme::Mxe:
        return "mxe";
    case PlacementScheme::Uni:
        return "uni";
    case PlacementScheme::Con:
        return "con";
    case PlacementScheme::Custom:
        return "custom";
    }
    return "?";
}

inline PlacementScheme parse_placement_scheme(std::string_view text)
{
    if (text == "mxe") {
        return PlacementScheme::Mxe;
    }
    if (text == "uni") {
        return PlacementScheme::Uni;
    }
    if (text == "con") {
        return PlacementScheme::Con;
    }
    if (text == "custom") {
        return PlacementScheme::Custom;
    }
    throw std::invalid_argument("unknown placement scheme '" + std::string(text) + "'");
}

struct Placement {
    PlacementScheme scheme = PlacementScheme::Mxe;
    std::vector<double> centers; // only for Custom

    static Placement mxe() { return {PlacementScheme::Mxe, {}}; }
    static Placement uni() { return {PlacementScheme::Uni, {}}; }
    static Placement con() { return {PlacementScheme::Con, {}}; }
    static Placement custom(std::vector<double> centers)
    {
        return {PlacementScheme::Custom, std::move(centers)};
    }
};

struct Interval {
    double lo;
    double hi;
};

/// True when M(1 - r) >= r, i.e. uniformly placed actuators do not overlap.
inline bool uniform_placement_feasible(std::size_t count, double fraction)
{
    return static_cast<double>(count) * (1.0 - fraction) >= fraction - 1e-12;
}

/// M equal-width indicator actuators on (0, L) with total volume r L.
class ActuatorSet {
public:
    ActuatorSet(PlacementScheme scheme, double length, double fraction, std::vector<double> centers)
        : scheme_{scheme}, length_{length}, fraction_{fraction}, centers_{std::move(centers)}
    {
        if (centers_.empty()) {
            throw std::invalid_argument("ActuatorSet: M must be at least 1");
        }
        if (!(length_ > 0.0) || !std::isfinite(length_)) {
            throw std::invalid_argument("ActuatorSet: L must be positive");
        }
        if (!(fraction_ > 0.0 && fraction_ < 1.0)) {
            throw std::invalid_argument("ActuatorSet: r must lie in (0, 1)");
        }
        half_width_ = fraction_ * length_ / (2.0 * static_cast<double>(centers_.size()));
        const double slack = 1e-12 * length_;
        for (std::size_t j = 0; j < centers_.size(); ++j) {
            const double c = centers_[j];
            if (j > 0 && c < centers_[j - 1]) {
                throw std::invalid_argument("ActuatorSet: centers must be in increasing order");
            }
            if (c - half_width_ < -slack || c + half_width_ > length_ + slack) {
                throw std::invalid_argument("ActuatorSet: support of actuator " +
                                            std::to_string(j + 1) + " leaves (0, L)");
            }
        }
        disjoint_ = true;
        const double min_gap = fraction_ * length_ / static_cast<double>(centers_.size());
        for (std::size_t j = 1; j < centers_.size(); ++j) {
            if (centers_[j] - centers_[j - 1] < min_gap - slack) {
                disjoint_ = false;
            }
        }
    }

    PlacementScheme scheme() const noexcept { return scheme_; }
    double length() const noexcept { return length_; }
    double fraction() const noexcept { return fraction_; }
    std::size_t size() const noexcept { return centers_.size(); }
    const std::vector<double>& centers() const noexcept { return centers_; }
    double half_width() const noexcept { return half_width_; }
    /// |c_i - c_j| >= rL/M for all i != j (non-strict, so touching supports count).
    bool disjoint() const noexcept { return disjoint_; }

    bool distinct_centers() const
    {
        for (std::size_t j = 1; j < centers_.size(); ++j) {
            if (centers_[j] == centers_[j - 1]) {
                return false;
            }
        }
        return true;
    }

    Interval support(std::size_t j) const
    {
        check_index(j);
        return {centers_[j - 1] - half_width_, centers_[j - 1] + half_width_};
    }

    /// 1 on the open interval (c_j - δ, c_j + δ), 0 elsewhere including endpoints.
    double indicator(std::size_t j, double x) const
    {
        const Interval s = support(j);
        return (x > s.lo && x < s.hi) ? 1.0 : 0.0;
    }

    /// (M / (r L))^{1/2}, the factor that gives each indicator unit L² norm.
    double normalized_indicator_coeff() const
    {
        return std::sqrt(static_cast<double>(centers_.size()) / (fraction_ * length_));
    }

    double total_volume() const
    {
        return 2.0 * half_width_ * static_cast<double>(centers_.size());
    }

    /// Actuator endpoints, sorted, for splitting quadrature.
    std::vector<double> breakpoints() const
    {
        std::vector<double> out;
        out.reserve(2 * centers_.size());
        for (double c : centers_) {
            out.push_back(c - half_width_);
            out.push_back(c + half_width_);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// L, M, r, scheme, c_1, ..., c_M
    std::string to_csv_line() const
    {
        std::ostringstream os;
        os << std::setprecision(17) << length_ << ',' << centers_.size() << ',' << fraction_
           << ',' << to_string(scheme_);
        for (double c : centers_) {
            os << ',' << c;
        }
        return os.str();
    }

private:
    void check_index(std::size_t j) const
    {
        if (j < 1 || j > centers_.size()) {
            throw std::invalid_argument("ActuatorSet: index " + std::to_string(j) +
                                        " outside 1.." + std::to_string(centers_.size()));
        }
    }

    PlacementScheme scheme_;
    double length_;
    double fraction_;
    std::vector<double> centers_;
    double half_width_ = 0.0;
    bool disjoint_ = true;
};

inline ActuatorSet place(const Placement& placement, double length, std::size_t count,
                         double fraction)
{
    if (count == 0) {
        throw std::invalid_argument("place: M must be at least 1");
    }
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::invalid_argument("place: r must lie in (0, 1)");
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw std::invalid_argument("place: L must be positive");
    }
    const auto m = static_cast<double>(count);
    std::vector<double> centers(count);
    switch (placement.scheme) {
    case PlacementScheme::Mxe:
        for (std::size_t j = 1; j <= count; ++j) {
            centers[j - 1] = (2.0 * static_cast<double>(j) - 1.0) * length / (2.0 * m);
        }
        break;
    case PlacementScheme::Uni:
        if (!uniform_placement_feasible(count, fraction)) {
            std::ostringstream os;
            os << "constraint M >= r/(1-r) violated: M = " << count
               << " < " << fraction / (1.0 - fraction);
            throw ConstraintViolation(os.str());
        }
        for (std::size_t j = 1; j <= count; ++j) {
            centers[j - 1] = static_cast<double>(j) * length / (m + 1.0);
        }
        break;
    case PlacementScheme::Con:
        for (std::size_t j = 1; j <= count; ++j) {
            centers[j - 1] = (1.0 - fraction) * length / 2.0 +
                             (2.0 * static_cast<double>(j) - 1.0) * fraction * length / (2.0 * m);
        }
        break;
    case PlacementScheme::Custom:
        if (placement.centers.size() != count) {
            throw std::invalid_argument("place: custom placement has " +
                                        std::to_string(placement.centers.size()) +
                                        " centers, expected " + std::to_string(count));
        }
        centers = placement.centers;
        break;
    }
    return ActuatorSet(placement.scheme, length, fraction, std::move(centers));
}

} // namespace oblique
