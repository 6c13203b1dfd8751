#pragma once

// Certified geometry of the level set Omega(Theta, eps) = {|Theta| < eps}.
//
// All searches run a best-first quadtree over [-1,1]^2. A cell is discarded
// once a lower bound for |Theta| on (cell ∩ closed disc) reaches eps. Two
// bounds are combined:
//   * Schwarz-Pick: Theta contracts the pseudo-hyperbolic metric, so from the
//     value at the cell centre, |Theta| >= (a - d)/(1 - a d) on the cell.
//   * factorwise: each Blaschke factor is the pseudo-hyperbolic distance to
//     its zero, and each singular atom is an explicit Poisson exponential;
//     both admit closed-form lower bounds that stay sharp near the circle.
// Points of the spectrum on the circle count as points of the closure of Omega.

#include <cstddef>
#include <optional>
#include <vector>

#include "modelspace/inner.hpp"

namespace modelspace {

inline constexpr std::size_t kDefaultCellBudget = std::size_t{1} << 24;

struct DistanceBracket {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t cells = 0;
    // A point of Omega at distance hi, when the upper bound came from one.
    Complex witness;
    double mid() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }
};

struct SearchOptions {
    double abs_tol = 1e-6;
    double rel_tol = 0.0;
    std::size_t budget = kDefaultCellBudget;
    // Optional point believed to lie in Omega; used to seed the upper bound.
    std::optional<Complex> hint;
};

// Certified bracket of dist(p, closure of Omega(Theta, eps)).
DistanceBracket level_distance(const InnerFunction& theta, double epsilon, Complex p, double tol);
DistanceBracket level_distance(const InnerFunction& theta, double epsilon, Complex p,
                               const SearchOptions& opts);

// Closed polar box {rho e^{i phi}: rho_lo <= rho <= rho_hi, phi_lo <= phi <= phi_hi}.
// phi_hi - phi_lo may not exceed 2*pi; phi_lo may be any real.
struct PolarBox {
    double rho_lo = 0.0;
    double rho_hi = 1.0;
    double phi_lo = 0.0;
    double phi_hi = 0.0;
};

// Euclidean distance from w to the box.
double distance_to_box(Complex w, const PolarBox& box);
// Radius of a disc about the box's angular/radial midpoint that contains it.
Complex box_center(const PolarBox& box);
double box_circumradius(const PolarBox& box);

enum class Certified { yes, no, undecided };

const char* to_string(Certified c);

// Does the box contain a point of Omega (open set)? Boundary spectrum points
// are not points of Omega and are not considered here.
Certified box_meets_level_set(const InnerFunction& theta, double epsilon, const PolarBox& box,
                              std::size_t budget = 1u << 14);

// Certified bracket of dist(box, closure of Omega), boundary spectrum included.
DistanceBracket box_distance(const InnerFunction& theta, double epsilon, const PolarBox& box,
                             const SearchOptions& opts);

// Nearest point of the box to w.
Complex nearest_point_on_box(Complex w, const PolarBox& box);

// Is dist(box, closure of Omega) <= t?
Certified box_within_distance(const InnerFunction& theta, double epsilon, const PolarBox& box,
                              double t, std::size_t budget = 1u << 14);

// Lower and upper bounds for |Theta| on the disc D(c, r) intersected with the closed unit disc.
double modulus_lower_bound(const InnerFunction& theta, Complex c, double r);
double modulus_upper_bound(const InnerFunction& theta, Complex c, double r);

struct LevelSetCell {
    double x = 0.0;
    double y = 0.0;
    double size = 0.0;  // side length
};

// Quadtree cells of side <= tol that may straddle the curve |Theta| = eps.
std::vector<LevelSetCell> level_set_boundary_cells(const InnerFunction& theta, double epsilon,
                                                   double tol, std::size_t budget = kDefaultCellBudget);

}  // namespace modelspace
