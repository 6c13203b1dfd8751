#pragma once

// Arcs, squares in the disc, the dyadic partition, and Whitney-type arc
// decompositions of the circle relative to a level set.
//
// Arc length |I| is always Euclidean (2*pi times the normalized measure).

#include <cstdint>
#include <string>
#include <vector>

#include "modelspace/inner.hpp"
#include "modelspace/level_set.hpp"
#include "modelspace/quadrature.hpp"

namespace modelspace {

// Counterclockwise arc from `start` to `end`; start in [0, 2*pi), end > start.
struct Arc {
    double start = 0.0;
    double end = 0.0;

    double length() const { return end - start; }
    double measure() const { return (end - start) / kTwoPi; }
    double mid() const { return 0.5 * (start + end); }
    // Closed membership of a boundary angle.
    bool contains(double angle) const;
    // Open membership (endpoints excluded).
    bool contains_interior(double angle) const;
    // Length of the intersection with another arc.
    double overlap(const Arc& other) const;
};

// Validating constructor; start is canonicalized, 0 < length <= 2*pi.
Arc make_arc(double start, double end);
Arc arc_from_mid(double mid, double length);

// {rho e^{i phi}: h0 - h/(2 pi) <= rho <= h0, phi0 <= phi <= phi0 + h}, closed.
struct GenericSquare {
    double h0 = 1.0;
    double phi0 = 0.0;
    double h = 0.0;

    double rho_lo() const { return h0 - h / kTwoPi; }
    Arc angles() const { return make_arc(phi0, phi0 + h); }
    // Lower side J(S) = {h0 e^{i phi}}, as angles; its Euclidean length is h0*h.
    Arc lower_side() const { return angles(); }
    double lower_side_length() const { return h0 * h; }
    bool contains(Complex z) const;
    PolarBox box() const;
    // Radial and angular midpoint.
    Complex midpoint() const;
};

GenericSquare make_square(double h0, double phi0, double h);

// Carleson square over an arc (h0 = 1); the arc must be shorter than the circle.
GenericSquare carleson_square(const Arc& arc);

// R_{n,m}: 1 - 2^{-(n-1)} <= rho < 1 - 2^{-n}, pi m/2^{n-1} <= phi < pi (m+1)/2^{n-1}.
struct DyadicSquare {
    int level = 1;
    std::int64_t index = 0;

    double rho_lo() const;
    double rho_hi() const;
    double phi_lo() const;
    double phi_hi() const;
    // Half-open membership.
    bool contains(Complex z) const;
    // Closure as a polar box.
    PolarBox box() const;

    friend bool operator==(const DyadicSquare&, const DyadicSquare&) = default;
};

inline constexpr int kMaxDyadicLevel = 30;

DyadicSquare dyadic_locate(Complex z);

enum class DyadicMode { meets_level_set, within_distance };

struct DyadicFamily {
    std::vector<DyadicSquare> cells;
    std::vector<DyadicSquare> undecided;
};

// Cells at levels 1..max_level whose closure meets Omega (meets_level_set) or
// lies within A*2^{-n} of the closure of Omega (within_distance). Ordered by
// level, then index.
DyadicFamily dyadic_cells_meeting(const InnerFunction& theta, double epsilon, int max_level,
                                  DyadicMode mode, double A = 0.0,
                                  std::size_t budget_per_box = std::size_t{1} << 14);

// ---------------------------------------------------------------------------
// Whitney decomposition

// Threshold for the integral of 1/d over an arc against normalized measure.
inline constexpr double kWhitneyThreshold = 1.0 / (8.0 * kPi);

struct WhitneyOptions {
    // Half-width of the excluded neighbourhood of each boundary spectrum angle.
    double spectrum_margin = 1e-6;
    // Relative accuracy of pointwise distance brackets used while marching.
    double distance_rel_tol = 1e-6;
    // Absolute accuracy cap of the per-arc distance bracket.
    double bracket_tol = 1e-5;
    std::size_t budget = kDefaultCellBudget;
    QuadratureOptions quadrature{1e-14, 1e-5, 4000};
};

struct WhitneyArc {
    Arc arc;
    DistanceBracket distance;  // dist(arc, closure of Omega)
    double integral = 0.0;     // integral of 1/d over the arc, normalized measure
    bool threshold_exact = false;
};

struct WhitneyDecomposition {
    double epsilon = 0.0;
    WhitneyOptions options;
    std::vector<WhitneyArc> arcs;
    std::vector<Arc> excluded;  // spectrum neighbourhoods left uncovered

    // Sum of normalized measures of all arcs.
    double covered_measure() const;
    // Index of the arc whose closure contains the angle, or -1.
    int arc_at(double angle) const;
    // Membership in F = union of the Carleson squares over the arcs.
    bool in_F(Complex z) const;
    // Certified upper bound for sup dist(z/|z|, Omega)/(1-|z|) over points of
    // G = disc minus F with |z| >= 1/2 lying over threshold-exact arcs.
    double g_constant() const;
    // Rows k,start_angle,end_angle,d_lo,d_hi,threshold_exact.
    std::string to_csv() const;
};

WhitneyDecomposition whitney_decompose(const InnerFunction& theta, double epsilon, double tol);
WhitneyDecomposition whitney_decompose(const InnerFunction& theta, double epsilon,
                                       const WhitneyOptions& opts);

}  // namespace modelspace
