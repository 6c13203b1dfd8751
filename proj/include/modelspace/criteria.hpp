#pragma once

// Embedding criteria as resolution-tagged checks: Carleson-type conditions
// over the arc family, conditions on squares with prescribed lower sides,
// and Schatten-class sums over Whitney arcs and dyadic cells.
//
// Asymptotic statements are never claimed: every verdict refers to an
// explicit depth or grid and is one of holds / fails (with a witness) /
// inconclusive.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "modelspace/geometry.hpp"
#include "modelspace/inner.hpp"
#include "modelspace/measure.hpp"

namespace modelspace {

enum class CriterionId {
    carleson,
    vanishing,
    volberg_treil,
    V1,
    V2,
    thm31_bounded,
    thm31_compact,
    schatten_sufficient,
    schatten_necessary,
    luecking,
    thm54_family,
    thm14,
};

const char* to_string(CriterionId id);

enum class WitnessKind { family_arc, square, dyadic_cell };

const char* to_string(WitnessKind kind);

// A concrete region whose normalized mass exceeds a threshold:
// ratio = mass / length > threshold.
struct Witness {
    WitnessKind kind = WitnessKind::square;
    FamilyArc family;      // family_arc
    DyadicSquare cell;     // dyadic_cell
    GenericSquare square;  // closed region (Carleson square over the arc for family_arc)
    double mass = 0.0;
    double length = 0.0;   // |I|, |J(S)|, or 2^{-n} for a dyadic cell
    double ratio = 0.0;
    double threshold = 0.0;
    std::string reason;
};

// Recomputes the mass of the witness region and checks ratio > threshold.
bool verify_witness(const DiscMeasure& mu, const Witness& w, double rel_tol = 1e-9);

struct ConditionReport {
    CriterionId id = CriterionId::carleson;
    std::map<std::string, double> params;
    std::map<std::string, std::vector<double>> profile;
    Verdict verdict = Verdict::inconclusive;
    std::optional<Witness> witness;
    std::size_t undecided = 0;
    std::vector<std::string> notes;
    std::string convention = kLengthConvention;
};

struct CriterionSum {
    CriterionId id = CriterionId::luecking;
    std::map<std::string, double> params;
    // Partial sums by level (dyadic sums) or by arc index (Whitney sums).
    std::vector<double> partial_sums;
    // Block sums over levels, or over arc-length scales 2*pi*2^{-j-1} < |I| <= 2*pi*2^{-j}
    // for Whitney arcs, and the ratios of successive block sums.
    std::vector<double> block_sums;
    std::vector<double> block_ratios;
    double value = 0.0;
    std::size_t terms = 0;
    std::size_t undecided = 0;
    double undecided_value = 0.0;  // sum of terms over undecided cells
    // Mass outside the squares the sum runs over.
    double uncovered_mass = 0.0;
    std::vector<std::string> support_violations;
    // holds: the sum is complete (no terms beyond the resolution), or the last
    // three blocks sum to at most half of the three before them;
    // fails: the last window is at least 4/5 of the previous one; otherwise
    // inconclusive. For Whitney sums scales shorter than twice the spectrum
    // margin are left out. params["complete"] records completeness.
    Verdict trend = Verdict::inconclusive;
    // Largest term of the last window against the per-term budget that
    // would halve the window; present when trend fails.
    std::optional<Witness> witness;
};

// Carleson condition over the arc family, stable across depth: fails when the
// largest ratio on levels deeper than depth/2 exceeds twice the largest ratio
// on levels up to depth/2.
ConditionReport check_carleson(const DiscMeasure& mu, int depth);
ConditionReport check_vanishing(const DiscMeasure& mu, int depth, double decay_threshold = 1e-2);

// Largest mu(S(I))/|I| over family arcs whose squares certifiably meet Omega.
// With a threshold C the check compares against C; otherwise it applies the
// same stability rule as check_carleson.
ConditionReport check_volberg_treil(const InnerFunction& theta, double epsilon, const DiscMeasure& mu, int depth,
                                    std::optional<double> threshold = std::nullopt);

// Relative tolerance tau = kVanishingScale * M_mu(depth) shared by V1 and V2.
inline constexpr double kVanishingScale = 1e-3;

// eta(delta) over Omega-meeting family squares; fails when a certified
// level-depth square has ratio above tau.
ConditionReport check_V2(const InnerFunction& theta, double epsilon, const DiscMeasure& mu, int depth);

// Carleson estimates of mu restricted to H_delta = {dist(z, boundary spectrum) < delta}.
// Values of delta below the finest family arc length are skipped.
// Fails when the restriction at the smallest delta has a point mass on the
// circle whose finest family arc ratio exceeds tau, or when its estimate
// exceeds tau without halving from the middle of the grid.
// Holds when the estimate at the smallest delta is at most tau and every
// level-depth Omega-meeting square carrying mass lies in H_delta.
ConditionReport check_V1(const InnerFunction& theta, const DiscMeasure& mu, const std::vector<double>& delta_grid,
                         double epsilon, int depth);

// mu restricted to H_delta.
DiscMeasure restrict_near_spectrum(const InnerFunction& theta, const DiscMeasure& mu, double delta);

struct Thm31Reports {
    ConditionReport bounded;  // mu(S_k) <= C |J_k|, C = 2^{depth/2}
    ConditionReport compact;  // mu(S_k) = o(|J_k|) as a trend over the given order
};

// Squares S_k with lower sides J_k, Lebesgue measure dm = |dz|/(2 pi) on J_k
// for the weight integrals. The sparseness estimate runs over family arcs up
// to min(depth, 12).
Thm31Reports check_thm31(const InnerFunction& theta, const std::vector<GenericSquare>& squares,
                         const DiscMeasure& mu, double p, double r, int depth, double tol = 1e-6);

// Carleson squares over the Whitney arcs.
std::vector<GenericSquare> whitney_squares(const WhitneyDecomposition& w);

struct MeasureSplit {
    DiscMeasure on_squares;   // mu restricted to F = union of Whitney squares
    DiscMeasure off_squares;  // the rest
};

MeasureSplit split_by_whitney(const DiscMeasure& mu, const WhitneyDecomposition& w);

// Sum over Whitney arcs of (mu(S(I_k))/|I_k|)^{r/2}.
CriterionSum schatten_sufficient_sum(const InnerFunction& theta, double epsilon, const DiscMeasure& mu, double r,
                                     double tol);
CriterionSum schatten_sufficient_sum(const WhitneyDecomposition& w, const DiscMeasure& mu, double r);

// Sum of (2^n mu(R_{n,m}))^{r/2} over cells meeting Omega, levels 1..depth.
CriterionSum schatten_necessary_sum(const InnerFunction& theta, double epsilon, const DiscMeasure& mu, double r,
                                    int depth);
// Same over all cells.
CriterionSum luecking_sum(const DiscMeasure& mu, double r, int depth);
// Same over cells within A 2^{-n} of Omega.
CriterionSum thm54_family_sum(const InnerFunction& theta, double epsilon, double A, const DiscMeasure& mu, double r,
                              int depth);

// Both Schatten sums for a function declared CLS by the caller. Boundary mass
// outside every Whitney square fails the support requirement. For finite
// products the Schatten-r norm of the embedding is recorded as
// params["oracle_schatten"].
ConditionReport check_thm14(const InnerFunction& theta, bool cls_declared, double epsilon, const DiscMeasure& mu,
                            double r, int depth, double tol = 1e-6);

}  // namespace modelspace
