#pragma once

// Finite Borel measures on the closed disc (atoms plus piecewise constant
// densities on the circle) and Carleson-type functionals over arc families.

#include <functional>
#include <string>
#include <vector>

#include "modelspace/geometry.hpp"

namespace modelspace {

// Convention tag recorded in reports: |I| is Euclidean arc length.
inline constexpr const char* kLengthConvention = "lenE";
// Any arc lies in a family arc at most 4 times longer; ratios are within this factor.
inline constexpr double kFamilyFactor = 8.0;

struct MeasureAtom {
    Complex point;
    double mass = 0.0;
};

// Constant density against normalized arc measure m on an arc of the circle.
struct DensityPiece {
    Arc arc;
    double density = 0.0;
};

class DiscMeasure {
public:
    DiscMeasure() = default;
    DiscMeasure(std::vector<MeasureAtom> atoms, std::vector<DensityPiece> density = {});

    // Normalized arc measure m (density 1 on the whole circle).
    static DiscMeasure arc_measure();

    const std::vector<MeasureAtom>& atoms() const { return atoms_; }
    const std::vector<DensityPiece>& density() const { return density_; }

    double total_mass() const;
    bool empty() const { return atoms_.empty() && density_.empty(); }
    bool purely_atomic() const { return density_.empty(); }

    // Restriction: atoms kept by `keep`, densities clipped to `arcs`.
    DiscMeasure restricted(const std::function<bool(Complex)>& keep, const std::vector<Arc>& arcs) const;
    DiscMeasure plus(const DiscMeasure& other) const;

private:
    void validate();

    std::vector<MeasureAtom> atoms_;
    std::vector<DensityPiece> density_;
};

// Density mass over an arc of the circle.
double density_mass_on_arc(const DiscMeasure& mu, const Arc& arc);

// Closed generic square: atoms inside plus density on the lower side when h0 = 1.
double mass_on_square(const DiscMeasure& mu, const GenericSquare& s);
// Half-open dyadic cell: atoms only.
double mass_on_square(const DiscMeasure& mu, const DyadicSquare& s);
// mu(S(I)) for the Carleson square over an arc (the whole closed disc for the full circle).
double mass_on_carleson_square(const DiscMeasure& mu, const Arc& arc);

// Family of dyadic arcs and half-shifted dyadic arcs: level k >= 1 has arcs of
// length 2*pi/2^k starting at (j + shift/2)*2*pi/2^k, j = 0..2^k-1, shift in {0,1}.
struct FamilyArc {
    int level = 1;
    int shift = 0;
    std::int64_t index = 0;

    Arc arc() const;
    // Parent at level-1 containing this arc (level >= 2).
    FamilyArc parent() const;
    // Arcs at level+1 whose parent() is this arc; every family arc has exactly one parent.
    std::vector<FamilyArc> children() const;

    friend bool operator==(const FamilyArc&, const FamilyArc&) = default;
};

inline constexpr int kMaxFamilyDepth = 24;

struct ArcRatio {
    FamilyArc family;
    Arc arc;
    double mass = 0.0;
    double ratio = 0.0;  // mass / |I|
};

// Candidate family arcs at one level that realize the level maximum of mu(S(I))/|I|.
std::vector<FamilyArc> candidate_arcs(const DiscMeasure& mu, int level);

// Largest ratio over the family arcs at one level.
ArcRatio level_maximum(const DiscMeasure& mu, int level);

struct CarlesonEstimate {
    double value = 0.0;  // lower bound for M_mu
    int depth = 0;
    ArcRatio witness;
    std::vector<double> level_max;  // index k-1 holds the level-k maximum
    double family_factor = kFamilyFactor;
    std::string convention = kLengthConvention;
};

CarlesonEstimate carleson_constant(const DiscMeasure& mu, int depth);

enum class Verdict { holds_at_resolution, fails_with_witness, inconclusive };

const char* to_string(Verdict v);

struct CarlesonProfile {
    std::vector<double> delta;  // 2*pi/2^k, k = 1..depth (decreasing)
    std::vector<double> eta;    // sup of ratios over family arcs with |I| <= delta
    std::vector<ArcRatio> argmax;
    double family_factor = kFamilyFactor;
    // holds: eta at the finest delta is at most decay_threshold * max eta (or eta == 0);
    // fails: eta at the finest delta is at least half of eta at the middle delta.
    Verdict verdict = Verdict::inconclusive;
    double decay_threshold = 1e-2;
};

CarlesonProfile vanishing_profile(const DiscMeasure& mu, int depth, double decay_threshold = 1e-2);

}  // namespace modelspace
