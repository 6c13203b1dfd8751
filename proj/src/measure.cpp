#include "modelspace/measure.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "modelspace/errors.hpp"
#include "modelspace/summation.hpp"

namespace modelspace {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::holds_at_resolution: return "holds_at_resolution";
        case Verdict::fails_with_witness: return "fails_with_witness";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

DiscMeasure::DiscMeasure(std::vector<MeasureAtom> atoms, std::vector<DensityPiece> density)
    : atoms_(std::move(atoms)), density_(std::move(density)) {
    validate();
}

DiscMeasure DiscMeasure::arc_measure() { return DiscMeasure({}, {DensityPiece{make_arc(0.0, kTwoPi), 1.0}}); }

void DiscMeasure::validate() {
    for (const auto& a : atoms_) {
        if (!(a.mass > 0.0) || !std::isfinite(a.mass)) throw InvalidArgument("measure atom mass must be finite and > 0");
        if (std::abs(a.point) > 1.0 + 1e-12) throw InvalidArgument("measure atom outside the closed disc");
    }
    std::vector<DensityPiece> kept;
    for (const auto& d : density_) {
        if (!(d.density >= 0.0) || !std::isfinite(d.density)) throw InvalidArgument("density must be finite and >= 0");
        if (!(d.arc.length() > 0.0)) throw InvalidArgument("density arc must have positive length");
        if (d.density > 0.0) kept.push_back(d);
    }
    density_ = std::move(kept);
    for (std::size_t i = 0; i < density_.size(); ++i) {
        for (std::size_t j = i + 1; j < density_.size(); ++j) {
            if (density_[i].arc.overlap(density_[j].arc) > 1e-12) {
                throw InvalidArgument("density arcs must have pairwise disjoint interiors");
            }
        }
    }
}

double DiscMeasure::total_mass() const {
    CompensatedSum s;
    for (const auto& a : atoms_) s += a.mass;
    for (const auto& d : density_) s += d.density * d.arc.measure();
    return s.value();
}

DiscMeasure DiscMeasure::restricted(const std::function<bool(Complex)>& keep, const std::vector<Arc>& arcs) const {
    std::vector<MeasureAtom> atoms;
    for (const auto& a : atoms_) {
        if (keep(a.point)) atoms.push_back(a);
    }
    std::vector<DensityPiece> pieces;
    for (const auto& d : density_) {
        for (const auto& arc : arcs) {
            // Intersections of two arcs: at most two pieces, one per lift.
            if (arc.length() >= kTwoPi) {
                pieces.push_back(d);
                continue;
            }
            if (d.arc.length() >= kTwoPi) {
                pieces.push_back({arc, d.density});
                continue;
            }
            const double s = canonical_angle(arc.start - d.arc.start);
            for (double shift : {s - kTwoPi, s}) {
                const double lo = std::max(0.0, shift);
                const double hi = std::min(d.arc.length(), shift + arc.length());
                if (hi > lo) pieces.push_back({make_arc(d.arc.start + lo, d.arc.start + hi), d.density});
            }
        }
    }
    return DiscMeasure(std::move(atoms), std::move(pieces));
}

DiscMeasure DiscMeasure::plus(const DiscMeasure& other) const {
    auto atoms = atoms_;
    atoms.insert(atoms.end(), other.atoms_.begin(), other.atoms_.end());
    auto all = density_;
    all.insert(all.end(), other.density_.begin(), other.density_.end());
    // Overlapping densities add: split the circle at every endpoint.
    std::vector<double> cuts{0.0};
    for (const auto& d : all) {
        cuts.push_back(canonical_angle(d.arc.start));
        cuts.push_back(canonical_angle(d.arc.end));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cuts.push_back(kTwoPi);
    std::vector<DensityPiece> density;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (!(cuts[i + 1] > cuts[i])) continue;
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        double value = 0.0;
        for (const auto& d : all) {
            if (d.arc.contains_interior(mid)) value += d.density;
        }
        if (value <= 0.0) continue;
        if (!density.empty() && density.back().density == value && density.back().arc.end == cuts[i]) {
            density.back().arc.end = cuts[i + 1];
        } else {
            density.push_back({make_arc(cuts[i], cuts[i + 1]), value});
        }
    }
    return DiscMeasure(std::move(atoms), std::move(density));
}

double density_mass_on_arc(const DiscMeasure& mu, const Arc& arc) {
    CompensatedSum s;
    for (const auto& d : mu.density()) s += d.density * d.arc.overlap(arc) / kTwoPi;
    return s.value();
}

double mass_on_square(const DiscMeasure& mu, const GenericSquare& sq) {
    CompensatedSum s;
    for (const auto& a : mu.atoms()) {
        if (sq.contains(a.point)) s += a.mass;
    }
    if (sq.h0 == 1.0) s += density_mass_on_arc(mu, sq.lower_side());
    return s.value();
}

double mass_on_square(const DiscMeasure& mu, const DyadicSquare& sq) {
    CompensatedSum s;
    for (const auto& a : mu.atoms()) {
        if (std::abs(a.point) < 1.0 && sq.contains(a.point)) s += a.mass;
    }
    return s.value();
}

double mass_on_carleson_square(const DiscMeasure& mu, const Arc& arc) {
    if (arc.length() >= kTwoPi) return mu.total_mass();
    return mass_on_square(mu, carleson_square(arc));
}

// ---------------------------------------------------------------------------
// Arc family

namespace {

double level_length(int level) { return kTwoPi * std::ldexp(1.0, -level); }

std::int64_t wrap_index(std::int64_t j, int level) {
    const std::int64_t n = std::int64_t{1} << level;
    j %= n;
    return j < 0 ? j + n : j;
}

void check_level(int level) {
    if (level < 1 || level > 62) throw InvalidArgument("family level out of range");
}

// Family arcs at `level` whose closure contains the angle.
void arcs_containing(double angle, int level, std::vector<FamilyArc>& out) {
    const double len = level_length(level);
    for (int shift = 0; shift < 2; ++shift) {
        const double x = canonical_angle(angle) / len - 0.5 * shift;
        const auto j = static_cast<std::int64_t>(std::floor(x));
        const double frac = x - std::floor(x);
        out.push_back({level, shift, wrap_index(j, level)});
        if (frac < 1e-9) out.push_back({level, shift, wrap_index(j - 1, level)});
        if (frac > 1.0 - 1e-9) out.push_back({level, shift, wrap_index(j + 1, level)});
    }
}

}  // namespace

Arc FamilyArc::arc() const {
    check_level(level);
    const double len = level_length(level);
    const double start = (static_cast<double>(index) + 0.5 * shift) * len;
    return make_arc(start, start + len);
}

FamilyArc FamilyArc::parent() const {
    if (level < 2) throw InvalidArgument("family arcs at level 1 have no parent");
    if (shift == 0 || index % 2 == 0) return {level - 1, 0, wrap_index(index / 2, level - 1)};
    return {level - 1, 1, wrap_index((index - 1) / 2, level - 1)};
}

std::vector<FamilyArc> FamilyArc::children() const {
    if (shift == 0) return {{level + 1, 0, 2 * index}, {level + 1, 0, 2 * index + 1}, {level + 1, 1, 2 * index}};
    return {{level + 1, 1, 2 * index + 1}};
}

std::vector<FamilyArc> candidate_arcs(const DiscMeasure& mu, int level) {
    check_level(level);
    std::vector<FamilyArc> out;
    const double len = level_length(level);
    const double rho_min = 1.0 - len / kTwoPi;
    for (const auto& a : mu.atoms()) {
        if (std::abs(a.point) >= rho_min && std::abs(a.point) > 0.0) arcs_containing(std::arg(a.point), level, out);
    }
    for (const auto& d : mu.density()) {
        arcs_containing(d.arc.start, level, out);
        arcs_containing(d.arc.end, level, out);
        for (int shift = 0; shift < 2; ++shift) {
            // First family arc starting inside the piece.
            const double x = d.arc.start / len - 0.5 * shift;
            const auto j = static_cast<std::int64_t>(std::ceil(x - 1e-12));
            const double rel = (static_cast<double>(j) + 0.5 * shift) * len - d.arc.start;
            if (rel + len <= d.arc.length() + 1e-12) out.push_back({level, shift, wrap_index(j, level)});
        }
    }
    std::sort(out.begin(), out.end(), [](const FamilyArc& x, const FamilyArc& y) {
        return std::tie(x.shift, x.index) < std::tie(y.shift, y.index);
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ArcRatio level_maximum(const DiscMeasure& mu, int level) {
    ArcRatio best;
    best.family = {level, 0, 0};
    best.arc = best.family.arc();
    for (const auto& f : candidate_arcs(mu, level)) {
        const Arc arc = f.arc();
        const double m = mass_on_carleson_square(mu, arc);
        const double ratio = m / arc.length();
        if (ratio > best.ratio) best = ArcRatio{f, arc, m, ratio};
    }
    return best;
}

CarlesonEstimate carleson_constant(const DiscMeasure& mu, int depth) {
    if (depth < 1 || depth > kMaxFamilyDepth) throw InvalidArgument("carleson_constant: depth must lie in [1, 24]");
    CarlesonEstimate est;
    est.depth = depth;
    est.witness.family = {1, 0, 0};
    est.witness.arc = est.witness.family.arc();
    for (int k = 1; k <= depth; ++k) {
        const auto lm = level_maximum(mu, k);
        est.level_max.push_back(lm.ratio);
        if (lm.ratio > est.value) {
            est.value = lm.ratio;
            est.witness = lm;
        }
    }
    return est;
}

CarlesonProfile vanishing_profile(const DiscMeasure& mu, int depth, double decay_threshold) {
    if (depth < 2 || depth > kMaxFamilyDepth) throw InvalidArgument("vanishing_profile: depth must lie in [2, 24]");
    CarlesonProfile prof;
    prof.decay_threshold = decay_threshold;
    std::vector<ArcRatio> per_level;
    for (int k = 1; k <= depth; ++k) per_level.push_back(level_maximum(mu, k));
    prof.delta.resize(depth);
    prof.eta.resize(depth);
    prof.argmax.resize(depth);
    ArcRatio run = per_level.back();
    for (int k = depth; k >= 1; --k) {
        if (per_level[k - 1].ratio > run.ratio) run = per_level[k - 1];
        prof.delta[k - 1] = level_length(k);
        prof.eta[k - 1] = run.ratio;
        prof.argmax[k - 1] = run;
    }
    const double top = prof.eta.front();
    const double finest = prof.eta.back();
    const double middle = prof.eta[depth / 2];
    if (top == 0.0 || finest <= decay_threshold * top) {
        prof.verdict = Verdict::holds_at_resolution;
    } else if (finest >= 0.5 * middle) {
        prof.verdict = Verdict::fails_with_witness;
    }
    return prof;
}

}  // namespace modelspace
