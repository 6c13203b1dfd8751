#include "modelspace/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <utility>

#include "modelspace/errors.hpp"
#include "modelspace/kernels.hpp"
#include "modelspace/level_set.hpp"
#include "modelspace/quadrature.hpp"
#include "modelspace/spectral.hpp"
#include "modelspace/summation.hpp"

namespace modelspace {

const char* to_string(CriterionId id) {
    switch (id) {
        case CriterionId::carleson: return "carleson";
        case CriterionId::vanishing: return "vanishing";
        case CriterionId::volberg_treil: return "volberg_treil";
        case CriterionId::V1: return "V1";
        case CriterionId::V2: return "V2";
        case CriterionId::thm31_bounded: return "thm31_bounded";
        case CriterionId::thm31_compact: return "thm31_compact";
        case CriterionId::schatten_sufficient: return "schatten_sufficient";
        case CriterionId::schatten_necessary: return "schatten_necessary";
        case CriterionId::luecking: return "luecking";
        case CriterionId::thm54_family: return "thm54_family";
        case CriterionId::thm14: return "thm14";
    }
    return "unknown";
}

const char* to_string(WitnessKind kind) {
    switch (kind) {
        case WitnessKind::family_arc: return "family_arc";
        case WitnessKind::square: return "square";
        case WitnessKind::dyadic_cell: return "dyadic_cell";
    }
    return "square";
}

bool verify_witness(const DiscMeasure& mu, const Witness& w, double rel_tol) {
    if (!(w.length > 0.0)) return false;
    double mass = 0.0;
    switch (w.kind) {
        case WitnessKind::family_arc: mass = mass_on_carleson_square(mu, w.family.arc()); break;
        case WitnessKind::square: mass = mass_on_square(mu, w.square); break;
        case WitnessKind::dyadic_cell: mass = mass_on_square(mu, w.cell); break;
    }
    if (mass < w.mass * (1.0 - rel_tol)) return false;
    return mass / w.length > w.threshold;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Witness arc_witness(const ArcRatio& a, double threshold, std::string reason) {
    Witness w;
    w.kind = WitnessKind::family_arc;
    w.family = a.family;
    w.square = carleson_square(a.arc);
    w.mass = a.mass;
    w.length = a.arc.length();
    w.ratio = a.ratio;
    w.threshold = threshold;
    w.reason = std::move(reason);
    return w;
}

ArcRatio arc_ratio(const DiscMeasure& mu, const FamilyArc& f) {
    ArcRatio r;
    r.family = f;
    r.arc = f.arc();
    r.mass = mass_on_carleson_square(mu, r.arc);
    r.ratio = r.mass / r.arc.length();
    return r;
}

void check_depth(int depth, int lo, const char* who) {
    if (depth < lo || depth > kMaxFamilyDepth) {
        throw InvalidArgument(std::string(who) + ": depth must lie in [" + std::to_string(lo) + ", 24]");
    }
}

void check_epsilon(double epsilon, const char* who) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument(std::string(who) + ": epsilon must lie in (0,1)");
}

std::string format_point(Complex z) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%.9g, %.9g)", z.real(), z.imag());
    return buf;
}

// Largest value on levels 1..depth/2 and on depth/2+1..depth.
std::pair<double, double> early_late(const std::vector<double>& level_max) {
    const std::size_t half = level_max.size() / 2;
    double early = 0.0;
    double late = 0.0;
    for (std::size_t i = 0; i < level_max.size(); ++i) {
        double& slot = i < half ? early : late;
        slot = std::max(slot, level_max[i]);
    }
    return {early, late};
}

// Family arcs whose Carleson squares carry mass and meet Omega, level by level.
struct MeetingLevel {
    std::vector<ArcRatio> certified;
    std::vector<ArcRatio> undecided;
};

struct MeetingScan {
    std::vector<MeetingLevel> levels;
    bool truncated = false;
};

constexpr std::size_t kScanBudget = std::size_t{1} << 15;

MeetingScan scan_meeting_arcs(const InnerFunction& theta, double epsilon, const DiscMeasure& mu, int depth) {
    MeetingScan scan;
    std::vector<FamilyArc> frontier{{1, 0, 0}, {1, 0, 1}, {1, 1, 0}, {1, 1, 1}};
    std::size_t visited = 0;
    for (int k = 1; k <= depth && !frontier.empty(); ++k) {
        if (visited + frontier.size() > kScanBudget) {
            scan.truncated = true;
            break;
        }
        MeetingLevel level;
        std::vector<FamilyArc> next;
        for (const auto& f : frontier) {
            ++visited;
            const ArcRatio ar = arc_ratio(mu, f);
            if (!(ar.mass > 0.0)) continue;
            const Certified c = box_meets_level_set(theta, epsilon, carleson_square(ar.arc).box());
            if (c == Certified::no) continue;
            (c == Certified::yes ? level.certified : level.undecided).push_back(ar);
            if (k < depth) {
                for (const auto& ch : f.children()) next.push_back(ch);
            }
        }
        scan.levels.push_back(std::move(level));
        frontier = std::move(next);
    }
    while (!scan.truncated && static_cast<int>(scan.levels.size()) < depth) scan.levels.emplace_back();
    return scan;
}

const ArcRatio* best_of(const std::vector<ArcRatio>& arcs) {
    const ArcRatio* best = nullptr;
    for (const auto& a : arcs) {
        if (best == nullptr || a.ratio > best->ratio) best = &a;
    }
    return best;
}

void fill_scan_profile(ConditionReport& rep, const MeetingScan& scan) {
    auto& sup = rep.profile["level_sup"];
    auto& und = rep.profile["level_undecided"];
    for (const auto& lv : scan.levels) {
        const ArcRatio* b = best_of(lv.certified);
        sup.push_back(b ? b->ratio : 0.0);
        und.push_back(static_cast<double>(lv.undecided.size()));
        rep.undecided += lv.undecided.size();
    }
    if (scan.truncated) rep.notes.push_back("arc scan stopped at the node budget");
}

// ---------------------------------------------------------------------------
// Arc unions on the circle

struct Interval {
    double lo;
    double hi;
};

std::vector<Interval> unwrap(const std::vector<Arc>& arcs) {
    std::vector<Interval> out;
    for (const auto& a : arcs) {
        if (a.length() >= kTwoPi) return {{0.0, kTwoPi}};
        if (a.end <= kTwoPi) {
            out.push_back({a.start, a.end});
        } else {
            out.push_back({a.start, kTwoPi});
            out.push_back({0.0, a.end - kTwoPi});
        }
    }
    std::sort(out.begin(), out.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    std::vector<Interval> merged;
    for (const auto& iv : out) {
        if (!merged.empty() && iv.lo <= merged.back().hi) {
            merged.back().hi = std::max(merged.back().hi, iv.hi);
        } else {
            merged.push_back(iv);
        }
    }
    return merged;
}

std::vector<Arc> rewrap(std::vector<Interval> ivs) {
    std::vector<Arc> out;
    if (ivs.empty()) return out;
    if (ivs.size() == 1 && ivs[0].lo <= 0.0 && ivs[0].hi >= kTwoPi) return {make_arc(0.0, kTwoPi)};
    if (ivs.size() > 1 && ivs.front().lo <= 0.0 && ivs.back().hi >= kTwoPi) {
        ivs.back().hi = kTwoPi + ivs.front().hi;
        ivs.erase(ivs.begin());
    }
    for (const auto& iv : ivs) {
        if (iv.hi > iv.lo) out.push_back(make_arc(iv.lo, iv.hi));
    }
    return out;
}

std::vector<Arc> merge_arcs(const std::vector<Arc>& arcs) { return rewrap(unwrap(arcs)); }

std::vector<Arc> complement_arcs(const std::vector<Arc>& arcs) {
    const auto covered = unwrap(arcs);
    std::vector<Interval> gaps;
    double at = 0.0;
    for (const auto& iv : covered) {
        if (iv.lo > at) gaps.push_back({at, iv.lo});
        at = std::max(at, iv.hi);
    }
    if (at < kTwoPi) gaps.push_back({at, kTwoPi});
    return rewrap(gaps);
}

std::vector<Arc> whitney_arcs(const WhitneyDecomposition& w) {
    std::vector<Arc> arcs;
    arcs.reserve(w.arcs.size());
    for (const auto& a : w.arcs) arcs.push_back(a.arc);
    return arcs;
}

// Angular distance from an angle to the closed arc (0 inside).
double angle_to_arc(double angle, const Arc& a) {
    if (a.contains(angle)) return 0.0;
    return std::min(angular_gap(angle, a.start), angular_gap(angle, a.end));
}

// Is the closed square within chord distance < delta of a boundary spectrum point?
bool square_near_spectrum(const InnerFunction& theta, const GenericSquare& s, double delta) {
    const PolarBox b = s.box();
    for (double t : theta.boundary_spectrum()) {
        const double far = t + kPi;
        const double lo = b.phi_lo;
        const double shifted = far - kTwoPi * std::floor((far - lo) / kTwoPi);
        if (shifted <= b.phi_hi) continue;
        const Complex spec = std::polar(1.0, t);
        double worst = 0.0;
        for (double rho : {b.rho_lo, b.rho_hi}) {
            for (double phi : {b.phi_lo, b.phi_hi}) worst = std::max(worst, std::abs(std::polar(rho, phi) - spec));
        }
        if (worst < delta) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Sums

// Partial sums in term order (per term, or per block when terms come in block
// order), block sums and ratios, and the trend verdict. A complete sum has no
// terms beyond the resolution and always holds. Otherwise the last window of
// three blocks among the first `used` ones is compared with the window before
// it. Returns the index of the largest term of the last window when the trend
// fails.
struct TrendWindow {
    std::size_t lo = 0;
    std::size_t hi = 0;
    double previous = 0.0;
};

std::optional<std::size_t> finish_sum(CriterionSum& s, const std::vector<double>& terms,
                                      const std::vector<std::size_t>& block_of, std::size_t block_count,
                                      bool per_term_partials, bool complete, std::size_t used, TrendWindow& window) {
    std::vector<CompensatedSum> blocks(block_count);
    CompensatedSum total;
    s.partial_sums.clear();
    for (std::size_t i = 0; i < terms.size(); ++i) {
        blocks[block_of[i]].add(terms[i]);
        total.add(terms[i]);
        if (per_term_partials) s.partial_sums.push_back(total.value());
    }
    s.block_sums.clear();
    s.block_ratios.clear();
    CompensatedSum running;
    for (const auto& b : blocks) {
        s.block_sums.push_back(b.value());
        running.add(b.value());
        if (!per_term_partials) s.partial_sums.push_back(running.value());
    }
    for (std::size_t i = 1; i < s.partial_sums.size(); ++i) {
        s.partial_sums[i] = std::max(s.partial_sums[i], s.partial_sums[i - 1]);
    }
    for (std::size_t i = 1; i < s.block_sums.size(); ++i) {
        const double prev = s.block_sums[i - 1];
        s.block_ratios.push_back(prev > 0.0 ? s.block_sums[i] / prev : (s.block_sums[i] > 0.0 ? kInf : 0.0));
    }
    s.value = total.value();
    s.params["complete"] = complete ? 1.0 : 0.0;

    used = std::min(used, block_count);
    if (complete || used < 2) {
        s.trend = Verdict::holds_at_resolution;
        return std::nullopt;
    }
    const std::size_t width = std::min<std::size_t>(3, used / 2);
    double last = 0.0;
    double prev = 0.0;
    for (std::size_t i = used - width; i < used; ++i) last += s.block_sums[i];
    for (std::size_t i = used - std::min(used, 2 * width); i < used - width; ++i) prev += s.block_sums[i];
    s.params["window_ratio"] = prev > 0.0 ? last / prev : (last > 0.0 ? kInf : 0.0);
    if (last == 0.0 || (prev > 0.0 && last <= 0.5 * prev)) {
        s.trend = Verdict::holds_at_resolution;
        return std::nullopt;
    }
    if (!(prev > 0.0 && last >= 0.8 * prev)) {
        s.trend = Verdict::inconclusive;
        return std::nullopt;
    }
    s.trend = Verdict::fails_with_witness;
    window = {used - width, used, prev};
    std::optional<std::size_t> arg;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const bool inside = block_of[i] >= window.lo && block_of[i] < window.hi;
        if (inside && (!arg || terms[i] > terms[*arg])) arg = i;
    }
    return arg;
}

// Per-term budget that would make the last window half the previous one, as a
// normalized mass: (previous / (2 n_last))^{2/r}.
double term_budget(const TrendWindow& window, const std::vector<std::size_t>& block_of, double r) {
    const auto count = std::count_if(block_of.begin(), block_of.end(),
                                     [&](std::size_t b) { return b >= window.lo && b < window.hi; });
    return std::pow(0.5 * window.previous / static_cast<double>(count), 2.0 / r);
}

void check_r(double r, const char* who) {
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument(std::string(who) + ": r must be positive and finite");
}

// Atoms with |z| < 1 grouped by dyadic cell up to the given level, ordered by (level, index).
std::map<std::pair<int, std::int64_t>, double> cell_masses(const DiscMeasure& mu, int depth) {
    std::map<std::pair<int, std::int64_t>, double> out;
    for (const auto& a : mu.atoms()) {
        if (!(std::abs(a.point) < 1.0)) continue;
        const DyadicSquare c = dyadic_locate(a.point);
        if (c.level <= depth) out[{c.level, c.index}] += a.mass;
    }
    return out;
}

enum class CellFilter { all, meets, near };

CriterionSum dyadic_sum(CriterionId id, const InnerFunction* theta, double epsilon, double A,
                        const DiscMeasure& mu, double r, int depth, CellFilter filter) {
    CriterionSum s;
    s.id = id;
    s.params = {{"r", r}, {"depth", static_cast<double>(depth)}};
    if (filter != CellFilter::all) s.params["epsilon"] = epsilon;
    if (filter == CellFilter::near) s.params["A"] = A;

    std::vector<double> terms;
    std::vector<std::size_t> block_of;
    std::vector<DyadicSquare> cells;
    std::vector<double> masses;
    CompensatedSum undecided_value;
    for (const auto& [key, mass] : cell_masses(mu, depth)) {
        const DyadicSquare cell{key.first, key.second};
        const double term = std::pow(std::ldexp(mass, cell.level), 0.5 * r);
        Certified c = Certified::yes;
        if (filter != CellFilter::all) {
            c = box_meets_level_set(*theta, epsilon, cell.box());
            if (filter == CellFilter::near && c != Certified::yes) {
                c = box_within_distance(*theta, epsilon, cell.box(), A * std::ldexp(1.0, -cell.level));
            }
        }
        if (c == Certified::no) continue;
        if (c == Certified::undecided) {
            ++s.undecided;
            undecided_value.add(term);
            continue;
        }
        terms.push_back(term);
        block_of.push_back(static_cast<std::size_t>(cell.level - 1));
        cells.push_back(cell);
        masses.push_back(mass);
    }
    s.terms = terms.size();
    s.undecided_value = undecided_value.value();
    const bool complete = std::none_of(mu.atoms().begin(), mu.atoms().end(), [&](const MeasureAtom& a) {
        return std::abs(a.point) < 1.0 && dyadic_locate(a.point).level > depth;
    });
    TrendWindow window;
    if (const auto arg = finish_sum(s, terms, block_of, static_cast<std::size_t>(depth), false, complete, depth, window)) {
        const DyadicSquare& cell = cells[*arg];
        Witness w;
        w.kind = WitnessKind::dyadic_cell;
        w.cell = cell;
        w.square = make_square(cell.rho_hi(), cell.phi_lo(), cell.phi_hi() - cell.phi_lo());
        w.mass = masses[*arg];
        w.length = std::ldexp(1.0, -cell.level);
        w.ratio = w.mass / w.length;
        w.threshold = term_budget(window, block_of, r);
        w.reason = "term of the deepest levels exceeds the budget of a halving window";
        s.witness = w;
    }
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Carleson-type conditions

ConditionReport check_carleson(const DiscMeasure& mu, int depth) {
    check_depth(depth, 2, "check_carleson");
    ConditionReport rep;
    rep.id = CriterionId::carleson;
    rep.params = {{"depth", static_cast<double>(depth)}, {"family_factor", kFamilyFactor}};
    const CarlesonEstimate est = carleson_constant(mu, depth);
    rep.profile["level_max"] = est.level_max;
    rep.params["estimate"] = est.value;
    const auto [early, late] = early_late(est.level_max);
    rep.verdict = Verdict::holds_at_resolution;
    if (late > 2.0 * early * (1.0 + 1e-9)) {
        for (int k = depth / 2 + 1; k <= depth; ++k) {
            if (est.level_max[k - 1] > 2.0 * early * (1.0 + 1e-9)) {
                rep.verdict = Verdict::fails_with_witness;
                rep.witness = arc_witness(level_maximum(mu, k), 2.0 * early,
                                          "ratio on a deep level exceeds twice the coarse-level maximum");
                break;
            }
        }
    }
    return rep;
}

ConditionReport check_vanishing(const DiscMeasure& mu, int depth, double decay_threshold) {
    ConditionReport rep;
    rep.id = CriterionId::vanishing;
    const CarlesonProfile prof = vanishing_profile(mu, depth, decay_threshold);
    rep.params = {{"depth", static_cast<double>(depth)}, {"decay_threshold", decay_threshold},
                  {"family_factor", kFamilyFactor}};
    rep.profile["delta"] = prof.delta;
    rep.profile["eta"] = prof.eta;
    rep.verdict = prof.verdict;
    if (prof.verdict == Verdict::fails_with_witness) {
        rep.witness = arc_witness(prof.argmax.back(), decay_threshold * prof.eta.front(),
                                  "ratio at the finest scale has not decayed");
    }
    return rep;
}

ConditionReport check_volberg_treil(const InnerFunction& theta, double epsilon, const DiscMeasure& mu, int depth,
                                    std::optional<double> threshold) {
    check_epsilon(epsilon, "check_volberg_treil");
    check_depth(depth, threshold ? 1 : 2, "check_volberg_treil");
    ConditionReport rep;
    rep.id = CriterionId::volberg_treil;
    rep.params = {{"epsilon", epsilon}, {"depth", static_cast<double>(depth)}, {"family_factor", kFamilyFactor}};
    const MeetingScan scan = scan_meeting_arcs(theta, epsilon, mu, depth);
    fill_scan_profile(rep, scan);
    const auto& sup = rep.profile["level_sup"];

    double bound = 0.0;
    int first_level = 1;
    if (threshold) {
        bound = *threshold;
        rep.params["threshold"] = bound;
    } else {
        const auto [early, late] = early_late(sup);
        bound = 2.0 * early;
        first_level = depth / 2 + 1;
        rep.params["early_max"] = early;
        rep.params["late_max"] = late;
    }
    rep.params["sup"] = sup.empty() ? 0.0 : *std::max_element(sup.begin(), sup.end());

    for (int k = first_level; k <= static_cast<int>(scan.levels.size()); ++k) {
        const ArcRatio* b = best_of(scan.levels[k - 1].certified);
        if (b && b->ratio > bound * (1.0 + 1e-9)) {
            rep.verdict = Verdict::fails_with_witness;
            rep.witness = arc_witness(*b, bound, threshold ? "ratio exceeds the supplied constant"
                                                           : "ratio on a deep level exceeds twice the coarse-level maximum");
            return rep;
        }
    }
    bool undecided_over = false;
    for (const auto& lv : scan.levels) {
        const ArcRatio* b = best_of(lv.undecided);
        if (b && b->ratio > bound) undecided_over = true;
    }
    rep.verdict = (scan.truncated || undecided_over) ? Verdict::inconclusive : Verdict::holds_at_resolution;
    return rep;
}

ConditionReport check_V2(const InnerFunction& theta, double epsilon, const DiscMeasure& mu, int depth) {
    check_epsilon(epsilon, "check_V2");
    check_depth(depth, 1, "check_V2");
    ConditionReport rep;
    rep.id = CriterionId::V2;
    const double tau = kVanishingScale * carleson_constant(mu, depth).value;
    rep.params = {{"epsilon", epsilon}, {"depth", static_cast<double>(depth)}, {"tau", tau},
                  {"family_factor", kFamilyFactor}};
    const MeetingScan scan = scan_meeting_arcs(theta, epsilon, mu, depth);
    fill_scan_profile(rep, scan);
    auto eta = rep.profile["level_sup"];
    for (int i = static_cast<int>(eta.size()) - 2; i >= 0; --i) eta[i] = std::max(eta[i], eta[i + 1]);
    std::vector<double> delta;
    for (std::size_t k = 1; k <= eta.size(); ++k) delta.push_back(kTwoPi * std::ldexp(1.0, -static_cast<int>(k)));
    rep.profile["delta"] = delta;
    rep.profile["eta"] = eta;

    if (scan.truncated) return rep;
    const MeetingLevel& finest = scan.levels.back();
    const ArcRatio* b = best_of(finest.certified);
    if (b && b->ratio > tau * (1.0 + 1e-9)) {
        rep.verdict = Verdict::fails_with_witness;
        rep.witness = arc_witness(*b, tau, "Omega-meeting square at the finest level above tau");
        return rep;
    }
    const ArcRatio* u = best_of(finest.undecided);
    rep.verdict = (u && u->ratio > tau) ? Verdict::inconclusive : Verdict::holds_at_resolution;
    return rep;
}

DiscMeasure restrict_near_spectrum(const InnerFunction& theta, const DiscMeasure& mu, double delta) {
    if (!(delta > 0.0)) throw InvalidArgument("restrict_near_spectrum: delta must be positive");
    const auto& spec = theta.boundary_spectrum();
    if (spec.empty()) return DiscMeasure{};
    std::vector<Arc> arcs;
    if (delta >= 2.0) {
        arcs.push_back(make_arc(0.0, kTwoPi));
    } else {
        const double half = 2.0 * std::asin(0.5 * delta);
        for (double t : spec) arcs.push_back(arc_from_mid(t, 2.0 * half));
    }
    return mu.restricted([&](Complex z) { return boundary_spectrum_distance(theta, z) < delta; }, merge_arcs(arcs));
}

ConditionReport check_V1(const InnerFunction& theta, const DiscMeasure& mu, const std::vector<double>& delta_grid,
                         double epsilon, int depth) {
    check_epsilon(epsilon, "check_V1");
    check_depth(depth, 1, "check_V1");
    if (delta_grid.empty()) throw InvalidArgument("check_V1: empty delta grid");
    const double finest_length = kTwoPi * std::ldexp(1.0, -depth);
    std::vector<double> grid;
    for (double d : delta_grid) {
        if (!(d > 0.0)) throw InvalidArgument("check_V1: delta values must be positive");
        if (d >= finest_length) grid.push_back(d);
    }
    if (grid.empty()) throw InvalidArgument("check_V1: every delta is below the finest arc length at this depth");
    std::sort(grid.begin(), grid.end(), std::greater<>());

    ConditionReport rep;
    rep.id = CriterionId::V1;
    const double tau = kVanishingScale * carleson_constant(mu, depth).value;
    rep.params = {{"epsilon", epsilon}, {"depth", static_cast<double>(depth)}, {"tau", tau},
                  {"family_factor", kFamilyFactor}};
    if (grid.size() < delta_grid.size()) rep.notes.push_back("delta values below the finest arc length skipped");
    if (theta.boundary_spectrum().empty()) rep.notes.push_back("no boundary spectrum; H_delta is empty");

    std::vector<double> estimates;
    CarlesonEstimate finest;
    for (double d : grid) {
        finest = carleson_constant(restrict_near_spectrum(theta, mu, d), depth);
        estimates.push_back(finest.value);
    }
    rep.profile["delta"] = grid;
    rep.profile["carleson_estimate"] = estimates;
    const double m_min = estimates.back();
    const double m_mid = estimates[estimates.size() / 2];

    // Point masses on the circle inside H_delta are never Carleson.
    const DiscMeasure nearest = restrict_near_spectrum(theta, mu, grid.back());
    const MeasureAtom* heaviest = nullptr;
    for (const auto& a : nearest.atoms()) {
        if (!(std::abs(a.point) < 1.0) && (heaviest == nullptr || a.mass > heaviest->mass)) heaviest = &a;
    }
    if (heaviest != nullptr) {
        const double angle = canonical_angle(std::arg(heaviest->point));
        const auto index = static_cast<std::int64_t>(std::floor(angle / finest_length));
        const ArcRatio ar = arc_ratio(nearest, FamilyArc{depth, 0, std::min(index, (std::int64_t{1} << depth) - 1)});
        if (ar.ratio > tau * (1.0 + 1e-9)) {
            rep.verdict = Verdict::fails_with_witness;
            rep.witness = arc_witness(ar, tau, "point mass on the circle within the smallest delta");
            return rep;
        }
    }

    if (m_min > tau) {
        if (m_min >= 0.5 * m_mid) {
            rep.verdict = Verdict::fails_with_witness;
            rep.witness = arc_witness(finest.witness, tau, "Carleson ratio of the restriction at the smallest delta");
        }
        return rep;
    }
    const MeetingScan scan = scan_meeting_arcs(theta, epsilon, mu, depth);
    if (scan.truncated) {
        rep.notes.push_back("arc scan stopped at the node budget");
        return rep;
    }
    std::size_t outside = 0;
    for (const auto* list : {&scan.levels.back().certified, &scan.levels.back().undecided}) {
        for (const auto& a : *list) {
            if (!square_near_spectrum(theta, carleson_square(a.arc), grid.back())) ++outside;
        }
    }
    rep.params["finest_squares_outside"] = static_cast<double>(outside);
    if (outside > 0) {
        rep.notes.push_back("finest Omega-meeting squares with mass lie outside H_delta; resolution too coarse");
        return rep;
    }
    rep.verdict = Verdict::holds_at_resolution;
    return rep;
}

// ---------------------------------------------------------------------------
// Squares with prescribed lower sides

std::vector<GenericSquare> whitney_squares(const WhitneyDecomposition& w) {
    std::vector<GenericSquare> out;
    for (const auto& a : w.arcs) {
        if (a.arc.length() < kTwoPi) out.push_back(carleson_square(a.arc));
    }
    return out;
}

MeasureSplit split_by_whitney(const DiscMeasure& mu, const WhitneyDecomposition& w) {
    const auto arcs = merge_arcs(whitney_arcs(w));
    const auto rest = complement_arcs(arcs);
    MeasureSplit out;
    out.on_squares = mu.restricted([&](Complex z) { return w.in_F(z); }, arcs);
    out.off_squares = mu.restricted([&](Complex z) { return !w.in_F(z); }, rest);
    return out;
}

Thm31Reports check_thm31(const InnerFunction& theta, const std::vector<GenericSquare>& squares,
                         const DiscMeasure& mu, double p, double r, int depth, double tol) {
    if (!(r > 1.0 && r < p && std::isfinite(p))) throw InvalidArgument("check_thm31: need 1 < r < p < inf");
    check_depth(depth, 2, "check_thm31");
    if (squares.empty()) throw InvalidArgument("check_thm31: no squares");
    const double q = p / (p - 1.0);
    const std::size_t n = squares.size();

    std::vector<double> lengths(n), masses(n), ratios(n);
    for (std::size_t k = 0; k < n; ++k) {
        lengths[k] = squares[k].lower_side_length();
        masses[k] = mass_on_square(mu, squares[k]);
        ratios[k] = masses[k] / lengths[k];
    }

    // Mass outside the union of the squares.
    CompensatedSum outside;
    for (const auto& a : mu.atoms()) {
        const bool in = std::any_of(squares.begin(), squares.end(), [&](const GenericSquare& s) { return s.contains(a.point); });
        if (!in) outside.add(a.mass);
    }
    if (!mu.density().empty()) {
        std::vector<Arc> sides;
        for (const auto& s : squares) {
            if (s.h0 == 1.0) sides.push_back(s.lower_side());
        }
        const DiscMeasure boundary({}, mu.density());
        CompensatedSum covered;
        for (const auto& a : merge_arcs(sides)) covered.add(density_mass_on_arc(boundary, a));
        outside.add(std::max(0.0, boundary.total_mass() - covered.value()));
    }
    const double uncovered = outside.value();

    // Sparseness: Carleson ratios of the arc-length measure on the lower sides.
    const int so_depth = std::min(depth, 12);
    std::vector<double> so_level(so_depth, 0.0);
    for (int k = 1; k <= so_depth; ++k) {
        const std::int64_t count = std::int64_t{1} << k;
        for (int shift = 0; shift < 2; ++shift) {
            for (std::int64_t j = 0; j < count; ++j) {
                const Arc I = FamilyArc{k, shift, j}.arc();
                const double rho_min = 1.0 - I.measure();
                CompensatedSum nu;
                for (const auto& s : squares) {
                    if (s.h0 >= rho_min) nu.add(s.h0 * I.overlap(s.lower_side()));
                }
                so_level[k - 1] = std::max(so_level[k - 1], nu.value() / I.length());
            }
        }
    }
    const auto [so_early, so_late] = early_late(so_level);
    const bool so_holds = so_late <= 2.0 * so_early;

    // Size: |J_k| * ||1/w_r||_{L^q(J_k)}^p with dm = |dz|/(2 pi).
    const BernsteinWeightSpec wspec{r, 1, WeightKind::w_pn, 0.5};
    std::vector<double> sd_terms(n);
    for (std::size_t k = 0; k < n; ++k) {
        const GenericSquare& s = squares[k];
        auto inv_pow = [&](double phi) {
            const double w = bernstein_weight(theta, std::polar(s.h0, phi), wspec, 0.1 * tol).value;
            return w > 0.0 ? std::pow(w, -q) : kInf;
        };
        double integral = 0.0;
        try {
            integral = integrate<double>(inv_pow, s.phi0, s.phi0 + s.h, QuadratureOptions{0.0, tol, 400}).value;
        } catch (const QuadratureFailure&) {
            integral = kInf;
        }
        integral *= s.h0 / kTwoPi;
        sd_terms[k] = std::isfinite(integral) ? lengths[k] * std::pow(integral, p / q) : kInf;
    }
    const double sd_sup = *std::max_element(sd_terms.begin(), sd_terms.end());
    const bool sd_holds = std::isfinite(sd_sup);

    std::map<std::string, double> params{{"p", p},
                                         {"r", r},
                                         {"depth", static_cast<double>(depth)},
                                         {"tol", tol},
                                         {"squares", static_cast<double>(n)},
                                         {"so_estimate", std::max(so_early, so_late)},
                                         {"so_holds", so_holds ? 1.0 : 0.0},
                                         {"sd_sup", sd_sup},
                                         {"sd_holds", sd_holds ? 1.0 : 0.0},
                                         {"uncovered_mass", uncovered}};
    std::map<std::string, std::vector<double>> profile{
        {"ratio", ratios}, {"lower_side", lengths}, {"so_level_max", so_level}, {"sd_term", sd_terms}};
    std::vector<std::string> notes;
    if (!so_holds) notes.push_back("lower sides are not sparse at this depth");
    if (!sd_holds) notes.push_back("weight integral diverges on some lower side");
    if (uncovered > 1e-12 * std::max(1.0, mu.total_mass())) notes.push_back("measure is not carried by the squares");
    const bool hypotheses = so_holds && sd_holds && uncovered <= 1e-12 * std::max(1.0, mu.total_mass());

    auto square_witness = [&](std::size_t k, double threshold, const char* reason) {
        Witness w;
        w.kind = WitnessKind::square;
        w.square = squares[k];
        w.mass = masses[k];
        w.length = lengths[k];
        w.ratio = ratios[k];
        w.threshold = threshold;
        w.reason = reason;
        return w;
    };

    Thm31Reports out;
    for (auto* rep : {&out.bounded, &out.compact}) {
        rep->params = params;
        rep->profile = profile;
        rep->notes = notes;
    }
    out.bounded.id = CriterionId::thm31_bounded;
    out.compact.id = CriterionId::thm31_compact;

    const double C = std::ldexp(1.0, depth / 2);
    out.bounded.params["C"] = C;
    std::optional<std::size_t> worst;
    for (std::size_t k = 0; k < n; ++k) {
        if (ratios[k] > C && (!worst || lengths[k] > lengths[*worst])) worst = k;
    }
    if (worst) {
        out.bounded.verdict = Verdict::fails_with_witness;
        out.bounded.witness = square_witness(*worst, C, "mass ratio above the constant");
    } else {
        out.bounded.verdict = hypotheses ? Verdict::holds_at_resolution : Verdict::inconclusive;
    }

    const std::size_t quarter = std::max<std::size_t>(1, n / 4);
    double first = 0.0;
    for (std::size_t k = 0; k < quarter; ++k) first = std::max(first, ratios[k]);
    std::size_t last_arg = n - quarter;
    for (std::size_t k = n - quarter; k < n; ++k) {
        if (ratios[k] > ratios[last_arg]) last_arg = k;
    }
    const double threshold = 0.5 * first;
    out.compact.params["first_quarter_max"] = first;
    out.compact.params["last_quarter_max"] = ratios[last_arg];
    if (ratios[last_arg] > threshold) {
        out.compact.verdict = Verdict::fails_with_witness;
        out.compact.witness = square_witness(last_arg, threshold, "ratio in the last quarter has not halved");
    } else {
        out.compact.verdict = hypotheses ? Verdict::holds_at_resolution : Verdict::inconclusive;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Schatten sums

CriterionSum schatten_sufficient_sum(const WhitneyDecomposition& w, const DiscMeasure& mu, double r) {
    check_r(r, "schatten_sufficient_sum");
    CriterionSum s;
    s.id = CriterionId::schatten_sufficient;
    s.params = {{"r", r}, {"epsilon", w.epsilon}, {"arcs", static_cast<double>(w.arcs.size())}};

    std::vector<double> terms;
    std::vector<double> ratios;
    std::vector<std::size_t> block_of;
    std::size_t block_count = 0;
    for (const auto& wa : w.arcs) {
        const Arc& I = wa.arc;
        const double ratio = mass_on_carleson_square(mu, I) / I.length();
        ratios.push_back(ratio);
        terms.push_back(std::pow(ratio, 0.5 * r));
        const auto scale = static_cast<std::size_t>(std::max(0.0, std::floor(std::log2(kTwoPi / I.length()))));
        block_of.push_back(scale);
        block_count = std::max(block_count, scale + 1);
    }
    s.terms = terms.size();
    TrendWindow window;
    // Scales below twice the spectrum margin are cut by the excluded neighbourhoods.
    std::size_t used = 0;
    while (used < block_count && kTwoPi * std::ldexp(1.0, -static_cast<int>(used)) >= 2.0 * w.options.spectrum_margin) {
        ++used;
    }
    if (const auto arg = finish_sum(s, terms, block_of, block_count, true, w.excluded.empty(), used, window)) {
        const Arc& I = w.arcs[*arg].arc;
        Witness wit;
        wit.kind = WitnessKind::square;
        wit.square = carleson_square(I);
        wit.mass = ratios[*arg] * I.length();
        wit.length = I.length();
        wit.ratio = ratios[*arg];
        wit.threshold = term_budget(window, block_of, r);
        wit.reason = "term of the finest scales exceeds the budget of a halving window";
        s.witness = wit;
    }

    const auto covered = merge_arcs(whitney_arcs(w));
    CompensatedSum uncovered;
    for (const auto& a : mu.atoms()) {
        if (w.in_F(a.point)) continue;
        uncovered.add(a.mass);
        s.support_violations.push_back("atom at " + format_point(a.point) + " outside the Whitney squares");
    }
    if (!mu.density().empty()) {
        const DiscMeasure boundary({}, mu.density());
        for (const auto& gap : complement_arcs(covered)) {
            const double m = density_mass_on_arc(boundary, gap);
            if (m > 0.0) {
                uncovered.add(m);
                char buf[128];
                std::snprintf(buf, sizeof buf, "density on [%.9g, %.9g] outside the Whitney squares", gap.start,
                              gap.end);
                s.support_violations.emplace_back(buf);
            }
        }
    }
    s.uncovered_mass = uncovered.value();
    return s;
}

CriterionSum schatten_sufficient_sum(const InnerFunction& theta, double epsilon, const DiscMeasure& mu, double r,
                                     double tol) {
    check_epsilon(epsilon, "schatten_sufficient_sum");
    return schatten_sufficient_sum(whitney_decompose(theta, epsilon, tol), mu, r);
}

CriterionSum schatten_necessary_sum(const InnerFunction& theta, double epsilon, const DiscMeasure& mu, double r,
                                    int depth) {
    check_epsilon(epsilon, "schatten_necessary_sum");
    check_r(r, "schatten_necessary_sum");
    check_depth(depth, 1, "schatten_necessary_sum");
    return dyadic_sum(CriterionId::schatten_necessary, &theta, epsilon, 0.0, mu, r, depth, CellFilter::meets);
}

CriterionSum luecking_sum(const DiscMeasure& mu, double r, int depth) {
    check_r(r, "luecking_sum");
    check_depth(depth, 1, "luecking_sum");
    return dyadic_sum(CriterionId::luecking, nullptr, 0.0, 0.0, mu, r, depth, CellFilter::all);
}

CriterionSum thm54_family_sum(const InnerFunction& theta, double epsilon, double A, const DiscMeasure& mu, double r,
                              int depth) {
    check_epsilon(epsilon, "thm54_family_sum");
    check_r(r, "thm54_family_sum");
    check_depth(depth, 1, "thm54_family_sum");
    if (!(A > 0.0) || !std::isfinite(A)) throw InvalidArgument("thm54_family_sum: A must be positive");
    return dyadic_sum(CriterionId::thm54_family, &theta, epsilon, A, mu, r, depth, CellFilter::near);
}

// ---------------------------------------------------------------------------
// Combined Schatten criterion

namespace {

// A Carleson square around boundary mass that misses every Whitney square.
std::optional<Witness> support_witness(const DiscMeasure& mu, const WhitneyDecomposition& w) {
    auto try_arc = [&](const Arc& a) -> std::optional<Witness> {
        if (!(a.length() > 0.0) || a.length() >= kPi) return std::nullopt;
        Witness wit;
        wit.kind = WitnessKind::square;
        wit.square = carleson_square(a);
        wit.mass = mass_on_square(mu, wit.square);
        wit.length = a.length();
        wit.ratio = wit.mass / wit.length;
        wit.threshold = 0.0;
        wit.reason = "mass outside the Whitney squares";
        if (wit.mass > 0.0) return wit;
        return std::nullopt;
    };
    for (const auto& a : mu.atoms()) {
        if (std::abs(a.point) < 1.0 || w.in_F(a.point)) continue;
        const double angle = std::arg(a.point);
        double gap = kPi;
        for (const auto& wa : w.arcs) gap = std::min(gap, angle_to_arc(angle, wa.arc));
        if (auto wit = try_arc(arc_from_mid(angle, gap))) return wit;
    }
    if (!mu.density().empty()) {
        for (const auto& c : complement_arcs(merge_arcs(whitney_arcs(w)))) {
            const double len = std::min(c.length(), 0.5 * kPi);
            if (auto wit = try_arc(arc_from_mid(c.mid(), 0.5 * len))) return wit;
            constexpr int kPieces = 64;
            for (int i = 0; i < kPieces; ++i) {
                const double a0 = c.start + c.length() * (i + 0.25) / kPieces;
                if (auto wit = try_arc(make_arc(a0, a0 + 0.5 * c.length() / kPieces))) return wit;
            }
        }
    }
    return std::nullopt;
}

}  // namespace

ConditionReport check_thm14(const InnerFunction& theta, bool cls_declared, double epsilon, const DiscMeasure& mu,
                            double r, int depth, double tol) {
    check_epsilon(epsilon, "check_thm14");
    check_depth(depth, 1, "check_thm14");
    if (!(r >= 1.0) || !std::isfinite(r)) throw InvalidArgument("check_thm14: r must be >= 1");
    ConditionReport rep;
    rep.id = CriterionId::thm14;
    rep.params = {{"epsilon", epsilon}, {"r", r}, {"depth", static_cast<double>(depth)}, {"tol", tol},
                  {"cls_declared", cls_declared ? 1.0 : 0.0}};

    const WhitneyDecomposition w = whitney_decompose(theta, epsilon, tol);
    const CriterionSum suff = schatten_sufficient_sum(w, mu, r);
    const CriterionSum nec = schatten_necessary_sum(theta, epsilon, mu, r, depth);
    rep.params["sufficient_sum"] = suff.value;
    rep.params["necessary_sum"] = nec.value;
    rep.params["uncovered_mass"] = suff.uncovered_mass;
    rep.profile["sufficient_partial"] = suff.partial_sums;
    rep.profile["necessary_partial"] = nec.partial_sums;
    rep.undecided = nec.undecided;

    if (theta.zero_count() > 0 && theta.zero_count() <= kMaxBasisSize && theta.atoms().empty()) {
        try {
            const InnerFunction finite = InnerFunction::blaschke(theta.flat_zeros());
            const SpectralReport sr = singular_values(embedding_gram(finite, mu), {r});
            rep.params["oracle_schatten"] = schatten_norm(sr, r);
            rep.params["oracle_truncation"] = static_cast<double>(theta.zero_count());
        } catch (const Error& e) {
            rep.notes.push_back(std::string("oracle unavailable: ") + e.what());
        }
    }

    double boundary_uncovered = 0.0;
    for (const auto& a : mu.atoms()) {
        if (!(std::abs(a.point) < 1.0) && !w.in_F(a.point)) boundary_uncovered += a.mass;
    }
    if (!mu.density().empty()) {
        const DiscMeasure boundary({}, mu.density());
        for (const auto& gap : complement_arcs(merge_arcs(whitney_arcs(w)))) {
            boundary_uncovered += density_mass_on_arc(boundary, gap);
        }
    }
    rep.params["boundary_uncovered_mass"] = boundary_uncovered;
    if (boundary_uncovered > 0.0) {
        if (auto wit = support_witness(mu, w)) {
            rep.verdict = Verdict::fails_with_witness;
            rep.witness = *wit;
            return rep;
        }
        rep.notes.push_back("boundary mass outside the Whitney squares could not be isolated");
        return rep;
    }
    if (suff.trend == Verdict::fails_with_witness) {
        rep.verdict = Verdict::fails_with_witness;
        rep.witness = suff.witness;
        return rep;
    }
    if (nec.trend == Verdict::fails_with_witness) {
        rep.verdict = Verdict::fails_with_witness;
        rep.witness = nec.witness;
        return rep;
    }
    if (suff.trend == Verdict::holds_at_resolution && nec.trend == Verdict::holds_at_resolution &&
        nec.undecided == 0) {
        if (cls_declared) {
            rep.verdict = Verdict::holds_at_resolution;
        } else {
            rep.notes.push_back("both sums converge, but the pair characterizes Schatten membership only for CLS");
        }
    }
    return rep;
}

}  // namespace modelspace
