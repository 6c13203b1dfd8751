#include "modelspace/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>

#include "modelspace/errors.hpp"

namespace modelspace {

// ---------------------------------------------------------------------------
// Arcs and squares

bool Arc::contains(double angle) const {
    if (length() >= kTwoPi) return true;
    return canonical_angle(angle - start) <= length() || angular_gap(angle, start) == 0.0;
}

bool Arc::contains_interior(double angle) const {
    const double t = canonical_angle(angle - start);
    return t > 0.0 && t < length();
}

double Arc::overlap(const Arc& other) const {
    if (length() >= kTwoPi) return other.length();
    if (other.length() >= kTwoPi) return length();
    double total = 0.0;
    // Place `other` relative to this arc's start, and test the two lifts that can intersect.
    const double s = canonical_angle(other.start - start);
    for (double shift : {s - kTwoPi, s}) {
        const double lo = std::max(0.0, shift);
        const double hi = std::min(length(), shift + other.length());
        if (hi > lo) total += hi - lo;
    }
    return std::min(total, std::min(length(), other.length()));
}

Arc make_arc(double start, double end) {
    const double len = end - start;
    if (!(len > 0.0) || len > kTwoPi * (1.0 + 1e-15)) {
        throw InvalidArgument("arc length must lie in (0, 2*pi]");
    }
    Arc a;
    a.start = canonical_angle(start);
    a.end = a.start + std::min(len, kTwoPi);
    return a;
}

Arc arc_from_mid(double mid, double length) { return make_arc(mid - 0.5 * length, mid + 0.5 * length); }

bool GenericSquare::contains(Complex z) const {
    const double r = std::abs(z);
    if (r < rho_lo() || r > h0) return false;
    if (r == 0.0) return rho_lo() <= 0.0;
    return angles().contains(std::arg(z));
}

PolarBox GenericSquare::box() const {
    const Arc a = angles();
    return PolarBox{std::max(0.0, rho_lo()), h0, a.start, a.end};
}

Complex GenericSquare::midpoint() const {
    return std::polar(h0 - 0.5 * h / kTwoPi, phi0 + 0.5 * h);
}

GenericSquare make_square(double h0, double phi0, double h) {
    if (!(h0 > 0.0 && h0 <= 1.0)) throw InvalidArgument("square: h0 must lie in (0, 1]");
    if (!(h > 0.0 && h < kTwoPi * h0)) throw InvalidArgument("square: need 0 < h < 2*pi*h0");
    return GenericSquare{h0, canonical_angle(phi0), h};
}

GenericSquare carleson_square(const Arc& arc) {
    if (!(arc.length() < kTwoPi)) throw InvalidArgument("carleson_square: arc must be shorter than the circle");
    return make_square(1.0, arc.start, arc.length());
}

double DyadicSquare::rho_lo() const { return 1.0 - std::ldexp(1.0, -(level - 1)); }
double DyadicSquare::rho_hi() const { return 1.0 - std::ldexp(1.0, -level); }
double DyadicSquare::phi_lo() const { return kPi * std::ldexp(static_cast<double>(index), -(level - 1)); }
double DyadicSquare::phi_hi() const { return kPi * std::ldexp(static_cast<double>(index + 1), -(level - 1)); }

bool DyadicSquare::contains(Complex z) const {
    const double r = std::abs(z);
    if (r >= 1.0) return false;
    return dyadic_locate(z) == *this;
}

PolarBox DyadicSquare::box() const { return PolarBox{rho_lo(), rho_hi(), phi_lo(), phi_hi()}; }

DyadicSquare dyadic_locate(Complex z) {
    const double r = std::abs(z);
    if (!(r < 1.0)) throw InvalidArgument("dyadic_locate: point must be interior");
    int n = 1;
    if (r > 0.0) {
        n = static_cast<int>(std::floor(-std::log2(1.0 - r))) + 1;
        n = std::max(n, 1);
        while (n > 1 && r < 1.0 - std::ldexp(1.0, -(n - 1))) --n;
        while (r >= 1.0 - std::ldexp(1.0, -n)) ++n;
    }
    const double phi = r == 0.0 ? 0.0 : canonical_angle(std::arg(z));
    const std::int64_t cells = std::int64_t{1} << std::min(n, 62);
    auto m = static_cast<std::int64_t>(std::floor(std::ldexp(phi / kPi, n - 1)));
    m = std::clamp<std::int64_t>(m, 0, cells - 1);
    DyadicSquare sq{n, m};
    // Guard against rounding at sector seams.
    if (phi < sq.phi_lo() && m > 0) --sq.index;
    else if (phi >= sq.phi_hi() && m + 1 < cells) ++sq.index;
    return sq;
}

DyadicFamily dyadic_cells_meeting(const InnerFunction& theta, double epsilon, int max_level,
                                  DyadicMode mode, double A, std::size_t budget_per_box) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("dyadic_cells_meeting: epsilon must lie in (0,1)");
    if (max_level < 1 || max_level > kMaxDyadicLevel) {
        throw InvalidArgument("dyadic_cells_meeting: max_level must lie in [1, 30]");
    }
    if (mode == DyadicMode::within_distance && !(A > 0.0)) {
        throw InvalidArgument("dyadic_cells_meeting: A must be > 0");
    }
    DyadicFamily out;
    for (int n = 1; n <= max_level; ++n) {
        const double rho_lo = 1.0 - std::ldexp(1.0, -(n - 1));
        const double rho_hi = 1.0 - std::ldexp(1.0, -n);
        const double t = A * std::ldexp(1.0, -n);
        auto classify = [&](std::int64_t lo, std::int64_t hi) {
            const PolarBox box{rho_lo, rho_hi, kPi * std::ldexp(static_cast<double>(lo), -(n - 1)),
                               kPi * std::ldexp(static_cast<double>(hi), -(n - 1))};
            const Certified meets = box_meets_level_set(theta, epsilon, box, budget_per_box);
            if (mode == DyadicMode::meets_level_set || meets == Certified::yes) return meets;
            return box_within_distance(theta, epsilon, box, t, budget_per_box);
        };
        std::function<void(std::int64_t, std::int64_t)> visit = [&](std::int64_t lo, std::int64_t hi) {
            const Certified c = classify(lo, hi);
            if (c == Certified::no) return;
            if (hi - lo == 1) {
                (c == Certified::yes ? out.cells : out.undecided).push_back(DyadicSquare{n, lo});
                return;
            }
            const std::int64_t mid = lo + (hi - lo) / 2;
            visit(lo, mid);
            visit(mid, hi);
        };
        visit(0, std::int64_t{1} << n);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Whitney decomposition

double WhitneyDecomposition::covered_measure() const {
    double s = 0.0;
    for (const auto& a : arcs) s += a.arc.measure();
    return s;
}

int WhitneyDecomposition::arc_at(double angle) const {
    for (std::size_t k = 0; k < arcs.size(); ++k) {
        if (arcs[k].arc.contains(angle)) return static_cast<int>(k);
    }
    return -1;
}

bool WhitneyDecomposition::in_F(Complex z) const {
    const double r = std::abs(z);
    if (r > 1.0 + 1e-15) return false;
    const double phi = std::arg(z);
    for (const auto& a : arcs) {
        if (r >= 1.0 - a.arc.measure() && a.arc.contains(phi)) return true;
    }
    return false;
}

double WhitneyDecomposition::g_constant() const {
    double c = 0.0;
    for (const auto& a : arcs) {
        if (!a.threshold_exact || a.arc.measure() >= 0.5) continue;
        const double len = a.arc.length();
        c = std::max(c, (a.distance.hi + len) / a.arc.measure());
    }
    return c;
}

std::string WhitneyDecomposition::to_csv() const {
    std::ostringstream os;
    os << "k,start_angle,end_angle,d_lo,d_hi,threshold_exact\n";
    char buf[256];
    for (std::size_t k = 0; k < arcs.size(); ++k) {
        const auto& a = arcs[k];
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%d\n", k, a.arc.start, a.arc.end,
                      a.distance.lo, a.distance.hi, a.threshold_exact ? 1 : 0);
        os << buf;
    }
    return os.str();
}

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Component {
    double start;
    double end;
};

std::vector<Component> complement_components(const std::vector<double>& spectrum, double margin) {
    std::vector<Component> out;
    if (spectrum.empty()) {
        out.push_back({0.0, kTwoPi});
        return out;
    }
    const std::size_t k = spectrum.size();
    for (std::size_t j = 0; j < k; ++j) {
        const double a = spectrum[j] + margin;
        const double b = (j + 1 < k ? spectrum[j + 1] : spectrum[0] + kTwoPi) - margin;
        if (b > a) out.push_back({a, b});
    }
    std::sort(out.begin(), out.end(), [](const Component& x, const Component& y) {
        return canonical_angle(x.start) < canonical_angle(y.start);
    });
    return out;
}

class Marcher {
public:
    Marcher(const InnerFunction& theta, double epsilon, const WhitneyOptions& opts)
        : theta_(theta), epsilon_(epsilon), opts_(opts) {}

    double distance(double t) const {
        SearchOptions so;
        so.abs_tol = 1e-15;
        so.rel_tol = opts_.distance_rel_tol;
        so.budget = opts_.budget;
        if (has_hint_) so.hint = hint_;
        const auto br = level_distance(theta_, epsilon_, std::polar(1.0, t), so);
        if (std::abs(br.witness) > 0.0 && br.hi > 0.0) {
            hint_ = br.witness;
            has_hint_ = true;
        }
        return br.mid();
    }

    // Integral of 1/d over [x0, x1] against normalized measure (signed).
    double integral(double x0, double x1) const {
        if (x0 == x1) return 0.0;
        auto f = [this](double t) { return 1.0 / (kTwoPi * distance(t)); };
        const double lo = std::min(x0, x1);
        const double hi = std::max(x0, x1);
        const double v = integrate<double>(f, lo, hi, opts_.quadrature).value;
        return x1 > x0 ? v : -v;
    }

    void march(const Component& comp, std::vector<WhitneyArc>& out) const {
        double a = comp.start;
        while (a < comp.end) {
            const double da = distance(a);
            // Lipschitz bounds on d give F(a + da*(e^{1/4}-1)) >= tau.
            const double reach = da * (std::exp(kTwoPi * kWhitneyThreshold) - 1.0) * 1.01;
            double lo = a, flo = 0.0;
            double hi = a + reach, fhi = kWhitneyThreshold;
            bool fhi_known = false;
            if (hi >= comp.end) {
                hi = comp.end;
                fhi = integral(a, hi);
                fhi_known = true;
                if (fhi <= kWhitneyThreshold) {
                    out.push_back(finish(a, comp.end, fhi, false));
                    return;
                }
            }
            // Safeguarded Newton for F(b) = tau inside [lo, hi].
            double b = std::clamp(a + da * kTwoPi * kWhitneyThreshold, lo, hi);
            if (!(b > lo && b < hi)) b = 0.5 * (lo + hi);
            double fb = flo + integral(lo, b);
            for (int it = 0; it < 100; ++it) {
                const double g = fb - kWhitneyThreshold;
                if (std::abs(g) <= opts_.quadrature.rel_tol * kWhitneyThreshold) break;
                if (g < 0.0) {
                    lo = b;
                    flo = fb;
                } else {
                    hi = b;
                    fhi = fb;
                    fhi_known = true;
                }
                if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(b))) break;
                double next = b - g * kTwoPi * distance(b);
                if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
                // Integrate from the nearest point with a known value.
                const double from_b = std::abs(next - b);
                const double from_lo = next - lo;
                const double from_hi = fhi_known ? hi - next : kInfinity;
                if (from_b <= from_lo && from_b <= from_hi) {
                    fb = fb + integral(b, next);
                } else if (from_lo <= from_hi) {
                    fb = flo + integral(lo, next);
                } else {
                    fb = fhi - integral(next, hi);
                }
                b = next;
            }
            const bool exact = std::abs(fb - kWhitneyThreshold) <= 10.0 * opts_.quadrature.rel_tol * kWhitneyThreshold;
            out.push_back(finish(a, b, fb, exact));
            a = b;
        }
    }

private:
    WhitneyArc finish(double a, double b, double value, bool exact) const {
        WhitneyArc w;
        w.arc = make_arc(a, b);
        w.integral = value;
        w.threshold_exact = exact;
        SearchOptions so;
        so.abs_tol = std::min(opts_.bracket_tol, 0.01 * w.arc.length());
        so.budget = opts_.budget;
        const PolarBox box{1.0, 1.0, w.arc.start, w.arc.end};
        w.distance = box_distance(theta_, epsilon_, box, so);
        return w;
    }

    const InnerFunction& theta_;
    double epsilon_;
    WhitneyOptions opts_;
    mutable Complex hint_;
    mutable bool has_hint_ = false;
};

}  // namespace

WhitneyDecomposition whitney_decompose(const InnerFunction& theta, double epsilon, double tol) {
    WhitneyOptions opts;
    opts.spectrum_margin = tol;
    return whitney_decompose(theta, epsilon, opts);
}

WhitneyDecomposition whitney_decompose(const InnerFunction& theta, double epsilon,
                                       const WhitneyOptions& opts) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("whitney_decompose: epsilon must lie in (0,1)");
    if (!(opts.spectrum_margin > 0.0)) throw InvalidArgument("whitney_decompose: tol must be > 0");
    const auto comps = complement_components(theta.boundary_spectrum(), opts.spectrum_margin);
    if (comps.empty()) throw EmptyComplement("whitney_decompose: boundary spectrum covers the circle");

    WhitneyDecomposition dec;
    dec.epsilon = epsilon;
    dec.options = opts;
    const Marcher marcher(theta, epsilon, opts);
    for (const auto& c : comps) marcher.march(c, dec.arcs);

    if (comps.size() == 1 && comps[0].end - comps[0].start >= kTwoPi) return dec;
    for (std::size_t j = 0; j < comps.size(); ++j) {
        const double gap_start = comps[j].end;
        double gap_end = comps[(j + 1) % comps.size()].start;
        while (gap_end <= gap_start) gap_end += kTwoPi;
        if (gap_end - gap_start < kTwoPi) dec.excluded.push_back(make_arc(gap_start, gap_end));
    }
    return dec;
}

}  // namespace modelspace
