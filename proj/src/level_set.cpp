#include "modelspace/level_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>

#include "modelspace/errors.hpp"

namespace modelspace {

double modulus_lower_bound_at(const InnerFunction& theta, Complex c, double r, double mod_c);

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = 1.4142135623730951;

struct Cell {
    Complex c;
    double h = 0.0;     // half side
    double dlow = 0.0;  // lower bound of the target distance over the cell
    double mod_c = -1;  // |Theta(c)|, or -1 when c is too close to the circle
    // First-order model: Omega ∩ cell lies in the disc D(lin_c, lin_r).
    bool linear = false;
    Complex lin_c;
    double lin_r = 0.0;
    double slope = 0.0;  // |Theta'(c)|
    double curvature = 0.0;  // bound for |Theta''| on the cell
};

struct CellOrder {
    bool operator()(const Cell& a, const Cell& b) const {
        if (a.dlow != b.dlow) return a.dlow > b.dlow;
        const double ka = a.mod_c < 0.0 ? 1.0 : a.mod_c;
        const double kb = b.mod_c < 0.0 ? 1.0 : b.mod_c;
        if (ka != kb) return ka > kb;
        return a.h < b.h;
    }
};

struct SearchOutcome {
    double lo = 0.0;
    double hi = kInf;
    std::size_t cells = 0;
    bool exhausted = false;
    Complex witness;  // point of Omega realizing hi, when one was found
};

// Fills the cell's value and linear model; returns false when the model
// proves that the cell contains no point of Omega.
bool analyse_cell(const InnerFunction& theta, double epsilon, Cell& cell) {
    if (std::abs(cell.c) >= 1.0 - 1e-12) return true;
    const auto vd = evaluate_with_derivative(theta, cell.c);
    cell.mod_c = std::abs(vd.value);
    const double r = cell.h * kSqrt2;
    const double rho0 = 1.0 - std::abs(cell.c) - r;
    const double slope = std::abs(vd.derivative);
    if (!(rho0 > 0.0) || !(slope > 0.0)) return true;
    // Taylor: |Theta(w) - A - B(w-c)| <= M|w-c|^2/2 with the Cauchy bound M = 2/rho0^2.
    const double m = 2.0 / (rho0 * rho0);
    cell.linear = true;
    cell.lin_c = cell.c - vd.value / vd.derivative;
    cell.lin_r = (epsilon + 0.5 * m * r * r) / slope;
    cell.slope = slope;
    cell.curvature = m;
    return std::abs(cell.lin_c - cell.c) < cell.lin_r + r;
}

// Best-first branch and bound for dist(target, closure Omega).
// nearest(w): point of the target closest to w.
// stop(lo, hi): termination rule.
template <class Nearest, class Stop>
SearchOutcome branch_and_bound(const InnerFunction& theta, double epsilon, Nearest nearest,
                               double hi0, Stop stop, std::size_t budget,
                               std::optional<Complex> hint = std::nullopt,
                               std::optional<std::pair<Complex, double>> root = std::nullopt) {
    SearchOutcome out;
    out.hi = hi0;
    auto dist = [&nearest](Complex w) { return std::abs(w - nearest(w)); };
    std::priority_queue<Cell, std::vector<Cell>, CellOrder> heap;

    auto record = [&](Complex q) {
        const double d = dist(q);
        if (d < out.hi) {
            out.hi = d;
            out.witness = q;
        }
    };
    auto try_point = [&](Complex q) {
        if (!(std::abs(q) < 1.0 - 1e-12)) return;
        if (std::abs(evaluate(theta, q)) < epsilon) record(q);
    };
    if (hint) try_point(*hint);

    auto push_cell = [&](Complex c, double h, double parent_low) {
        Cell cell;
        cell.c = c;
        cell.h = h;
        cell.dlow = std::max(parent_low, dist(c) - h * kSqrt2);
        if (!analyse_cell(theta, epsilon, cell)) return;
        if (cell.linear) cell.dlow = std::max(cell.dlow, dist(cell.lin_c) - cell.lin_r);
        cell.dlow = std::max(cell.dlow, 0.0);
        if (cell.dlow < out.hi) heap.push(cell);
    };
    // Everything farther than hi from the target is irrelevant, so a root
    // square around the target may replace [-1,1]^2.
    if (root && std::isfinite(out.hi) && root->second + out.hi < 1.0) {
        push_cell(root->first, root->second + out.hi, 0.0);
    } else {
        push_cell(Complex(0.0, 0.0), 1.0, 0.0);
    }

    while (true) {
        const double lo = heap.empty() ? out.hi : std::min(heap.top().dlow, out.hi);
        if (stop(lo, out.hi)) {
            out.lo = lo;
            return out;
        }
        if (out.cells >= budget) {
            out.lo = lo;
            out.exhausted = true;
            return out;
        }
        Cell cell = heap.top();
        heap.pop();
        if (cell.dlow >= out.hi) continue;
        ++out.cells;

        const double r = cell.h * kSqrt2;
        if (cell.mod_c >= 0.0 && cell.mod_c < epsilon) record(cell.c);
        const Complex near_c = nearest(cell.c);
        const Complex q{std::clamp(near_c.real(), cell.c.real() - cell.h, cell.c.real() + cell.h),
                        std::clamp(near_c.imag(), cell.c.imag() - cell.h, cell.c.imag() + cell.h)};
        if (q != cell.c) try_point(q);
        if (cell.linear) {
            // Point of the model disc closest to the target, pulled inside by the Taylor error.
            const Complex t = nearest(cell.lin_c);
            const double gap = std::abs(t - cell.lin_c);
            if (gap > 0.0) {
                const Complex dir = (t - cell.lin_c) / gap;
                const double s = std::abs(cell.lin_c + dir * (epsilon / cell.slope) - cell.c);
                const double rad = (epsilon - 0.5 * cell.curvature * s * s) / cell.slope;
                if (rad > 0.0 && s <= 2.0 * r) try_point(cell.lin_c + dir * std::min(rad, gap));
            }
        }
        if (modulus_lower_bound_at(theta, cell.c, r, cell.mod_c) >= epsilon) continue;

        const double h2 = 0.5 * cell.h;
        if (!(h2 > 0.0) || cell.c + Complex(h2, h2) == cell.c) continue;
        const Complex offs[4] = {Complex(-h2, -h2), Complex(h2, -h2), Complex(-h2, h2), Complex(h2, h2)};
        for (const auto& o : offs) {
            const Complex cc = cell.c + o;
            if (std::abs(cc) - h2 * kSqrt2 > 1.0) continue;
            push_cell(cc, h2, cell.dlow);
        }
    }
}

}  // namespace

const char* to_string(Certified c) {
    switch (c) {
        case Certified::yes: return "yes";
        case Certified::no: return "no";
        case Certified::undecided: return "undecided";
    }
    return "undecided";
}

double modulus_lower_bound(const InnerFunction& theta, Complex c, double r) {
    return modulus_lower_bound_at(theta, c, r, -1.0);
}

double modulus_lower_bound_at(const InnerFunction& theta, Complex c, double r, double mod_c) {
    const double rc = std::abs(c);
    const double dmin = std::max(0.0, rc - r);
    const double one_minus = std::max(0.0, 1.0 - dmin * dmin);

    double lb_factor = 0.0;
    bool factor_ok = true;
    double log_lb = 0.0;
    for (const auto& zero : theta.zeros()) {
        const Complex a = zero.point;
        const double den = std::abs(1.0 - std::conj(a) * c) - std::abs(a) * r;
        if (!(den > 0.0)) {
            factor_ok = false;
            break;
        }
        const double u = (1.0 - std::norm(a)) * one_minus / (den * den);
        if (!(u < 1.0)) {
            factor_ok = false;
            break;
        }
        log_lb += 0.5 * zero.multiplicity * std::log1p(-u);
    }
    if (factor_ok) {
        for (const auto& atom : theta.atoms()) {
            const double g = std::abs(std::polar(1.0, atom.angle) - c) - r;
            if (!(g > 0.0)) {
                factor_ok = false;
                break;
            }
            log_lb -= atom.mass * one_minus / (g * g);
        }
    }
    if (factor_ok) lb_factor = std::exp(log_lb);

    double lb_sp = 0.0;
    if (rc + r < 1.0) {
        const double delta = r / (1.0 - rc * (rc + r));
        const double a = mod_c >= 0.0 ? mod_c : std::abs(evaluate(theta, c));
        if (delta < 1.0 && a > delta) lb_sp = (a - delta) / (1.0 - a * delta);
    }
    return std::max(lb_factor, lb_sp);
}

double modulus_upper_bound(const InnerFunction& theta, Complex c, double r) {
    const double rc = std::abs(c);
    const double dmax = std::min(1.0, rc + r);
    const double one_minus = std::max(0.0, 1.0 - dmax * dmax);

    double log_ub = 0.0;
    for (const auto& zero : theta.zeros()) {
        const Complex a = zero.point;
        const double den = std::abs(1.0 - std::conj(a) * c) + std::abs(a) * r;
        const double l = (1.0 - std::norm(a)) * one_minus / (den * den);
        log_ub += 0.5 * zero.multiplicity * std::log1p(-std::min(l, 1.0));
    }
    for (const auto& atom : theta.atoms()) {
        const double g = std::abs(std::polar(1.0, atom.angle) - c) + r;
        log_ub -= atom.mass * one_minus / (g * g);
    }
    double ub = std::min(1.0, std::exp(log_ub));
    if (rc + r < 1.0) {
        const double delta = r / (1.0 - rc * (rc + r));
        if (delta < 1.0) {
            const double a = std::abs(evaluate(theta, c));
            ub = std::min(ub, (a + delta) / (1.0 + a * delta));
        }
    }
    return ub;
}

DistanceBracket level_distance(const InnerFunction& theta, double epsilon, Complex p, double tol) {
    SearchOptions opts;
    opts.abs_tol = tol;
    return level_distance(theta, epsilon, p, opts);
}

DistanceBracket level_distance(const InnerFunction& theta, double epsilon, Complex p,
                               const SearchOptions& opts) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("level_distance: epsilon must lie in (0,1)");
    if (!(opts.abs_tol > 0.0) && !(opts.rel_tol > 0.0)) throw InvalidArgument("level_distance: tol must be > 0");
    if (std::abs(p) > 1.0 + 1e-12) throw InvalidArgument("level_distance: point outside the closed disc");

    const double hi0 = spectrum_distance(theta, p);
    if (hi0 == 0.0) return {0.0, 0.0, 0};
    if (std::abs(p) < 1.0 - 1e-12 && std::abs(evaluate(theta, p)) < epsilon) return {0.0, 0.0, 0};

    auto nearest = [p](Complex) { return p; };
    auto stop = [&opts](double lo, double hi) {
        if (lo >= hi) return true;
        return hi - lo <= std::max(opts.abs_tol, opts.rel_tol * hi);
    };
    auto res = branch_and_bound(theta, epsilon, nearest, hi0, stop, opts.budget, opts.hint,
                                std::make_pair(p, 0.0));
    if (res.exhausted) {
        throw ResolutionExhausted("level_distance: cell budget exhausted with bracket [" +
                                  std::to_string(res.lo) + ", " + std::to_string(res.hi) + "]");
    }
    return {res.lo, res.hi, res.cells, res.witness};
}

Complex nearest_point_on_box(Complex w, const PolarBox& box) {
    const double rw = std::abs(w);
    const double width = box.phi_hi - box.phi_lo;
    const double mid = 0.5 * (box.phi_lo + box.phi_hi);
    if (rw == 0.0) return std::polar(box.rho_lo, mid);
    const double phi = std::arg(w);
    if (width >= kTwoPi - 1e-15 || canonical_angle(phi - box.phi_lo) <= width) {
        return std::polar(std::clamp(rw, box.rho_lo, box.rho_hi), phi);
    }
    auto seg = [&](double edge) {
        const Complex e = std::polar(1.0, edge);
        const double t = std::clamp((w * std::conj(e)).real(), box.rho_lo, box.rho_hi);
        return t * e;
    };
    const Complex a = seg(box.phi_lo);
    const Complex b = seg(box.phi_hi);
    return std::abs(w - a) <= std::abs(w - b) ? a : b;
}

double distance_to_box(Complex w, const PolarBox& box) {
    return std::abs(w - nearest_point_on_box(w, box));
}

Complex box_center(const PolarBox& box) {
    return std::polar(0.5 * (box.rho_lo + box.rho_hi), 0.5 * (box.phi_lo + box.phi_hi));
}

double box_circumradius(const PolarBox& box) {
    const Complex c = box_center(box);
    double r = 0.0;
    for (double rho : {box.rho_lo, box.rho_hi}) {
        for (double phi : {box.phi_lo, box.phi_hi}) r = std::max(r, std::abs(std::polar(rho, phi) - c));
    }
    if (box.phi_hi - box.phi_lo > kPi) r = std::max(r, box.rho_hi + std::abs(c));
    return r;
}

double box_spectrum_distance(const InnerFunction& theta, const PolarBox& box) {
    double d = kInf;
    for (const auto& z : theta.zeros()) d = std::min(d, distance_to_box(z.point, box));
    for (double a : theta.boundary_spectrum()) d = std::min(d, distance_to_box(std::polar(1.0, a), box));
    return d;
}

DistanceBracket box_distance(const InnerFunction& theta, double epsilon, const PolarBox& box,
                             const SearchOptions& opts) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("box_distance: epsilon must lie in (0,1)");
    const double hi0 = box_spectrum_distance(theta, box);
    if (hi0 == 0.0) return {0.0, 0.0, 0};
    auto nearest = [&box](Complex w) { return nearest_point_on_box(w, box); };
    auto stop = [&opts](double lo, double hi) {
        if (lo >= hi) return true;
        return hi - lo <= std::max(opts.abs_tol, opts.rel_tol * hi);
    };
    auto res = branch_and_bound(theta, epsilon, nearest, hi0, stop, opts.budget, std::nullopt,
                                std::make_pair(box_center(box), box_circumradius(box)));
    if (res.exhausted) {
        throw ResolutionExhausted("box_distance: cell budget exhausted with bracket [" +
                                  std::to_string(res.lo) + ", " + std::to_string(res.hi) + "]");
    }
    return {res.lo, res.hi, res.cells, res.witness};
}

Certified box_meets_level_set(const InnerFunction& theta, double epsilon, const PolarBox& box,
                              std::size_t budget) {
    double hi0 = kInf;
    for (const auto& z : theta.zeros()) hi0 = std::min(hi0, distance_to_box(z.point, box));
    if (hi0 == 0.0) return Certified::yes;
    auto nearest = [&box](Complex w) { return nearest_point_on_box(w, box); };
    auto stop = [](double lo, double hi) { return hi == 0.0 || lo > 0.0; };
    auto res = branch_and_bound(theta, epsilon, nearest, hi0, stop, budget, std::nullopt,
                                std::make_pair(box_center(box), box_circumradius(box)));
    if (res.hi == 0.0) return Certified::yes;
    if (res.lo > 0.0 && !res.exhausted) return Certified::no;
    return Certified::undecided;
}

Certified box_within_distance(const InnerFunction& theta, double epsilon, const PolarBox& box,
                              double t, std::size_t budget) {
    const double hi0 = box_spectrum_distance(theta, box);
    if (hi0 <= t) return Certified::yes;
    auto nearest = [&box](Complex w) { return nearest_point_on_box(w, box); };
    auto stop = [t](double lo, double hi) { return hi <= t || lo > t; };
    auto res = branch_and_bound(theta, epsilon, nearest, hi0, stop, budget, std::nullopt,
                                std::make_pair(box_center(box), box_circumradius(box)));
    if (res.hi <= t) return Certified::yes;
    if (res.lo > t && !res.exhausted) return Certified::no;
    return Certified::undecided;
}

std::vector<LevelSetCell> level_set_boundary_cells(const InnerFunction& theta, double epsilon,
                                                   double tol, std::size_t budget) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("level set: epsilon must lie in (0,1)");
    if (!(tol > 0.0)) throw InvalidArgument("level set: tol must be > 0");
    std::vector<LevelSetCell> out;
    std::vector<std::pair<Complex, double>> stack{{Complex(0.0, 0.0), 1.0}};
    std::size_t processed = 0;
    while (!stack.empty()) {
        auto [c, h] = stack.back();
        stack.pop_back();
        if (++processed > budget) throw ResolutionExhausted("level set: cell budget exhausted");
        const double r = h * kSqrt2;
        if (std::abs(c) - r > 1.0) continue;
        if (modulus_lower_bound(theta, c, r) >= epsilon) continue;
        if (modulus_upper_bound(theta, c, r) < epsilon) continue;
        if (2.0 * h <= tol) {
            out.push_back({c.real(), c.imag(), 2.0 * h});
            continue;
        }
        const double h2 = 0.5 * h;
        // Reverse push order so cells pop in (-,-), (+,-), (-,+), (+,+) order.
        stack.push_back({c + Complex(h2, h2), h2});
        stack.push_back({c + Complex(-h2, h2), h2});
        stack.push_back({c + Complex(h2, -h2), h2});
        stack.push_back({c + Complex(-h2, -h2), h2});
    }
    return out;
}

}  // namespace modelspace
