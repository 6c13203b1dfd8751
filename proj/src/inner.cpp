#include "modelspace/inner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "modelspace/errors.hpp"

namespace modelspace {

double canonical_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
    return t;
}

double angular_gap(double a, double b) {
    double d = std::fmod(std::abs(a - b), kTwoPi);
    return std::min(d, kTwoPi - d);
}

namespace {

double param_or(const ZeroGenerator& gen, const std::string& key, double fallback) {
    auto it = gen.params.find(key);
    return it == gen.params.end() ? fallback : it->second;
}

// Partial sums of (1-|z_n|) must increase and the increments must decay.
void check_blaschke_condition(std::span<const Complex> zs, const std::string& name) {
    if (zs.size() < 4) return;
    std::vector<double> inc;
    inc.reserve(zs.size());
    for (auto z : zs) {
        const double d = 1.0 - std::abs(z);
        if (!(d > 0.0)) throw InvalidArgument("generator '" + name + "' produced a zero on the circle");
        inc.push_back(d);
    }
    const std::size_t half = inc.size() / 2;
    double head = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < half; ++i) head += inc[i];
    for (std::size_t i = inc.size() - half; i < inc.size(); ++i) tail += inc[i];
    if (!(tail < head)) {
        throw InvalidArgument("generator '" + name +
                              "' does not look Blaschke-summable: increments of sum(1-|z_n|) do not decay");
    }
}

}  // namespace

std::vector<Complex> generate_zeros(const ZeroGenerator& gen) {
    if (gen.truncation < 0) throw InvalidArgument("generator truncation must be >= 0");
    const double base = param_or(gen, "base", 2.0);
    const double angle = param_or(gen, "angle", 0.0);
    if (!(base > 1.0)) throw InvalidArgument("generator parameter 'base' must exceed 1");
    double twist = 0.0;
    if (gen.name == "spiral") {
        twist = param_or(gen, "twist", 1.0);
    } else if (gen.name != "radial") {
        throw InvalidArgument("unknown zero generator '" + gen.name + "'");
    }
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(gen.truncation));
    for (int n = 1; n <= gen.truncation; ++n) {
        const double rho = 1.0 - std::pow(base, -static_cast<double>(n));
        out.push_back(std::polar(rho, angle + twist / n));
    }
    return out;
}

InnerFunction::InnerFunction(std::vector<BlaschkeZero> zeros, std::vector<SingularAtom> atoms,
                             std::optional<ZeroGenerator> generator,
                             std::vector<double> accumulation_angles)
    : explicit_zeros_(std::move(zeros)),
      atoms_(std::move(atoms)),
      generator_(std::move(generator)),
      accumulation_(std::move(accumulation_angles)) {
    build();
}

InnerFunction InnerFunction::monomial(int n) {
    if (n < 1) throw InvalidArgument("monomial degree must be >= 1");
    return InnerFunction({BlaschkeZero{Complex(0.0, 0.0), n}});
}

InnerFunction InnerFunction::blaschke(std::span<const Complex> zeros) {
    std::vector<BlaschkeZero> zs;
    zs.reserve(zeros.size());
    for (auto z : zeros) zs.push_back({z, 1});
    return InnerFunction(std::move(zs));
}

InnerFunction InnerFunction::with_truncation(int n) const {
    if (!generator_) throw InvalidArgument("with_truncation: inner function has no generator");
    auto gen = *generator_;
    gen.truncation = n;
    return InnerFunction(explicit_zeros_, atoms_, gen, accumulation_);
}

void InnerFunction::build() {
    for (const auto& z : explicit_zeros_) {
        if (!(std::abs(z.point) < 1.0)) throw PoleInside("Blaschke zero outside the open disc");
        if (z.multiplicity < 1) throw InvalidArgument("zero multiplicity must be >= 1");
    }
    for (auto& a : atoms_) {
        if (!(a.mass > 0.0) || !std::isfinite(a.mass)) throw InvalidArgument("singular atom mass must be > 0");
        a.angle = canonical_angle(a.angle);
    }
    for (auto& t : accumulation_) t = canonical_angle(t);

    zeros_ = explicit_zeros_;
    if (generator_) {
        auto gen = generate_zeros(*generator_);
        check_blaschke_condition(gen, generator_->name);
        for (auto z : gen) {
            if (!(std::abs(z) < 1.0)) throw PoleInside("generated zero outside the open disc");
            zeros_.push_back({z, 1});
        }
        const double acc = canonical_angle(generator_->params.count("angle") ? generator_->params.at("angle") : 0.0);
        bool present = false;
        for (double t : accumulation_) present = present || angular_gap(t, acc) < kSpectrumRefusal;
        if (!present) accumulation_.push_back(acc);
    }
    zero_count_ = 0;
    for (const auto& z : zeros_) zero_count_ += z.multiplicity;

    boundary_spectrum_.clear();
    for (const auto& a : atoms_) boundary_spectrum_.push_back(a.angle);
    for (double t : accumulation_) boundary_spectrum_.push_back(t);
    std::sort(boundary_spectrum_.begin(), boundary_spectrum_.end());
    std::vector<double> uniq;
    for (double t : boundary_spectrum_) {
        if (uniq.empty() || angular_gap(uniq.back(), t) > kSpectrumRefusal) uniq.push_back(t);
    }
    if (uniq.size() > 1 && angular_gap(uniq.front(), uniq.back()) <= kSpectrumRefusal) uniq.pop_back();
    boundary_spectrum_ = std::move(uniq);
}

std::vector<Complex> InnerFunction::flat_zeros() const {
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(zero_count_));
    for (const auto& z : zeros_) {
        for (int k = 0; k < z.multiplicity; ++k) out.push_back(z.point);
    }
    return out;
}

Complex InnerFunction::operator()(Complex z) const { return evaluate(*this, z); }

Complex evaluate(const InnerFunction& theta, Complex z) {
    const double r = std::abs(z);
    if (r > 1.0 + kSpectrumRefusal) throw InvalidArgument("evaluate: point outside the closed disc");
    if (r >= 1.0 - kSpectrumRefusal && boundary_spectrum_distance(theta, z) < kSpectrumRefusal) {
        throw BoundarySpectrumPoint("evaluate: boundary point on the spectrum");
    }
    Complex b(1.0, 0.0);
    for (const auto& zero : theta.zeros()) {
        const Complex a = zero.point;
        const double ra = std::abs(a);
        if (!(ra < 1.0)) throw PoleInside("evaluate: zero outside the open disc");
        Complex factor;
        if (ra == 0.0) {
            factor = z;
        } else {
            factor = (ra / a) * (a - z) / (1.0 - std::conj(a) * z);
        }
        for (int k = 0; k < zero.multiplicity; ++k) b *= factor;
    }
    if (theta.atoms().empty()) return b;
    Complex exponent(0.0, 0.0);
    for (const auto& atom : theta.atoms()) {
        const Complex zeta = std::polar(1.0, atom.angle);
        exponent -= atom.mass * (zeta + z) / (zeta - z);
    }
    return b * std::exp(exponent);
}

ValueAndDerivative evaluate_with_derivative(const InnerFunction& theta, Complex z) {
    const double r = std::abs(z);
    if (r > 1.0 + kSpectrumRefusal) throw InvalidArgument("evaluate: point outside the closed disc");
    if (r >= 1.0 - kSpectrumRefusal && boundary_spectrum_distance(theta, z) < kSpectrumRefusal) {
        throw BoundarySpectrumPoint("evaluate: boundary point on the spectrum");
    }
    Complex v(1.0, 0.0), d(0.0, 0.0);
    for (const auto& zero : theta.zeros()) {
        const Complex a = zero.point;
        const double ra = std::abs(a);
        if (!(ra < 1.0)) throw PoleInside("evaluate: zero outside the open disc");
        Complex f, df;
        if (ra == 0.0) {
            f = z;
            df = 1.0;
        } else {
            const Complex u = ra / a;
            const Complex den = 1.0 - std::conj(a) * z;
            f = u * (a - z) / den;
            df = u * (ra * ra - 1.0) / (den * den);
        }
        for (int k = 0; k < zero.multiplicity; ++k) {
            d = d * f + v * df;
            v *= f;
        }
    }
    if (theta.atoms().empty()) return {v, d};
    Complex e(0.0, 0.0), de(0.0, 0.0);
    for (const auto& atom : theta.atoms()) {
        const Complex zeta = std::polar(1.0, atom.angle);
        e -= atom.mass * (zeta + z) / (zeta - z);
        de -= atom.mass * 2.0 * zeta / ((zeta - z) * (zeta - z));
    }
    const Complex s = std::exp(e);
    return {v * s, (d + v * de) * s};
}

namespace {

Complex on_circle(Complex zeta) {
    const double r = std::abs(zeta);
    if (std::abs(r - 1.0) > 1e-9) throw InvalidArgument("expected a point on the unit circle");
    return zeta / r;
}

}  // namespace

double ahern_clark_sum(const InnerFunction& theta, Complex zeta, double q) {
    zeta = on_circle(zeta);
    if (boundary_spectrum_distance(theta, zeta) < kSpectrumRefusal) {
        return std::numeric_limits<double>::infinity();
    }
    double s = 0.0;
    for (const auto& zero : theta.zeros()) {
        const double num = 1.0 - std::norm(zero.point);
        s += zero.multiplicity * num / std::pow(std::abs(zeta - zero.point), q);
    }
    for (const auto& atom : theta.atoms()) {
        s += atom.mass / std::pow(std::abs(zeta - std::polar(1.0, atom.angle)), q);
    }
    return s;
}

double derivative_modulus_boundary(const InnerFunction& theta, Complex zeta) {
    zeta = on_circle(zeta);
    if (boundary_spectrum_distance(theta, zeta) < kSpectrumRefusal) {
        return std::numeric_limits<double>::infinity();
    }
    double s = 0.0;
    for (const auto& zero : theta.zeros()) {
        s += zero.multiplicity * (1.0 - std::norm(zero.point)) / std::norm(zeta - zero.point);
    }
    for (const auto& atom : theta.atoms()) {
        s += atom.mass / std::norm(zeta - std::polar(1.0, atom.angle));
    }
    return s;
}

bool level_set_contains(const InnerFunction& theta, double epsilon, Complex z) {
    if (!(std::abs(z) < 1.0)) throw InvalidArgument("level_set_contains: point must be interior");
    return std::abs(evaluate(theta, z)) < epsilon;
}

SpectrumSet spectrum(const InnerFunction& theta) {
    SpectrumSet s;
    for (const auto& z : theta.zeros()) s.points.push_back(z.point);
    s.boundary_angles = theta.boundary_spectrum();
    return s;
}

double boundary_spectrum_distance(const InnerFunction& theta, Complex p) {
    double d = std::numeric_limits<double>::infinity();
    for (double t : theta.boundary_spectrum()) d = std::min(d, std::abs(p - std::polar(1.0, t)));
    return d;
}

double spectrum_distance(const InnerFunction& theta, Complex p) {
    double d = boundary_spectrum_distance(theta, p);
    for (const auto& z : theta.zeros()) d = std::min(d, std::abs(p - z.point));
    return d;
}

}  // namespace modelspace
