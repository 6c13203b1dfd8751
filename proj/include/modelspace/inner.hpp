#pragma once

// Finitely presented inner functions: a Blaschke product (explicit zeros plus
// an optional truncated parametric family) times an atomic singular factor.

#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace modelspace {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Boundary evaluation closer than this to a declared spectrum point is refused.
inline constexpr double kSpectrumRefusal = 1e-12;

// Reduces an angle to [0, 2*pi).
double canonical_angle(double theta);

// Shortest angular separation on the circle, in [0, pi].
double angular_gap(double a, double b);

struct BlaschkeZero {
    Complex point;
    int multiplicity = 1;
};

struct SingularAtom {
    double angle = 0.0;  // radians
    double mass = 0.0;
};

// Closed-form zero families z_n, n = 1..truncation:
//   "spiral": z_n = (1 - base^-n) * exp(i*(angle + twist/n))
//   "radial": z_n = (1 - base^-n) * exp(i*angle)
// Both accumulate at exp(i*angle), which is added to the declared
// accumulation angles automatically.
struct ZeroGenerator {
    std::string name;
    std::map<std::string, double> params;
    int truncation = 0;
};

struct SpectrumSet {
    std::vector<Complex> points;           // zeros (each listed once)
    std::vector<double> boundary_angles;   // atoms and accumulation angles, sorted, unique
};

class InnerFunction {
public:
    InnerFunction() = default;
    InnerFunction(std::vector<BlaschkeZero> zeros, std::vector<SingularAtom> atoms = {},
                  std::optional<ZeroGenerator> generator = std::nullopt,
                  std::vector<double> accumulation_angles = {});

    // z^n.
    static InnerFunction monomial(int n);
    // Blaschke product with the given zeros (multiplicity by repetition).
    static InnerFunction blaschke(std::span<const Complex> zeros);
    // Copy with the generator truncated at n terms.
    InnerFunction with_truncation(int n) const;

    const std::vector<BlaschkeZero>& explicit_zeros() const { return explicit_zeros_; }
    const std::vector<SingularAtom>& atoms() const { return atoms_; }
    const std::optional<ZeroGenerator>& generator() const { return generator_; }
    const std::vector<double>& accumulation_angles() const { return accumulation_; }
    int truncation() const { return generator_ ? generator_->truncation : 0; }

    // All zeros in use (explicit then generated), multiplicities merged per entry.
    const std::vector<BlaschkeZero>& zeros() const { return zeros_; }
    // Zeros with multiplicity expanded by repetition.
    std::vector<Complex> flat_zeros() const;
    int zero_count() const { return zero_count_; }

    bool is_finite_blaschke() const { return atoms_.empty(); }
    // Sorted unique boundary spectrum angles (atoms and accumulation points).
    const std::vector<double>& boundary_spectrum() const { return boundary_spectrum_; }

    Complex operator()(Complex z) const;

private:
    void build();

    std::vector<BlaschkeZero> explicit_zeros_;
    std::vector<SingularAtom> atoms_;
    std::optional<ZeroGenerator> generator_;
    std::vector<double> accumulation_;

    std::vector<BlaschkeZero> zeros_;
    std::vector<double> boundary_spectrum_;
    int zero_count_ = 0;
};

// Zeros of a named generator for n = 1..truncation.
std::vector<Complex> generate_zeros(const ZeroGenerator& gen);

Complex evaluate(const InnerFunction& theta, Complex z);

struct ValueAndDerivative {
    Complex value;
    Complex derivative;
};

// Theta(z) and Theta'(z) in one pass; same refusals as evaluate.
ValueAndDerivative evaluate_with_derivative(const InnerFunction& theta, Complex z);

// |Theta'(zeta)| for zeta on the circle; +inf at atoms or accumulation points.
double derivative_modulus_boundary(const InnerFunction& theta, Complex zeta);

// S_q(zeta) = sum (1-|z_n|^2)/|zeta-z_n|^q + sum s_j/|zeta-e^{i theta_j}|^q.
double ahern_clark_sum(const InnerFunction& theta, Complex zeta, double q);

bool level_set_contains(const InnerFunction& theta, double epsilon, Complex z);

SpectrumSet spectrum(const InnerFunction& theta);
double spectrum_distance(const InnerFunction& theta, Complex p);
// Distance from p to the boundary part of the spectrum only (+inf when empty).
double boundary_spectrum_distance(const InnerFunction& theta, Complex p);

}  // namespace modelspace
