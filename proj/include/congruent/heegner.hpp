#pragma once

// Heegner points on X0(N) for E(n) and the end-to-end congruent number check.
//
// A Heegner point is the root tau = (-B + sqrt D) / (2A) of a primitive form
// (A, B, C) with N | A, B = r (mod 2N) and r^2 = D (mod 4N). Summing the modular
// parametrization Phi(tau) = sum_m (a_m / m) q^m over one tau per form class
// gives U in C / Lambda. If U is not 2-torsion, (p(U), p'(U)/2) is a rational
// point of infinite order, recovered exactly by continued fractions and then
// turned into a right triangle of area n.

#include "congruent/arith.hpp"
#include "congruent/curve.hpp"
#include "congruent/lattice.hpp"
#include "congruent/lseries.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace congruent {

/// Root number rule for E(n): -1 exactly when n = 5, 6, 7 (mod 8).
inline int epsilon_sign(std::int64_t n) {
    const std::int64_t r = mod_floor(n, 8);
    return (r == 5 || r == 6 || r == 7) ? -1 : 1;
}

// ---------------------------------------------------------------------------
// Binary quadratic forms

struct QuadraticForm {
    std::int64_t a = 1;
    std::int64_t b = 0;
    std::int64_t c = 1;

    __int128 discriminant() const { return static_cast<__int128>(b) * b - static_cast<__int128>(4) * a * c; }
    bool is_primitive() const { return std::gcd(std::gcd(a, b), c) == 1; }

    friend auto operator<=>(const QuadraticForm&, const QuadraticForm&) = default;
};

/// Reduced representative (|B| <= A <= C, B >= 0 if |B| = A or A = C) of a
/// positive definite form's SL2(Z) class.
inline QuadraticForm reduce_form(const QuadraticForm& f) {
    if (f.a <= 0 || f.discriminant() >= 0) throw std::invalid_argument("reduce_form: form must be positive definite");
    __int128 a = f.a, b = f.b, c = f.c;
    for (;;) {
        if (b > a || b <= -a) {
            // b -> b + 2ak, landing in (-a, a]
            __int128 k = (a - b) / (2 * a);
            if ((a - b) % (2 * a) < 0) --k;
            __int128 nb = b + 2 * a * k;
            c = c + k * b + k * k * a;
            b = nb;
            continue;
        }
        if (a > c || (a == c && b < 0)) {
            std::swap(a, c);
            b = -b;
            continue;
        }
        break;
    }
    return {static_cast<std::int64_t>(a), static_cast<std::int64_t>(b), static_cast<std::int64_t>(c)};
}

inline bool is_fundamental_discriminant(std::int64_t d) {
    if (d == 0 || d == 1) return false;
    const std::int64_t m = mod_floor(d, 4);
    const std::int64_t ad = d < 0 ? -d : d;
    if (m == 1) return is_square_free(ad);
    if (m != 0) return false;
    const std::int64_t q = d / 4;
    const std::int64_t qm = mod_floor(q, 4);
    return (qm == 2 || qm == 3) && is_square_free(q < 0 ? -q : q);
}

/// Number of reduced primitive forms of discriminant D < 0.
inline std::int64_t class_number(std::int64_t d) {
    if (d >= 0 || !is_fundamental_discriminant(d)) {
        throw std::invalid_argument("class_number: need a negative fundamental discriminant, got " + std::to_string(d));
    }
    std::int64_t h = 0;
    for (std::int64_t a = 1; 3 * a * a <= -d; ++a) {
        for (std::int64_t b = -a + 1; b <= a; ++b) {
            const std::int64_t num = b * b - d;
            if (num % (4 * a) != 0) continue;
            const std::int64_t c = num / (4 * a);
            if (c < a || (c == a && b < 0)) continue;
            if (std::gcd(std::gcd(a, b), c) != 1) continue;
            ++h;
        }
    }
    return h;
}

// ---------------------------------------------------------------------------
// Discriminant selection

struct DiscriminantData {
    std::int64_t d = 0;
    std::int64_t class_number = 0;
    /// Least r in [0, 2N) with r^2 = D (mod 4N).
    std::int64_t r = 0;
};

/// All r in [0, 2N) with r^2 = D (mod 4N), ascending; D must be coprime to 2N.
inline std::vector<std::int64_t> heegner_roots(std::int64_t conductor, std::int64_t d) {
    const std::int64_t modulus = 4 * conductor;
    std::vector<std::vector<Residue>> per_prime;
    for (const auto& f : factorize(modulus)) {
        std::vector<Residue> roots;
        for (std::int64_t x : unit_sqrts_mod_prime_power(d, f.prime, f.exponent)) roots.push_back({x, f.value()});
        if (roots.empty()) return {};
        per_prime.push_back(std::move(roots));
    }
    std::vector<std::int64_t> out;
    std::vector<std::size_t> idx(per_prime.size(), 0);
    for (;;) {
        std::vector<Residue> pick;
        for (std::size_t i = 0; i < per_prime.size(); ++i) pick.push_back(per_prime[i][idx[i]]);
        out.push_back(crt_combine(pick).value % (2 * conductor));
        std::size_t i = 0;
        while (i < idx.size() && ++idx[i] == per_prime[i].size()) idx[i++] = 0;
        if (i == idx.size()) break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// True when D is usable: odd, fundamental, negative, coprime to 2N, and a square mod 4N.
inline bool is_admissible_discriminant(std::int64_t conductor, std::int64_t d) {
    if (d >= 0 || d % 2 == 0 || !is_fundamental_discriminant(d)) return false;
    if (std::gcd(-d, 2 * conductor) != 1) return false;
    return !heegner_roots(conductor, d).empty();
}

inline DiscriminantData discriminant_data(std::int64_t conductor, std::int64_t d) {
    if (!is_admissible_discriminant(conductor, d)) {
        throw std::invalid_argument("discriminant " + std::to_string(d) + " is not admissible for N = " + std::to_string(conductor));
    }
    return {d, class_number(d), heegner_roots(conductor, d).front()};
}

/// The admissible D of smallest |D| with |D| > after_abs, up to |D| <= max_abs.
inline std::optional<DiscriminantData> choose_discriminant(std::int64_t conductor, std::int64_t max_abs = 10000,
                                                          std::int64_t after_abs = 0) {
    for (std::int64_t a = after_abs + 1; a <= max_abs; ++a) {
        if (is_admissible_discriminant(conductor, -a)) return discriminant_data(conductor, -a);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Heegner forms

struct HeegnerForm {
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::int64_t c = 0;
    std::int64_t d = 0;
    std::int64_t r = 0;

    QuadraticForm form() const { return {a, b, c}; }

    /// tau = (-B + sqrt D) / (2A), Im tau = sqrt|D| / (2A) > 0.
    Complex tau(mpfr_prec_t bits) const {
        Real two_a(2 * a, bits);
        return {Real(-b, bits) / two_a, sqrt(Real(-d, bits)) / two_a};
    }

    double tau_imag() const { return std::sqrt(static_cast<double>(-d)) / (2.0 * static_cast<double>(a)); }
};

/// One Heegner form per class of discriminant D, searching A = N, 2N, 3N, ...
/// and keeping the first form seen in each reduced class.
inline std::vector<HeegnerForm> heegner_representatives(std::int64_t conductor, std::int64_t d, std::int64_t r) {
    const std::int64_t two_n = 2 * conductor;
    const __int128 four_n = 4 * static_cast<__int128>(conductor);
    if ((static_cast<__int128>(r) * r - d) % four_n != 0) {
        throw std::invalid_argument("heegner_representatives: r^2 != D (mod 4N)");
    }
    const std::int64_t h = class_number(d);
    std::map<QuadraticForm, HeegnerForm> found;
    const std::int64_t max_k = std::max<std::int64_t>(1000, 20 * (-d));
    for (std::int64_t k = 1; static_cast<std::int64_t>(found.size()) < h; ++k) {
        if (k > max_k) throw std::logic_error("heegner_representatives: enumeration bound exceeded (wrong r?)");
        const std::int64_t a = conductor * k;
        const __int128 four_a = 4 * static_cast<__int128>(a);
        // B = r (mod 2N) in the window (-A, A]; B and B + 2A give the same point.
        const std::int64_t r0 = mod_floor(r, two_n);
        for (std::int64_t b = r0 - two_n * ((r0 + a - 1) / two_n); b <= a; b += two_n) {
            const __int128 num = static_cast<__int128>(b) * b - d;
            if (num % four_a != 0) continue;
            const auto c = static_cast<std::int64_t>(num / four_a);
            QuadraticForm f{a, b, c};
            if (!f.is_primitive()) continue;
            found.try_emplace(reduce_form(f), HeegnerForm{a, b, c, d, r});
        }
    }
    std::vector<HeegnerForm> out;
    for (auto& [reduced, form] : found) out.push_back(form);
    std::sort(out.begin(), out.end(), [](const HeegnerForm& x, const HeegnerForm& y) {
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Modular parametrization

class CoefficientsTooShort : public std::runtime_error {
public:
    CoefficientsTooShort(std::int64_t required, std::int64_t available)
        : std::runtime_error("coefficient table too small: need M = " + std::to_string(required) + ", have " +
                             std::to_string(available)),
          required_(required) {}
    std::int64_t required() const { return required_; }

private:
    std::int64_t required_;
};

/// Truncation point M for Phi at Im tau = y so that the tail is below 10^-digits.
/// With |a_m / m| <= 1 the tail is at most sum_{m>M} |q|^m = |q|^{M+1} / (1 - |q|).
/// (|a_m| <= d(m) sqrt(m), and d(m) <= sqrt(m) for every m = 1 mod 4 where a_m
/// can be nonzero.)
inline std::int64_t phi_terms_needed(double tau_imag, unsigned digits) {
    const double log_q = -2.0 * std::numbers::pi * tau_imag;  // log |q| < 0
    const double log_tail_den = std::log1p(-std::exp(log_q));
    const double target = -static_cast<double>(digits) * std::log(10.0);
    // (M + 1) log|q| - log(1 - |q|) <= target
    const double m_plus_1 = (target + log_tail_den) / log_q;
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(m_plus_1)));
}

/// Decimal digits needed inside phi_eval for a result accurate to `digits`.
inline unsigned phi_working_digits(unsigned digits, std::int64_t terms) {
    return digits + kGuardDigits + static_cast<unsigned>(std::ceil(std::log10(static_cast<double>(terms) + 1.0)));
}

struct PhiValue {
    Complex value;
    std::int64_t terms = 0;
};

/// Phi(tau) = sum_{m <= M} (a_m / m) e^{2 pi i m tau}, M from phi_terms_needed
/// unless `terms_override` is positive.
inline PhiValue phi_eval(const Complex& tau, const CoefficientTable& coeffs, unsigned digits,
                         std::int64_t terms_override = 0) {
    if (tau.im.sign() <= 0) throw std::invalid_argument("phi_eval: tau must lie in the upper half plane");
    const std::int64_t terms = terms_override > 0 ? terms_override : phi_terms_needed(tau.im.to_double(), digits);
    if (coeffs.limit() < terms) throw CoefficientsTooShort(terms, coeffs.limit());

    const mpfr_prec_t bits = digits_to_bits(phi_working_digits(digits, terms));
    const Real two_pi = Real::pi(bits) * 2L;
    const Complex t = tau.re.precision() >= bits ? tau : Complex(tau.re.at_precision(bits), tau.im.at_precision(bits));
    // q = e^{2 pi i tau} = e^{-2 pi Im tau} (cos 2 pi Re tau + i sin 2 pi Re tau)
    const Complex q = exp(Complex(-(two_pi * t.im), two_pi * t.re));

    Complex power = q;
    Complex sum = Complex::zero(bits);
    Real t1(0L, bits), t2(0L, bits), term(0L, bits);
    for (std::int64_t m = 1; m <= terms; ++m) {
        if (m > 1) power.mul_in_place(q, t1, t2);
        const std::int64_t a_m = coeffs[m];
        if (a_m == 0) continue;
        mpfr_mul_si(term.raw(), power.re.raw(), a_m, MPFR_RNDN);
        mpfr_div_si(term.raw(), term.raw(), m, MPFR_RNDN);
        mpfr_add(sum.re.raw(), sum.re.raw(), term.raw(), MPFR_RNDN);
        mpfr_mul_si(term.raw(), power.im.raw(), a_m, MPFR_RNDN);
        mpfr_div_si(term.raw(), term.raw(), m, MPFR_RNDN);
        mpfr_add(sum.im.raw(), sum.im.raw(), term.raw(), MPFR_RNDN);
    }
    return {std::move(sum), terms};
}

/// Largest truncation point needed over a set of forms.
inline std::int64_t heegner_terms_needed(const std::vector<HeegnerForm>& forms, unsigned digits) {
    std::int64_t m = 1;
    for (const auto& f : forms) m = std::max(m, phi_terms_needed(f.tau_imag(), digits));
    return m;
}

struct HeegnerSum {
    Complex raw;      // sum of Phi(tau_i)
    Complex reduced;  // raw mod the lattice
    std::int64_t terms = 0;
};

/// U = sum Phi(tau_i), evaluated concurrently over the forms (the sum is taken
/// in form order, so the result is independent of scheduling).
inline HeegnerSum heegner_sum(const std::vector<HeegnerForm>& forms, const CoefficientTable& coeffs,
                              const PeriodLattice& lat, unsigned digits, std::int64_t terms_override = 0,
                              bool parallel = true) {
    const mpfr_prec_t bits = lat.bits();
    HeegnerSum out{Complex::zero(bits), Complex::zero(bits), 0};
    if (forms.empty()) return out;

    const mpfr_prec_t tau_bits = digits_to_bits(digits + 2 * kGuardDigits);
    std::vector<std::future<PhiValue>> pending;
    for (const auto& f : forms) {
        pending.push_back(std::async(parallel ? std::launch::async : std::launch::deferred,
                                     [&coeffs, f, tau_bits, digits, terms_override] {
                                         return phi_eval(f.tau(tau_bits), coeffs, digits, terms_override);
                                     }));
    }
    for (auto& p : pending) {
        PhiValue v = p.get();
        out.raw += v.value;
        out.terms = std::max(out.terms, v.terms);
    }
    out.raw = Complex(out.raw.re.at_precision(bits), out.raw.im.at_precision(bits));
    out.reduced = reduce_mod_lattice(out.raw, lat);
    return out;
}

// ---------------------------------------------------------------------------
// End-to-end verification

enum class Verdict { Congruent, Inapplicable, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Congruent: return "Congruent";
        case Verdict::Inapplicable: return "Inapplicable";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

/// Supplies a_m for m <= limit (e.g. from a cache). The default computes them.
using CoefficientSource = std::function<CoefficientTable(std::int64_t n, std::int64_t limit)>;

struct VerifyConfig {
    unsigned digits = 60;
    std::int64_t terms = 0;                 // 0: automatic from the tail bound
    std::optional<std::int64_t> discriminant;  // force this D
    Rational lattice_scale = 1;             // Phi lands in lattice_scale^-1 Lambda
    bool double_first = false;
    bool force_attempt = false;             // run even when the root number is +1
    std::int64_t max_abs_discriminant = 10000;
    int precision_doublings = 2;            // retry at 2P, 4P
    bool parallel = true;
};

struct DiscriminantAttempt {
    std::int64_t d = 0;
    std::int64_t class_number = 0;
    std::int64_t r = 0;
    std::string u;  // U mod lattice, rendered
    bool torsion = false;
};

struct Certificate {
    std::int64_t n = 0;
    Verdict verdict = Verdict::Inconclusive;
    int epsilon = 1;
    std::int64_t conductor = 0;

    std::int64_t d = 0;
    std::int64_t r = 0;
    std::int64_t class_number = 0;
    std::vector<HeegnerForm> forms;
    std::optional<Complex> u;          // raw Heegner sum
    std::optional<Complex> u_reduced;  // U mod lattice

    std::optional<RationalPoint> point;
    std::optional<RationalPoint> doubled_point;  // set when the triangle came from 2P
    std::optional<Triangle> triangle;

    // Diagnostics
    unsigned digits_used = 0;
    std::int64_t terms = 0;
    std::string imag_residual;
    std::string torsion_distance;
    std::string reconstruction_residual;
    std::vector<DiscriminantAttempt> attempts;
    std::string reason;

    /// Exact re-check of the congruent claim, independent of all numerics.
    bool exact_checks_pass() const {
        if (!point || !triangle) return false;
        const auto curve = CongruentCurve::make(n);
        return on_curve(*point, curve) && !is_torsion(*point) && triangle->is_valid_for(n);
    }
};

inline CoefficientSource compute_coefficients_source() {
    return [](std::int64_t n, std::int64_t limit) { return coefficients(n, limit); };
}

namespace detail {

inline std::string render(const Real& x, int digits = 25) { return x.to_string(digits); }

struct SumAtPrecision {
    PeriodLattice lattice;
    HeegnerSum sum;
    Complex scaled;
};

inline SumAtPrecision heegner_sum_at(const Certificate& cert, const VerifyConfig& cfg, unsigned digits,
                                     const CoefficientSource& source) {
    PeriodLattice lat = periods(cert.n, digits);
    const std::int64_t terms = cfg.terms > 0 ? cfg.terms : heegner_terms_needed(cert.forms, digits);
    CoefficientTable coeffs = source(cert.n, terms);
    HeegnerSum sum = heegner_sum(cert.forms, coeffs, lat, digits, cfg.terms, cfg.parallel);
    const mpfr_prec_t bits = lat.bits();
    Complex scaled = sum.raw * cfg.lattice_scale.to_real(bits);
    return {std::move(lat), std::move(sum), std::move(scaled)};
}

}  // namespace detail

/// Runs the Heegner point construction for n and returns a certificate. Only a
/// point and triangle that pass exact rational checks yield Congruent.
inline Certificate verify(std::int64_t n, const VerifyConfig& cfg = {},
                          const CoefficientSource& source = compute_coefficients_source()) {
    if (!is_square_free(n)) throw std::invalid_argument("n must be a square-free positive integer, got " + std::to_string(n));
    if (cfg.digits < 30) throw std::invalid_argument("precision must be at least 30 digits");
    if (cfg.terms != 0 && cfg.terms < 16) throw std::invalid_argument("term override must be at least 16");
    if (cfg.lattice_scale.sign() <= 0) throw std::invalid_argument("lattice scale must be positive");

    const auto curve = CongruentCurve::make(n);
    Certificate cert;
    cert.n = n;
    cert.conductor = curve.conductor;
    cert.epsilon = epsilon_sign(n);

    if (cert.epsilon == 1 && !cfg.force_attempt) {
        cert.verdict = Verdict::Inapplicable;
        cert.reason = "root number is +1 (n mod 8 not in {5,6,7}); the Heegner point is torsion";
        return cert;
    }

    // Find a discriminant whose Heegner sum is not 2-torsion.
    std::optional<detail::SumAtPrecision> current;
    std::int64_t after = 0;
    for (;;) {
        DiscriminantData data;
        if (cfg.discriminant) {
            if (after != 0) break;
            data = discriminant_data(cert.conductor, *cfg.discriminant);
        } else {
            auto next = choose_discriminant(cert.conductor, cfg.max_abs_discriminant, after);
            if (!next) break;
            data = *next;
        }
        after = -data.d;

        cert.d = data.d;
        cert.r = data.r;
        cert.class_number = data.class_number;
        cert.forms = heegner_representatives(cert.conductor, data.d, data.r);

        auto s = detail::heegner_sum_at(cert, cfg, cfg.digits, source);
        const Real dist = distance_to_torsion_image(s.scaled, s.lattice);
        const bool torsion = dist < default_torsion_tolerance(s.lattice);
        cert.attempts.push_back({data.d, data.class_number, data.r, reduce_mod_lattice(s.scaled, s.lattice).to_string(20), torsion});
        cert.torsion_distance = detail::render(dist, 10);
        if (!torsion) {
            current = std::move(s);
            break;
        }
    }
    if (!current) {
        cert.verdict = Verdict::Inconclusive;
        cert.reason = cfg.discriminant ? "Heegner sum lies in S_n for the forced discriminant"
                                       : "every admissible discriminant up to the bound gave a Heegner sum in S_n";
        return cert;
    }

    unsigned digits = cfg.digits;
    for (int attempt = 0; attempt <= cfg.precision_doublings; ++attempt, digits *= 2) {
        if (attempt > 0) current = detail::heegner_sum_at(cert, cfg, digits, source);
        const auto& s = *current;
        cert.digits_used = digits;
        cert.terms = s.sum.terms;
        cert.u = s.sum.raw;
        cert.u_reduced = reduce_mod_lattice(s.scaled, s.lattice);

        CurvePointApprox approx;
        try {
            approx = lattice_to_curve_point(s.scaled, s.lattice);
        } catch (const PoleError& e) {
            cert.reason = e.what();
            break;
        }
        cert.imag_residual = detail::render(approx.imag_residual, 10);

        const mpfr_prec_t bits = approx.x.precision();
        const BigInt bound = BigInt(Real::pow10(static_cast<long>(digits / 2) - 5, bits).round_to_integer());
        auto x = rational_reconstruct(approx.x, bound);
        if (!x) {
            cert.reason = "rational reconstruction of x failed at " + std::to_string(digits) + " digits";
            continue;
        }
        auto y = is_rational_square(curve.rhs(*x));
        if (!y || y->is_zero()) {
            cert.reason = "reconstructed x = " + x->to_string() + " does not give a rational non-torsion point";
            continue;
        }
        // Sign of y from the numerical value; cross-check magnitudes.
        Rational yy = approx.y.sign() < 0 ? -*y : *y;
        cert.reconstruction_residual = detail::render(abs(approx.x - x->to_real(bits)), 10);
        const Real y_err = abs(approx.y - yy.to_real(bits));
        const Real y_tol = Real::pow10(-static_cast<long>(digits / 2), bits) * (abs(approx.y) + Real(1L, bits));
        if (y_err > y_tol) {
            cert.reason = "y cross-check failed for x = " + x->to_string();
            continue;
        }

        RationalPoint p = RationalPoint::affine(*x, yy);
        if (!on_curve(p, curve)) throw std::logic_error("verify: reconstructed point is off the curve");
        cert.point = p;
        if (cfg.double_first || !detail::triangle_if_squares(p.x, n)) cert.doubled_point = point_double(p, curve);
        cert.triangle = triangle_from_point(p, curve, cfg.double_first);
        cert.verdict = cert.exact_checks_pass() ? Verdict::Congruent : Verdict::Inconclusive;
        cert.reason = cert.verdict == Verdict::Congruent ? "" : "exact certificate checks failed";
        return cert;
    }
    cert.verdict = Verdict::Inconclusive;
    return cert;
}

}  // namespace congruent
