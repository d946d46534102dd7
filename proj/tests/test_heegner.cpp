#include "congruent/heegner.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace congruent;

namespace {

Rational q(const char* s) { return Rational::parse(s); }

// Shared so the expensive runs happen once per process.
const Certificate& verified(std::int64_t n) {
    static std::map<std::int64_t, Certificate> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, verify(n)).first;
    return it->second;
}

// Smallest distance from z to w + lattice.
Real lattice_distance(const Complex& z, const Complex& w, const PeriodLattice& lat) {
    Complex d = reduce_mod_lattice(z - w, lat);
    Real best = abs(d);
    for (long dm = -1; dm <= 0; ++dm) {
        for (long dk = -1; dk <= 0; ++dk) {
            Real cand = hypot(d.re + lat.omega1 * dm, d.im + lat.omega1 * dk);
            if (cand < best) best = cand;
        }
    }
    return best;
}

}  // namespace

TEST(Epsilon, RuleByResidueMod8) {
    EXPECT_EQ(epsilon_sign(5), -1);
    EXPECT_EQ(epsilon_sign(13), -1);
    EXPECT_EQ(epsilon_sign(6), -1);
    EXPECT_EQ(epsilon_sign(7), -1);
    EXPECT_EQ(epsilon_sign(1), 1);
    EXPECT_EQ(epsilon_sign(2), 1);
    EXPECT_EQ(epsilon_sign(3), 1);
    EXPECT_EQ(epsilon_sign(17), 1);
}

TEST(ClassNumber, Examples) {
    EXPECT_EQ(class_number(-31), 3);
    EXPECT_EQ(class_number(-55), 4);
    EXPECT_EQ(class_number(-4), 1);
    EXPECT_EQ(class_number(-3), 1);
    EXPECT_EQ(class_number(-23), 3);
    EXPECT_THROW(class_number(-12), std::invalid_argument);
    EXPECT_THROW(class_number(5), std::invalid_argument);
}

TEST(ClassNumber, MatchesEnumerationForAllFundamentalBelow10000) {
    int checked = 0;
    for (std::int64_t d = -3; d > -10000; --d) {
        const bool fundamental = oracle::is_fundamental_naive(d);
        ASSERT_EQ(is_fundamental_discriminant(d), fundamental) << d;
        if (!fundamental) continue;
        ASSERT_EQ(class_number(d), oracle::class_number_by_enumeration(d)) << d;
        ++checked;
    }
    EXPECT_EQ(checked, 3043);
}

TEST(ReduceForm, ProducesReducedEquivalentForm) {
    QuadraticForm f{8000, 3313, 343};
    auto r = reduce_form(f);
    EXPECT_EQ(r.discriminant(), -31);
    EXPECT_LE(std::abs(r.b), r.a);
    EXPECT_LE(r.a, r.c);
}

TEST(ChooseDiscriminant, ConductorOf5) {
    auto data = choose_discriminant(800);
    ASSERT_TRUE(data);
    EXPECT_EQ(data->d, -31);
    EXPECT_EQ(data->class_number, 3);
    EXPECT_EQ(mod_floor(data->r * data->r - data->d, 3200), 0);
    auto roots = heegner_roots(800, -31);
    EXPECT_NE(std::find(roots.begin(), roots.end(), 113), roots.end());
    EXPECT_EQ(data->r, roots.front());
}

TEST(ChooseDiscriminant, ConductorOf13) {
    // -23 is the smallest admissible discriminant; its Heegner point is torsion,
    // so verify moves on to -55.
    auto first = choose_discriminant(5408);
    ASSERT_TRUE(first);
    EXPECT_EQ(first->d, -23);
    auto next = choose_discriminant(5408, 10000, 23);
    ASSERT_TRUE(next);
    EXPECT_EQ(next->d, -55);
    EXPECT_EQ(next->class_number, 4);
    EXPECT_EQ(mod_floor(next->r * next->r + 55, 4 * 5408), 0);
    auto roots = heegner_roots(5408, -55);
    EXPECT_NE(std::find(roots.begin(), roots.end(), mod_floor(-8547, 10816)), roots.end());
}

TEST(ChooseDiscriminant, AdmissibilityConditions) {
    EXPECT_FALSE(is_admissible_discriminant(800, -4));    // even
    EXPECT_FALSE(is_admissible_discriminant(800, -15));   // shares 5 with 2N
    EXPECT_FALSE(is_admissible_discriminant(800, -27));   // not fundamental
    EXPECT_FALSE(is_admissible_discriminant(800, -7));    // no root mod 4N
    EXPECT_TRUE(is_admissible_discriminant(800, -31));
    EXPECT_THROW(discriminant_data(800, -7), std::invalid_argument);
    EXPECT_FALSE(choose_discriminant(800, 30));
    for (std::int64_t n : {5, 6, 7, 13, 14, 15, 21, 30}) {
        const std::int64_t big_n = 32 * n * n;
        auto data = choose_discriminant(big_n);
        ASSERT_TRUE(data) << n;
        // Nothing smaller qualifies.
        for (std::int64_t d = -3; d > data->d; --d) {
            const bool ok = d % 2 != 0 && oracle::is_fundamental_naive(d) && std::gcd(-d, 2 * big_n) == 1 &&
                            !heegner_roots(big_n, d).empty();
            EXPECT_FALSE(ok) << n << " " << d;
        }
    }
}

TEST(HeegnerForms, ConductorOf5) {
    auto forms = heegner_representatives(800, -31, 113);
    ASSERT_EQ(forms.size(), 3u);
    std::set<QuadraticForm> reduced;
    for (const auto& f : forms) {
        EXPECT_EQ(f.b * f.b - 4 * f.a * f.c, -31);
        EXPECT_EQ(f.a % 800, 0);
        EXPECT_EQ(mod_floor(f.b - 113, 1600), 0);
        EXPECT_TRUE(f.form().is_primitive());
        EXPECT_GT(f.tau_imag(), 0.0);
        reduced.insert(reduce_form(f.form()));
    }
    EXPECT_EQ(reduced.size(), 3u);
    // The first form found for each class.
    EXPECT_EQ(forms[0].a, 800);
    EXPECT_EQ(forms[0].b, 113);
    EXPECT_EQ(forms[0].c, 4);
}

TEST(HeegnerForms, ConductorOf13) {
    auto forms = heegner_representatives(5408, -55, mod_floor(-8547, 10816));
    ASSERT_EQ(forms.size(), 4u);
    std::set<QuadraticForm> reduced;
    for (const auto& f : forms) {
        EXPECT_EQ(f.b * f.b - 4 * f.a * f.c, -55);
        EXPECT_EQ(f.a % 5408, 0);
        EXPECT_EQ(mod_floor(f.b + 8547, 10816), 0);
        reduced.insert(reduce_form(f.form()));
    }
    EXPECT_EQ(reduced.size(), 4u);
    EXPECT_THROW(heegner_representatives(5408, -55, 1), std::invalid_argument);
}

TEST(Phi, LeadingTermDominatesHighInUpperHalfPlane) {
    // |q|^5 is about 1e-137, so the evaluation needs more digits than that.
    const mpfr_prec_t bits = digits_to_bits(170);
    auto coeffs = coefficients(5, 100);
    Complex tau(Real(0L, bits), Real(10L, bits));
    auto v = phi_eval(tau, coeffs, 150);
    Complex q = exp(Complex(-(Real::pi(bits) * 20L), Real(0L, bits)));
    // a_2 .. a_8 vanish, so the error is of order |q|^9.
    EXPECT_TRUE(abs(v.value - q) < abs(q) * abs(q) * abs(q) * abs(q) * abs(q));
    EXPECT_GE(v.terms, 1);
}

TEST(Phi, ConjugationSymmetry) {
    const mpfr_prec_t bits = digits_to_bits(60);
    auto forms = heegner_representatives(800, -31, 113);
    const auto m = heegner_terms_needed(forms, 40);
    auto coeffs = coefficients(5, m);
    for (const auto& f : forms) {
        Complex tau = f.tau(bits);
        auto a = phi_eval(tau, coeffs, 40);
        auto b = phi_eval(Complex(-tau.re, tau.im), coeffs, 40);
        EXPECT_TRUE(abs(b.value - conj(a.value)) < Real("1e-40", bits));
    }
}

TEST(Phi, TruncationBoundIsSufficient) {
    const mpfr_prec_t bits = digits_to_bits(60);
    auto forms = heegner_representatives(800, -31, 113);
    const auto& f = forms.back();  // smallest imaginary part
    const unsigned digits = 40;
    const auto m = phi_terms_needed(f.tau_imag(), digits);
    auto coeffs = coefficients(5, 2 * m);
    auto at_bound = phi_eval(f.tau(bits), coeffs, digits);
    auto doubled = phi_eval(f.tau(bits), coeffs, digits, 2 * m);
    EXPECT_EQ(at_bound.terms, m);
    EXPECT_TRUE(abs(at_bound.value - doubled.value) < Real::pow10(-static_cast<long>(digits), bits));
}

TEST(Phi, ErrorsNameRequiredLength) {
    const mpfr_prec_t bits = digits_to_bits(40);
    auto coeffs = coefficients(5, 20);
    auto forms = heegner_representatives(800, -31, 113);
    try {
        phi_eval(forms[0].tau(bits), coeffs, 40);
        FAIL() << "expected CoefficientsTooShort";
    } catch (const CoefficientsTooShort& e) {
        EXPECT_EQ(e.required(), phi_terms_needed(forms[0].tau_imag(), 40));
        EXPECT_NE(std::string(e.what()).find(std::to_string(e.required())), std::string::npos);
    }
    EXPECT_THROW(phi_eval(Complex(Real(0L, bits), Real(-1L, bits)), coeffs, 40), std::invalid_argument);
}

TEST(HeegnerSum, EmptyIsZero) {
    auto lat = periods(5, 40);
    auto s = heegner_sum({}, coefficients(5, 10), lat, 40);
    EXPECT_TRUE(s.raw.re.is_zero());
    EXPECT_TRUE(s.raw.im.is_zero());
}

TEST(HeegnerSum, FiveIsRealAndOutsideTorsion) {
    auto lat = periods(5, 40);
    auto forms = heegner_representatives(800, -31, 113);
    auto coeffs = coefficients(5, heegner_terms_needed(forms, 40));
    auto s = heegner_sum(forms, coeffs, lat, 40);
    const mpfr_prec_t bits = lat.bits();
    // Real part matches the known value mod the lattice; the sum itself is real.
    Complex known(Real("-0.874107405430", bits), Real(0L, bits));
    EXPECT_TRUE(lattice_distance(s.raw, known, lat) < Real("1e-11", bits));
    EXPECT_TRUE(abs(s.raw.im) < Real("1e-35", bits));
    EXPECT_FALSE(in_torsion_image(s.raw, lat));
    auto pt = lattice_to_curve_point(s.reduced, lat);
    EXPECT_EQ(pt.x.to_string(7), "11.67361");
    EXPECT_TRUE(abs(abs(pt.y) - Real("36.041087962963", bits)) < Real("1e-11", bits));
    // Serial and parallel evaluation agree exactly.
    auto serial = heegner_sum(forms, coeffs, lat, 40, 0, false);
    EXPECT_TRUE(serial.raw.re == s.raw.re && serial.raw.im == s.raw.im);
}

TEST(HeegnerSum, ThirteenMatchesKnownValue) {
    auto lat = periods(13, 60);
    auto forms = heegner_representatives(5408, -55, mod_floor(-8547, 10816));
    auto coeffs = coefficients(13, heegner_terms_needed(forms, 60));
    auto s = heegner_sum(forms, coeffs, lat, 60);
    const mpfr_prec_t bits = lat.bits();
    Complex known(Real("-2.3665268305", bits), Real(0L, bits));
    EXPECT_TRUE(lattice_distance(s.raw, known, lat) < Real("1e-9", bits));
    Complex real_axis(s.reduced.re, Real(0L, bits));
    EXPECT_TRUE(lattice_distance(s.raw, real_axis, lat) < Real("1e-30", bits));
}

TEST(HeegnerSum, OtherRootGivesSamePointUpToSignAndTorsion) {
    // Different roots r permute the classes and may flip U to -U or shift by torsion.
    auto lat = periods(5, 40);
    auto roots = heegner_roots(800, -31);
    ASSERT_GE(roots.size(), 2u);
    const mpfr_prec_t bits = lat.bits();
    auto base_forms = heegner_representatives(800, -31, roots[0]);
    auto base = heegner_sum(base_forms, coefficients(5, heegner_terms_needed(base_forms, 40)), lat, 40);
    const Real x0 = lattice_to_curve_point(base.reduced, lat).x;
    int compared = 0;
    for (std::int64_t r : roots) {
        auto forms = heegner_representatives(800, -31, r);
        auto s = heegner_sum(forms, coefficients(5, heegner_terms_needed(forms, 40)), lat, 40);
        if (in_torsion_image(s.raw, lat)) continue;
        // x(U) or x(U + T) for a 2-torsion T.
        bool matches = false;
        for (const auto& t : torsion_image_set(lat)) {
            Complex shifted = s.raw + t;
            if (in_torsion_image(shifted, lat)) continue;
            Real x = lattice_to_curve_point(shifted, lat).x;
            if (abs(x - x0) < Real("1e-30", bits)) matches = true;
        }
        EXPECT_TRUE(matches) << "r = " << r;
        ++compared;
    }
    EXPECT_GE(compared, 2) << "of " << roots.size() << " roots";
}

TEST(Verify, Five) {
    const auto& c = verified(5);
    ASSERT_EQ(c.verdict, Verdict::Congruent) << c.reason;
    EXPECT_EQ(c.d, -31);
    EXPECT_EQ(c.conductor, 800);
    ASSERT_TRUE(c.point);
    EXPECT_EQ(c.point->x, q("1681/144"));
    EXPECT_EQ(abs(c.point->y), q("62279/1728"));
    EXPECT_FALSE(c.doubled_point);
    ASSERT_TRUE(c.triangle);
    EXPECT_EQ(c.triangle->a, q("20/3"));
    EXPECT_EQ(c.triangle->b, q("3/2"));
    EXPECT_EQ(c.triangle->c, q("41/6"));
    EXPECT_TRUE(c.exact_checks_pass());
}

TEST(Verify, FiveDoubleFirst) {
    VerifyConfig cfg;
    cfg.double_first = true;
    auto c = verify(5, cfg);
    ASSERT_EQ(c.verdict, Verdict::Congruent) << c.reason;
    ASSERT_TRUE(c.doubled_point);
    EXPECT_EQ(c.doubled_point->x, q("11183412793921/2234116132416"));
    EXPECT_EQ(abs(c.doubled_point->y), q("1791076534232245919/3339324446657665536"));
    EXPECT_EQ(c.triangle->a, q("4920/1519"));
    EXPECT_EQ(c.triangle->b, q("1519/492"));
    EXPECT_EQ(c.triangle->c, q("3344161/747348"));
}

TEST(Verify, Thirteen) {
    const auto& c = verified(13);
    ASSERT_EQ(c.verdict, Verdict::Congruent) << c.reason;
    EXPECT_EQ(c.d, -55);
    ASSERT_EQ(c.attempts.size(), 2u);
    EXPECT_EQ(c.attempts[0].d, -23);
    EXPECT_TRUE(c.attempts[0].torsion);
    EXPECT_EQ(c.point->x, q("11432100241/375584400"));
    EXPECT_EQ(abs(c.point->y), q("1105240264347961/7278825672000"));
    EXPECT_EQ(c.triangle->area(), Rational(13));
    EXPECT_TRUE(c.exact_checks_pass());
}

TEST(Verify, ForcedDiscriminant) {
    VerifyConfig cfg;
    cfg.discriminant = -55;
    auto c = verify(13, cfg);
    EXPECT_EQ(c.verdict, Verdict::Congruent);
    EXPECT_EQ(c.attempts.size(), 1u);
    cfg.discriminant = -23;
    auto t = verify(13, cfg);
    EXPECT_EQ(t.verdict, Verdict::Inconclusive);
    cfg.discriminant = -7;
    EXPECT_THROW(verify(13, cfg), std::invalid_argument);
}

TEST(Verify, RootNumberPlusOneIsInapplicable) {
    for (std::int64_t n : {1, 2, 3, 10, 11, 17}) {
        auto c = verify(n);
        EXPECT_EQ(c.verdict, Verdict::Inapplicable) << n;
        EXPECT_FALSE(c.point);
    }
}

TEST(Verify, CongruentResultsAreExact) {
    for (std::int64_t n : {6, 7, 14}) {
        auto c = verify(n);
        ASSERT_EQ(c.verdict, Verdict::Congruent) << n << ": " << c.reason;
        EXPECT_TRUE(on_curve(*c.point, CongruentCurve::make(n)));
        EXPECT_TRUE(c.triangle->is_valid_for(n));
    }
}

TEST(Verify, WrongLatticeScaleNeverClaimsCongruent) {
    VerifyConfig cfg;
    cfg.lattice_scale = Rational(BigInt(3), BigInt(7));
    cfg.precision_doublings = 0;
    auto c = verify(5, cfg);
    if (c.verdict == Verdict::Congruent) {
        EXPECT_TRUE(c.exact_checks_pass());
    } else {
        EXPECT_EQ(c.verdict, Verdict::Inconclusive);
        EXPECT_FALSE(c.reason.empty());
    }
}

TEST(Verify, RejectsBadInput) {
    EXPECT_THROW(verify(12), std::invalid_argument);
    EXPECT_THROW(verify(0), std::invalid_argument);
    VerifyConfig low;
    low.digits = 20;
    EXPECT_THROW(verify(5, low), std::invalid_argument);
    VerifyConfig few;
    few.terms = 8;
    EXPECT_THROW(verify(5, few), std::invalid_argument);
    VerifyConfig scale;
    scale.lattice_scale = Rational(0);
    EXPECT_THROW(verify(5, scale), std::invalid_argument);
}

TEST(Verify, DeterministicAcrossRunsAndScheduling) {
    VerifyConfig serial;
    serial.parallel = false;
    auto a = verify(13, serial);
    const auto& b = verified(13);
    EXPECT_EQ(a.verdict, b.verdict);
    EXPECT_EQ(*a.point, *b.point);
    EXPECT_TRUE(a.u->re == b.u->re && a.u->im == b.u->im);
    EXPECT_EQ(a.digits_used, b.digits_used);
    EXPECT_EQ(a.terms, b.terms);
}
