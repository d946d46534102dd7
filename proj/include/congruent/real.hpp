#pragma once

// Arbitrary precision real and complex numbers over MPFR.
//
// Every Real carries its own precision (in bits). Binary operations produce a
// result at the larger of the two operand precisions, so a computation seeded
// with values at P digits stays at P digits without any global state. This keeps
// concurrent evaluation at different precisions safe.

#include <mpfr.h>
#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace congruent {

/// Bits needed to carry `digits` decimal digits, plus a few guard bits.
inline mpfr_prec_t digits_to_bits(unsigned digits) {
    return static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873623)) + 8;
}

inline unsigned bits_to_digits(mpfr_prec_t bits) {
    return static_cast<unsigned>(static_cast<double>(bits) * 0.30102999566398120);
}

class Real {
public:
    Real() : Real(0L, static_cast<mpfr_prec_t>(64)) {}

    Real(long value, mpfr_prec_t bits) {
        mpfr_init2(v_, bits);
        mpfr_set_si(v_, value, MPFR_RNDN);
    }

    Real(const mpz_class& value, mpfr_prec_t bits) {
        mpfr_init2(v_, bits);
        mpfr_set_z(v_, value.get_mpz_t(), MPFR_RNDN);
    }

    Real(double value, mpfr_prec_t bits) {
        mpfr_init2(v_, bits);
        mpfr_set_d(v_, value, MPFR_RNDN);
    }

    Real(const std::string& decimal, mpfr_prec_t bits) {
        mpfr_init2(v_, bits);
        if (mpfr_set_str(v_, decimal.c_str(), 10, MPFR_RNDN) != 0) {
            mpfr_clear(v_);
            throw std::invalid_argument("not a decimal number: " + decimal);
        }
    }

    static Real with_digits(long value, unsigned digits) { return Real(value, digits_to_bits(digits)); }

    static Real pi(mpfr_prec_t bits) {
        Real r(0L, bits);
        mpfr_const_pi(r.v_, MPFR_RNDN);
        return r;
    }

    /// 10^exponent at the given precision.
    static Real pow10(long exponent, mpfr_prec_t bits) {
        Real r(10L, bits);
        mpfr_pow_si(r.v_, r.v_, exponent, MPFR_RNDN);
        return r;
    }

    Real(const Real& other) {
        mpfr_init2(v_, mpfr_get_prec(other.v_));
        mpfr_set(v_, other.v_, MPFR_RNDN);
    }

    Real(Real&& other) noexcept {
        mpfr_init2(v_, MPFR_PREC_MIN);
        mpfr_swap(v_, other.v_);
    }

    Real& operator=(const Real& other) {
        if (this != &other) {
            mpfr_set_prec(v_, mpfr_get_prec(other.v_));
            mpfr_set(v_, other.v_, MPFR_RNDN);
        }
        return *this;
    }

    Real& operator=(Real&& other) noexcept {
        mpfr_swap(v_, other.v_);
        return *this;
    }

    ~Real() { mpfr_clear(v_); }

    mpfr_prec_t precision() const { return mpfr_get_prec(v_); }
    unsigned digits() const { return bits_to_digits(precision()); }

    /// Same value, rounded to a new precision.
    Real at_precision(mpfr_prec_t bits) const {
        Real r(0L, bits);
        mpfr_set(r.v_, v_, MPFR_RNDN);
        return r;
    }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }

    /// Base-2 exponent e with |x| in [2^(e-1), 2^e); very negative for zero.
    long exponent2() const {
        if (is_zero()) return -(1L << 40);
        return mpfr_get_exp(v_);
    }

    mpz_class floor_to_integer() const {
        mpz_class z;
        mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDD);
        return z;
    }

    mpz_class round_to_integer() const {
        mpz_class z;
        mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDN);
        return z;
    }

    /// Fixed-point rendering with `digits` significant digits.
    std::string to_string(int digits = 20) const {
        if (!is_finite()) return mpfr_nan_p(v_) ? "nan" : (sign() > 0 ? "inf" : "-inf");
        char* out = nullptr;
        mpfr_asprintf(&out, "%.*Rg", digits, v_);
        std::string s(out);
        mpfr_free_str(out);
        return s;
    }

    Real& operator+=(const Real& o) { widen(o); mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator-=(const Real& o) { widen(o); mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator*=(const Real& o) { widen(o); mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator/=(const Real& o) { widen(o); mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator*=(long k) { mpfr_mul_si(v_, v_, k, MPFR_RNDN); return *this; }
    Real& operator/=(long k) { mpfr_div_si(v_, v_, k, MPFR_RNDN); return *this; }
    Real& operator+=(long k) { mpfr_add_si(v_, v_, k, MPFR_RNDN); return *this; }
    Real& operator-=(long k) { mpfr_sub_si(v_, v_, k, MPFR_RNDN); return *this; }

    Real operator-() const {
        Real r(*this);
        mpfr_neg(r.v_, r.v_, MPFR_RNDN);
        return r;
    }

    friend Real operator+(Real a, const Real& b) { return a += b; }
    friend Real operator-(Real a, const Real& b) { return a -= b; }
    friend Real operator*(Real a, const Real& b) { return a *= b; }
    friend Real operator/(Real a, const Real& b) { return a /= b; }
    friend Real operator+(Real a, long k) { return a += k; }
    friend Real operator-(Real a, long k) { return a -= k; }
    friend Real operator*(Real a, long k) { return a *= k; }
    friend Real operator/(Real a, long k) { return a /= k; }
    friend Real operator*(long k, Real a) { return a *= k; }

    friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
    friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
    friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
    friend bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.v_, b.v_) != 0; }
    friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }

    friend Real sqrt(const Real& x) { return apply(x, mpfr_sqrt); }
    friend Real exp(const Real& x) { return apply(x, mpfr_exp); }
    friend Real log(const Real& x) { return apply(x, mpfr_log); }
    friend Real sin(const Real& x) { return apply(x, mpfr_sin); }
    friend Real cos(const Real& x) { return apply(x, mpfr_cos); }
    friend Real abs(const Real& x) { return apply(x, mpfr_abs); }
    friend Real floor(const Real& x) {
        Real r(0L, x.precision());
        mpfr_floor(r.v_, x.v_);
        return r;
    }
    friend Real atan2(const Real& y, const Real& x) {
        Real r(0L, std::max(y.precision(), x.precision()));
        mpfr_atan2(r.v_, y.v_, x.v_, MPFR_RNDN);
        return r;
    }
    friend Real hypot(const Real& x, const Real& y) {
        Real r(0L, std::max(y.precision(), x.precision()));
        mpfr_hypot(r.v_, x.v_, y.v_, MPFR_RNDN);
        return r;
    }
    friend Real pow(const Real& x, long k) {
        Real r(0L, x.precision());
        mpfr_pow_si(r.v_, x.v_, k, MPFR_RNDN);
        return r;
    }
    friend void sin_cos(const Real& x, Real& s, Real& c) {
        s = Real(0L, x.precision());
        c = Real(0L, x.precision());
        mpfr_sin_cos(s.v_, c.v_, x.v_, MPFR_RNDN);
    }

private:
    void widen(const Real& o) {
        if (o.precision() > precision()) mpfr_prec_round(v_, o.precision(), MPFR_RNDN);
    }

    static Real apply(const Real& x, int (*fn)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t)) {
        Real r(0L, x.precision());
        fn(r.v_, x.v_, MPFR_RNDN);
        return r;
    }

    mpfr_t v_;
};

struct Complex {
    Real re;
    Real im;

    Complex() = default;
    Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
    explicit Complex(const Real& r) : re(r), im(0L, r.precision()) {}

    static Complex zero(mpfr_prec_t bits) { return {Real(0L, bits), Real(0L, bits)}; }

    mpfr_prec_t precision() const { return std::max(re.precision(), im.precision()); }

    Complex& operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
    Complex& operator-=(const Complex& o) { re -= o.re; im -= o.im; return *this; }
    Complex& operator*=(const Complex& o) {
        Real r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = std::move(r);
        return *this;
    }
    Complex& operator/=(const Complex& o) {
        Real d = o.re * o.re + o.im * o.im;
        Real r = (re * o.re + im * o.im) / d;
        im = (im * o.re - re * o.im) / d;
        re = std::move(r);
        return *this;
    }
    Complex& operator*=(const Real& k) { re *= k; im *= k; return *this; }
    Complex& operator/=(const Real& k) { re /= k; im /= k; return *this; }
    Complex& operator*=(long k) { re *= k; im *= k; return *this; }
    Complex& operator/=(long k) { re /= k; im /= k; return *this; }

    Complex operator-() const { return {-re, -im}; }

    friend Complex operator+(Complex a, const Complex& b) { return a += b; }
    friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
    friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
    friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
    friend Complex operator*(Complex a, const Real& k) { return a *= k; }
    friend Complex operator*(const Real& k, Complex a) { return a *= k; }
    friend Complex operator/(Complex a, const Real& k) { return a /= k; }
    friend Complex operator*(Complex a, long k) { return a *= k; }
    friend Complex operator/(Complex a, long k) { return a /= k; }

    friend Complex conj(const Complex& z) { return {z.re, -z.im}; }
    friend Real abs(const Complex& z) { return hypot(z.re, z.im); }
    friend Complex exp(const Complex& z) {
        Real s, c;
        sin_cos(z.im, s, c);
        Real m = exp(z.re);
        return {m * c, m * s};
    }

    /// Multiply in place without temporaries: *this *= o.
    /// `scratch` must be two Reals at least at this precision.
    void mul_in_place(const Complex& o, Real& t1, Real& t2) {
        mpfr_mul(t1.raw(), re.raw(), o.re.raw(), MPFR_RNDN);
        mpfr_mul(t2.raw(), im.raw(), o.im.raw(), MPFR_RNDN);
        mpfr_sub(t1.raw(), t1.raw(), t2.raw(), MPFR_RNDN);
        mpfr_mul(t2.raw(), re.raw(), o.im.raw(), MPFR_RNDN);
        mpfr_mul(im.raw(), im.raw(), o.re.raw(), MPFR_RNDN);
        mpfr_add(im.raw(), im.raw(), t2.raw(), MPFR_RNDN);
        mpfr_swap(re.raw(), t1.raw());
    }

    std::string to_string(int digits = 20) const {
        std::string s = re.to_string(digits);
        std::string i = im.to_string(digits);
        if (!i.empty() && i[0] == '-') return s + " - " + i.substr(1) + "i";
        return s + " + " + i + "i";
    }
};

}  // namespace congruent
