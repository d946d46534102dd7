#pragma once

// The congruent number curve E(n): y^2 = x^3 - n^2 x over Q.

#include "congruent/arith.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace congruent {

/// 2^5 n^2. Throws for n that is not a square-free positive integer.
inline std::int64_t conductor(std::int64_t n) {
    if (!is_square_free(n)) throw std::invalid_argument("n must be a square-free positive integer, got " + std::to_string(n));
    return 32 * n * n;
}

struct CongruentCurve {
    std::int64_t n = 1;
    std::int64_t conductor = 32;
    /// Discriminant of the cubic x^3 - n^2 x, i.e. 4 n^6. Only its prime
    /// support {2} u {p | n} is meaningful to callers.
    BigInt discriminant = 4;

    static CongruentCurve make(std::int64_t n) {
        CongruentCurve c;
        c.n = n;
        c.conductor = congruent::conductor(n);
        BigInt nn = n;
        c.discriminant = 4 * nn * nn * nn * nn * nn * nn;
        return c;
    }

    /// Right-hand side x^3 - n^2 x.
    Rational rhs(const Rational& x) const { return x * x * x - Rational(n * n) * x; }
};

enum class Reduction { Good, Additive };

/// Reduction type of E(n) at p. The only singular point mod p | 2n is the cusp (0, 0).
inline Reduction reduction_type(std::int64_t n, std::int64_t p) {
    return (2 * n) % p == 0 ? Reduction::Additive : Reduction::Good;
}

inline const char* to_string(Reduction r) { return r == Reduction::Good ? "good" : "additive"; }

struct RationalPoint {
    bool infinity = true;
    Rational x;
    Rational y;

    static RationalPoint at_infinity() { return {}; }
    static RationalPoint affine(Rational x, Rational y) { return {false, std::move(x), std::move(y)}; }

    bool is_infinity() const { return infinity; }

    RationalPoint operator-() const { return infinity ? *this : affine(x, -y); }

    friend bool operator==(const RationalPoint& a, const RationalPoint& b) {
        if (a.infinity || b.infinity) return a.infinity == b.infinity;
        return a.x == b.x && a.y == b.y;
    }

    friend std::ostream& operator<<(std::ostream& os, const RationalPoint& p) {
        if (p.infinity) return os << "O";
        return os << "(" << p.x.to_string() << ", " << p.y.to_string() << ")";
    }
};

inline bool on_curve(const RationalPoint& p, const CongruentCurve& curve) {
    return p.infinity || p.y * p.y == curve.rhs(p.x);
}

namespace detail {

inline void require_on_curve(const RationalPoint& p, const CongruentCurve& curve) {
    if (!on_curve(p, curve)) {
        std::ostringstream os;
        os << "point " << p << " is not on y^2 = x^3 - " << curve.n * curve.n << "x";
        throw std::invalid_argument(os.str());
    }
}

/// Third intersection with slope `m` through p and q, negated.
inline RationalPoint chord_result(const RationalPoint& p, const RationalPoint& q, const Rational& m) {
    // x^3 + 0 x^2 - n^2 x: the three roots sum to m^2.
    Rational x3 = m * m - p.x - q.x;
    Rational y3 = m * (p.x - x3) - p.y;
    return RationalPoint::affine(std::move(x3), std::move(y3));
}

}  // namespace detail

inline RationalPoint point_double(const RationalPoint& p, const CongruentCurve& curve) {
    detail::require_on_curve(p, curve);
    if (p.infinity || p.y.is_zero()) return RationalPoint::at_infinity();
    Rational slope = (Rational(3) * p.x * p.x - Rational(curve.n * curve.n)) / (Rational(2) * p.y);
    return detail::chord_result(p, p, slope);
}

inline RationalPoint point_add(const RationalPoint& p, const RationalPoint& q, const CongruentCurve& curve) {
    detail::require_on_curve(p, curve);
    detail::require_on_curve(q, curve);
    if (p.infinity) return q;
    if (q.infinity) return p;
    if (p.x == q.x) {
        if (p.y == q.y) return point_double(p, curve);
        return RationalPoint::at_infinity();
    }
    return detail::chord_result(p, q, (q.y - p.y) / (q.x - p.x));
}

inline RationalPoint point_multiple(RationalPoint p, std::int64_t k, const CongruentCurve& curve) {
    if (k < 0) return point_multiple(-p, -k, curve);
    RationalPoint acc = RationalPoint::at_infinity();
    while (k > 0) {
        if (k & 1) acc = point_add(acc, p, curve);
        k >>= 1;
        if (k > 0) p = point_double(p, curve);
    }
    return acc;
}

/// E(n)(Q)_tors = Z/2 x Z/2: {O, (0,0), (n,0), (-n,0)}.
inline std::array<RationalPoint, 4> torsion_points(const CongruentCurve& curve) {
    return {RationalPoint::at_infinity(), RationalPoint::affine(0, 0), RationalPoint::affine(curve.n, 0),
            RationalPoint::affine(-curve.n, 0)};
}

inline bool is_torsion(const RationalPoint& p) { return p.infinity || p.y.is_zero(); }

struct Triangle {
    Rational a;
    Rational b;
    Rational c;

    bool is_right() const { return a * a + b * b == c * c; }
    Rational area() const { return a * b / Rational(2); }
    bool is_valid_for(std::int64_t n) const {
        return a.sign() > 0 && b.sign() > 0 && c.sign() > 0 && is_right() && area() == Rational(n);
    }
};

namespace detail {

inline std::optional<Triangle> triangle_if_squares(const Rational& x, std::int64_t n) {
    auto plus = is_rational_square(x + Rational(n));
    auto minus = is_rational_square(x - Rational(n));
    auto root = is_rational_square(x);
    if (!plus || !minus || !root) return std::nullopt;
    Triangle t{*plus + *minus, *plus - *minus, Rational(2) * *root};
    if (t.b.sign() < 0) std::swap(t.a, t.b);
    return t;
}

}  // namespace detail

/// Right triangle of area n from a non-torsion point. Uses P itself when x, x+n
/// and x-n are all squares, otherwise 2P (which always satisfies that). With
/// `double_first` the point is doubled unconditionally.
inline Triangle triangle_from_point(const RationalPoint& p, const CongruentCurve& curve, bool double_first = false) {
    detail::require_on_curve(p, curve);
    if (is_torsion(p)) throw std::invalid_argument("triangle_from_point: torsion point has no triangle");
    if (!double_first) {
        if (auto t = detail::triangle_if_squares(p.x, curve.n)) return *t;
    }
    RationalPoint twice = point_double(p, curve);
    auto t = detail::triangle_if_squares(twice.x, curve.n);
    if (!t) throw std::logic_error("triangle_from_point: 2P failed the three-squares condition");
    return *t;
}

}  // namespace congruent
