#pragma once

// Front-end plumbing shared by the `congruent` tool and its tests: the
// coefficient cache on disk, JSON certificates, and the subcommands themselves
// (each writes machine output to `out`, diagnostics to `err`, and returns the
// process exit status).

#include "congruent/heegner.hpp"
#include "congruent/lseries.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace congruent::cli {

enum ExitStatus : int {
    kCongruent = 0,
    kUsageError = 1,
    kInapplicable = 2,
    kInconclusive = 3,
};

inline int exit_status(Verdict v) {
    switch (v) {
        case Verdict::Congruent: return kCongruent;
        case Verdict::Inapplicable: return kInapplicable;
        case Verdict::Inconclusive: return kInconclusive;
    }
    return kUsageError;
}

struct Config {
    VerifyConfig verify;
    std::optional<std::filesystem::path> cache_path;
    bool json = false;
};

// ---------------------------------------------------------------------------
// Coefficient cache

inline std::optional<CoefficientTable> load_cache(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) return std::nullopt;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read coefficient cache " + path.string());
    return read_coefficient_cache(in);
}

inline void store_cache(const std::filesystem::path& path, const CoefficientTable& table) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write coefficient cache " + path.string());
        write_coefficient_cache(out, table);
        if (!out) throw std::runtime_error("failed writing coefficient cache " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

/// Returns a table for n covering at least `limit`, extending the cache file at
/// `path` when it is too short. The file is not touched when it already suffices.
inline CoefficientTable cached_coefficients(const std::filesystem::path& path, std::int64_t n, std::int64_t limit) {
    auto existing = load_cache(path);
    if (existing) {
        if (existing->n() != n) {
            throw std::runtime_error("coefficient cache " + path.string() + " is for n = " + std::to_string(existing->n()) +
                                     ", not " + std::to_string(n));
        }
        if (existing->limit() >= limit) return *existing;
    }
    CoefficientTable table = coefficients(n, limit, existing ? &*existing : nullptr);
    store_cache(path, table);
    return table;
}

inline CoefficientSource cache_source(const std::filesystem::path& path) {
    return [path](std::int64_t n, std::int64_t limit) { return cached_coefficients(path, n, limit); };
}

// ---------------------------------------------------------------------------
// JSON certificates

namespace detail {

inline nlohmann::json complex_json(const Complex& z, int digits) {
    return {{"re", z.re.to_string(digits)}, {"im", z.im.to_string(digits)}};
}

inline nlohmann::json point_json(const RationalPoint& p) {
    if (p.is_infinity()) return "infinity";
    return {{"x", p.x.to_string()}, {"y", p.y.to_string()}};
}

}  // namespace detail

/// Every rational is rendered as a "p/q" string (or "p" for integers).
inline nlohmann::json certificate_json(const Certificate& c) {
    using nlohmann::json;
    const int digits = static_cast<int>(std::max(20u, c.digits_used));
    json j;
    j["n"] = c.n;
    j["verdict"] = to_string(c.verdict);
    j["epsilon"] = c.epsilon;
    j["conductor"] = c.conductor;
    j["discriminant"] = c.d;
    j["r"] = c.r;
    j["class_number"] = c.class_number;
    j["forms"] = json::array();
    for (const auto& f : c.forms) {
        j["forms"].push_back({{"A", f.a}, {"B", f.b}, {"C", f.c}, {"tau", detail::complex_json(f.tau(digits_to_bits(30)), 25)}});
    }
    j["U"] = c.u ? detail::complex_json(*c.u, digits) : json(nullptr);
    j["U_mod_lattice"] = c.u_reduced ? detail::complex_json(*c.u_reduced, digits) : json(nullptr);
    j["point"] = c.point ? detail::point_json(*c.point) : json(nullptr);
    j["doubled_point"] = c.doubled_point ? detail::point_json(*c.doubled_point) : json(nullptr);
    if (c.triangle) {
        j["triangle"] = {{"a", c.triangle->a.to_string()}, {"b", c.triangle->b.to_string()}, {"c", c.triangle->c.to_string()}};
    } else {
        j["triangle"] = nullptr;
    }
    json attempts = json::array();
    for (const auto& a : c.attempts) {
        attempts.push_back({{"discriminant", a.d}, {"class_number", a.class_number}, {"r", a.r}, {"U_mod_lattice", a.u}, {"torsion", a.torsion}});
    }
    j["diagnostics"] = {
        {"digits", c.digits_used},
        {"terms", c.terms},
        {"imag_residual", c.imag_residual},
        {"torsion_distance", c.torsion_distance},
        {"reconstruction_residual", c.reconstruction_residual},
        {"attempts", attempts},
        {"reason", c.reason},
    };
    return j;
}

/// Re-checks a JSON certificate using only its strings: the point lies on
/// y^2 = x^3 - n^2 x, is not 2-torsion, and the triangle is right with area n.
inline bool check_certificate_json(const nlohmann::json& j) {
    if (j.at("verdict") != "Congruent") return false;
    const auto n = j.at("n").get<std::int64_t>();
    const auto curve = CongruentCurve::make(n);
    const auto& pt = j.at("point");
    RationalPoint p = RationalPoint::affine(Rational::parse(pt.at("x")), Rational::parse(pt.at("y")));
    const auto& t = j.at("triangle");
    Triangle tri{Rational::parse(t.at("a")), Rational::parse(t.at("b")), Rational::parse(t.at("c"))};
    return on_curve(p, curve) && !is_torsion(p) && tri.is_valid_for(n);
}

// ---------------------------------------------------------------------------
// Subcommands

inline void print_text(std::ostream& out, const Certificate& c) {
    out << "n = " << c.n << ": " << to_string(c.verdict) << "\n";
    if (c.verdict == Verdict::Inapplicable || c.forms.empty()) {
        if (!c.reason.empty()) out << "reason: " << c.reason << "\n";
        return;
    }
    out << "conductor: " << c.conductor << "\n";
    out << "discriminant: " << c.d << " (h = " << c.class_number << ", r = " << c.r << ")\n";
    for (const auto& f : c.forms) out << "form: (" << f.a << ", " << f.b << ", " << f.c << ")\n";
    if (c.u_reduced) out << "U mod lattice: " << c.u_reduced->to_string(30) << "\n";
    if (c.point) out << "point: " << *c.point << "\n";
    if (c.doubled_point) out << "doubled point: " << *c.doubled_point << "\n";
    if (c.triangle) out << "triangle: " << c.triangle->a.to_string() << " " << c.triangle->b.to_string() << " " << c.triangle->c.to_string() << "\n";
    if (!c.reason.empty()) out << "reason: " << c.reason << "\n";
}

inline Certificate run_verify(std::int64_t n, const Config& cfg) {
    if (cfg.cache_path) return verify(n, cfg.verify, cache_source(*cfg.cache_path));
    return verify(n, cfg.verify);
}

namespace detail {

template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kUsageError;
    }
}

}  // namespace detail

inline int cmd_verify(std::int64_t n, const Config& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        Certificate c = run_verify(n, cfg);
        if (cfg.json) {
            out << certificate_json(c).dump(2) << "\n";
        } else {
            print_text(out, c);
        }
        if (c.verdict != Verdict::Congruent && !c.reason.empty()) err << "n = " << n << ": " << c.reason << "\n";
        return exit_status(c.verdict);
    });
}

inline int cmd_triangle(std::int64_t n, const Config& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        Certificate c = run_verify(n, cfg);
        if (c.verdict == Verdict::Congruent) {
            out << c.triangle->a.to_string() << " " << c.triangle->b.to_string() << " " << c.triangle->c.to_string() << "\n";
        } else if (c.verdict == Verdict::Inapplicable) {
            err << "n = " << n << ": Inapplicable (" << c.reason << ")\n";
        } else {
            err << "n = " << n << ": Inconclusive (" << c.reason << ")\n";
        }
        return exit_status(c.verdict);
    });
}

inline int cmd_coeffs(std::int64_t n, std::int64_t limit, const std::filesystem::path& path, std::ostream& err) {
    return detail::guarded(err, [&] {
        if (limit < 1) throw std::invalid_argument("limit must be at least 1");
        if (!is_square_free(n)) throw std::invalid_argument("n must be a square-free positive integer, got " + std::to_string(n));
        CoefficientTable t = cached_coefficients(path, n, limit);
        err << "cache " << path.string() << ": n=" << t.n() << " M=" << t.limit() << "\n";
        return 0;
    });
}

}  // namespace congruent::cli
