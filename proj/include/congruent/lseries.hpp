#pragma once

// Dirichlet coefficients a_m of L(E(n), s) for y^2 = x^3 - n^2 x.
//
// a_p at good primes comes from counting points (character sum), or for large
// p = 1 (mod 4) from the two-squares decomposition of p, which is valid because
// E(n) has CM by Z[i]. Prime powers follow the Hecke recurrence and everything
// else is multiplicative.

#include "congruent/arith.hpp"
#include "congruent/curve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace congruent {

/// Primes above this use the two-squares formula for a_p.
inline constexpr std::int64_t kTwoSquaresThreshold = 10000;

/// #E(F_p) including infinity, as p + 1 + sum_x chi(x^3 - n^2 x). O(p).
inline std::int64_t count_points_mod_p(std::int64_t n, std::int64_t p) {
    if (p < 2 || !is_prime(static_cast<std::uint64_t>(p))) throw std::invalid_argument("count_points_mod_p: p must be prime");
    if ((2 * n) % p == 0) throw std::invalid_argument("count_points_mod_p: p divides 2n (bad reduction)");
    std::vector<std::int8_t> chi(static_cast<std::size_t>(p), -1);
    chi[0] = 0;
    for (std::int64_t x = 1; x <= p / 2; ++x) chi[static_cast<std::size_t>(x * x % p)] = 1;
    const std::int64_t nn = (n % p) * (n % p) % p;
    std::int64_t sum = 0;
    for (std::int64_t x = 0; x < p; ++x) {
        std::int64_t x2 = x * x % p;
        std::int64_t v = x * ((x2 - nn + p) % p) % p;
        sum += chi[static_cast<std::size_t>(v)];
    }
    return p + 1 + sum;
}

inline std::int64_t ap_by_counting(std::int64_t n, std::int64_t p) { return p + 1 - count_points_mod_p(n, p); }

/// CM formula for a good p = 1 (mod 4): p = a^2 + b^2 with a odd, b even, the
/// sign of a fixed by a + b = 1 (mod 4); then a_p = (n/p) 2a.
inline std::int64_t ap_by_two_squares(std::int64_t n, std::int64_t p) {
    if ((2 * n) % p == 0) throw std::invalid_argument("ap_by_two_squares: p divides 2n (bad reduction)");
    auto [a, b] = cornacchia_two_squares(p);
    if (mod_floor(a + b, 4) != 1) a = -a;
    return detail::jacobi(n, p) * 2 * a;
}

inline std::int64_t ap(std::int64_t n, std::int64_t p) {
    if ((2 * n) % p == 0) return 0;  // additive reduction
    if (p % 4 == 3) return 0;
    if (p > kTwoSquaresThreshold) return ap_by_two_squares(n, p);
    return ap_by_counting(n, p);
}

/// a_{p^r} from a_p: Hecke recurrence at good p, (a_p)^r at bad p.
inline std::int64_t a_prime_power(std::int64_t a_p, std::int64_t p, int r, bool bad) {
    if (r < 1) throw std::invalid_argument("a_prime_power: r must be positive");
    if (bad) {
        std::int64_t v = 1;
        for (int i = 0; i < r; ++i) v *= a_p;
        return v;
    }
    std::int64_t prev = 1, cur = a_p;
    for (int k = 1; k < r; ++k) {
        std::int64_t next = a_p * cur - p * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

class CoefficientTable {
public:
    CoefficientTable() = default;
    CoefficientTable(std::int64_t n, std::vector<std::int64_t> values) : n_(n), a_(std::move(values)) {
        if (a_.size() < 2) throw std::invalid_argument("CoefficientTable: need at least a_1");
    }

    std::int64_t n() const { return n_; }
    std::int64_t limit() const { return a_.empty() ? 0 : static_cast<std::int64_t>(a_.size()) - 1; }

    std::int64_t operator[](std::int64_t m) const { return a_[static_cast<std::size_t>(m)]; }
    std::int64_t at(std::int64_t m) const {
        if (m < 1 || m > limit()) throw std::out_of_range("coefficient index " + std::to_string(m) + " outside [1, " + std::to_string(limit()) + "]");
        return a_[static_cast<std::size_t>(m)];
    }

    friend bool operator==(const CoefficientTable&, const CoefficientTable&) = default;

private:
    std::int64_t n_ = 0;
    std::vector<std::int64_t> a_;
};

/// Primes up to `limit` (Eratosthenes).
inline std::vector<std::int64_t> primes_up_to(std::int64_t limit) {
    std::vector<std::int64_t> primes;
    if (limit < 2) return primes;
    std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
    for (std::int64_t i = 2; i <= limit; ++i) {
        if (composite[static_cast<std::size_t>(i)]) continue;
        primes.push_back(i);
        for (std::int64_t j = i * i; j <= limit; j += i) composite[static_cast<std::size_t>(j)] = true;
    }
    return primes;
}

/// a_m for 1 <= m <= limit. a_p for p <= seed->limit() are taken from `seed`
/// (used to extend a cached table). Prime work is split across `threads`
/// workers; the result does not depend on the split.
inline CoefficientTable coefficients(std::int64_t n, std::int64_t limit, const CoefficientTable* seed = nullptr,
                                     unsigned threads = 0) {
    if (limit < 1) throw std::invalid_argument("coefficients: limit must be at least 1");
    if (!is_square_free(n)) throw std::invalid_argument("coefficients: n must be square-free");
    if (seed != nullptr && seed->n() != n) throw std::invalid_argument("coefficients: seed table is for a different n");

    const auto primes = primes_up_to(limit);
    std::vector<std::int64_t> ap_values(primes.size(), 0);

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, primes.size() / 64)));
    auto work = [&](std::size_t worker) {
        // Strided so that each worker sees a mix of small and large primes.
        for (std::size_t i = worker; i < primes.size(); i += threads) {
            const std::int64_t p = primes[i];
            ap_values[i] = (seed != nullptr && p <= seed->limit()) ? (*seed)[p] : ap(n, p);
        }
    };
    if (threads <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
        for (auto& t : pool) t.join();
    }

    // Smallest prime factor sieve, then multiplicative assembly in increasing m.
    std::vector<std::int32_t> spf(static_cast<std::size_t>(limit) + 1, 0);
    std::vector<std::int64_t> prime_index_ap(static_cast<std::size_t>(limit) + 1, 0);
    for (std::size_t i = 0; i < primes.size(); ++i) {
        const std::int64_t p = primes[i];
        prime_index_ap[static_cast<std::size_t>(p)] = ap_values[i];
        for (std::int64_t j = p; j <= limit; j += p) {
            if (spf[static_cast<std::size_t>(j)] == 0) spf[static_cast<std::size_t>(j)] = static_cast<std::int32_t>(p);
        }
    }

    std::vector<std::int64_t> a(static_cast<std::size_t>(limit) + 1, 0);
    a[1] = 1;
    for (std::int64_t m = 2; m <= limit; ++m) {
        const std::int64_t p = spf[static_cast<std::size_t>(m)];
        std::int64_t rest = m, pk = 1;
        while (rest % p == 0) {
            rest /= p;
            pk *= p;
        }
        if (rest != 1) {
            a[static_cast<std::size_t>(m)] = a[static_cast<std::size_t>(pk)] * a[static_cast<std::size_t>(rest)];
            continue;
        }
        const std::int64_t a_p = prime_index_ap[static_cast<std::size_t>(p)];
        if (pk == p) {
            a[static_cast<std::size_t>(m)] = a_p;
        } else if ((2 * n) % p == 0) {
            a[static_cast<std::size_t>(m)] = a_p * a[static_cast<std::size_t>(m / p)];
        } else {
            a[static_cast<std::size_t>(m)] = a_p * a[static_cast<std::size_t>(m / p)] - p * a[static_cast<std::size_t>(m / p / p)];
        }
    }
    return CoefficientTable(n, std::move(a));
}

// ---------------------------------------------------------------------------
// Cache file format:
//   CNVC 1 n=<n> M=<M>
//   <m> <a_m>        (one line per nonzero coefficient, ascending m)

inline void write_coefficient_cache(std::ostream& os, const CoefficientTable& table) {
    os << "CNVC 1 n=" << table.n() << " M=" << table.limit() << "\n";
    for (std::int64_t m = 1; m <= table.limit(); ++m) {
        if (table[m] != 0) os << m << " " << table[m] << "\n";
    }
}

inline CoefficientTable read_coefficient_cache(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error("coefficient cache: empty file");
    std::istringstream hs(header);
    std::string magic, version, n_field, m_field, extra;
    hs >> magic >> version >> n_field >> m_field;
    if (magic != "CNVC" || version != "1" || n_field.rfind("n=", 0) != 0 || m_field.rfind("M=", 0) != 0 || (hs >> extra)) {
        throw std::runtime_error("coefficient cache: bad header '" + header + "'");
    }
    std::int64_t n = 0, limit = 0;
    try {
        n = std::stoll(n_field.substr(2));
        limit = std::stoll(m_field.substr(2));
    } catch (const std::exception&) {
        throw std::runtime_error("coefficient cache: bad header '" + header + "'");
    }
    if (n < 1 || limit < 1) throw std::runtime_error("coefficient cache: bad header '" + header + "'");

    std::vector<std::int64_t> a(static_cast<std::size_t>(limit) + 1, 0);
    std::string line;
    std::int64_t last = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::int64_t m = 0, value = 0;
        if (!(ls >> m >> value) || (ls >> extra) || m <= last || m > limit || value == 0) {
            throw std::runtime_error("coefficient cache: bad entry '" + line + "'");
        }
        a[static_cast<std::size_t>(m)] = value;
        last = m;
    }
    if (a[1] != 1) throw std::runtime_error("coefficient cache: a_1 must be 1");
    return CoefficientTable(n, std::move(a));
}

}  // namespace congruent
