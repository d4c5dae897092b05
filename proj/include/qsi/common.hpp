#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <sstream>
#include <vector>

namespace qsi {

/// Exact rational scalar. Every computation in the library is exact; there is
/// no floating point anywhere.
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// All recoverable failures surface as Error. `kind` is a short stable tag
/// suitable for tests and for the CLI's exit-code mapping; what() carries the
/// human-readable message.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

[[noreturn]] inline void fail(const std::string& kind, const std::string& msg) {
    throw Error(kind, msg);
}

inline std::string rat_str(const Rat& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

/// Parses "n" or "n/d" with optional leading '-'; d must be positive.
inline Rat parse_rat(const std::string& s) {
    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
        neg = (s[i] == '-');
        ++i;
    }
    std::size_t num_begin = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == num_begin) fail("parse error", "invalid rational: '" + s + "'");
    BigInt num(s.substr(num_begin, i - num_begin));
    BigInt den = 1;
    if (i < s.size()) {
        if (s[i] != '/') fail("parse error", "invalid rational: '" + s + "'");
        ++i;
        std::size_t den_begin = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (i == den_begin || i != s.size())
            fail("parse error", "invalid rational: '" + s + "'");
        den = BigInt(s.substr(den_begin));
        if (den == 0) fail("parse error", "zero denominator: '" + s + "'");
    }
    Rat r(num, den);
    return neg ? Rat(-r) : r;
}

inline BigInt factorial(long long n) {
    BigInt f = 1;
    for (long long k = 2; k <= n; ++k) f *= k;
    return f;
}

/// Deterministic sampler for randomized identity checks. Seeded explicitly so
/// that identical job specifications reproduce identical runs.
class RatSampler {
public:
    explicit RatSampler(std::uint64_t seed) : rng_(seed) {}

    int uniform(int lo, int hi) {
        std::uniform_int_distribution<int> d(lo, hi);
        return d(rng_);
    }

    /// Small rational with numerator in [-bound, bound] and denominator in [1, den_bound].
    Rat small(int bound = 9, int den_bound = 4) {
        return Rat(uniform(-bound, bound), uniform(1, den_bound));
    }

    Rat nonzero(int bound = 9, int den_bound = 4) {
        for (;;) {
            Rat r = small(bound, den_bound);
            if (r != 0) return r;
        }
    }

    std::uint64_t raw() { return rng_(); }

private:
    std::mt19937_64 rng_;
};

}  // namespace qsi
