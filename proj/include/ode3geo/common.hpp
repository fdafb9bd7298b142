/*
 * common.hpp
 * ----------
 * Shared basic types for the ode3geo library: error hierarchy, the
 * three-valued zero-test verdict, probe configuration, evaluation points,
 * a deterministic splittable RNG, and small exact-rational helpers on top
 * of GMP's mpq_class.
 *
 * Everything in the library is deterministic: randomized procedures take a
 * seed explicitly and derive all samples from it with the counter-based
 * generator below, never from library-global state.
 */
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ode3geo {

// ---------------------------------------------------------------------------
// Error hierarchy
// ---------------------------------------------------------------------------

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Syntax error in the expression grammar; `offset` is a byte offset into
/// the input string pointing at the first offending character.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (byte " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Identifier not among the declared variables/parameters.
class UnknownIdentifierError : public ParseError {
public:
    UnknownIdentifierError(const std::string& name, std::size_t offset,
                           const std::vector<std::string>& declared)
        : ParseError(format(name, declared), offset), name_(name) {}
    const std::string& name() const { return name_; }

private:
    static std::string format(const std::string& name, const std::vector<std::string>& declared) {
        std::string msg = "unknown identifier '" + name + "'; declared names:";
        for (const auto& d : declared) msg += " " + d;
        return msg;
    }
    std::string name_;
};

/// Numeric evaluation outside the real domain (even root of a negative
/// number, logarithm of a non-positive number, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Exact division by an expression whose normal form is literally zero.
class DivisionByZeroError : public Error {
public:
    using Error::Error;
};

/// Two geometric objects built over different coordinate lists were combined.
class CoordinateMismatchError : public Error {
public:
    using Error::Error;
};

/// A W≠0-only construction was invoked on an equation with W ≡ 0.
class WunschmannZeroError : public Error {
public:
    using Error::Error;
};

/// Variable map fails its nondegeneracy requirement (vanishing total
/// derivative of the new independent variable, or broken contact relations).
class DegenerateMapError : public Error {
public:
    using Error::Error;
};

/// transform_ode needs a closed-form inverse and none was supplied.
class MissingInverseError : public Error {
public:
    using Error::Error;
};

/// The supplied inverse does not invert the map (identity check failed).
class InverseMismatchError : public Error {
public:
    using Error::Error;
};

/// cubic_coefficients demanded on an equation that is not cubic in q.
class NotCubicError : public Error {
public:
    using Error::Error;
};

/// A construction requiring a constant invariant met a non-constant one.
class NotConstantError : public Error {
public:
    using Error::Error;
};

/// A coframe whose coefficient matrix could not be certified invertible.
class SingularCoframeError : public Error {
public:
    using Error::Error;
};

/// The candidate general solution does not solve the equation.
class NotASolutionError : public Error {
public:
    using Error::Error;
};

/// The solution-space section map is not an immersion at probe points.
class DegenerateSectionError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Zero-test verdicts and probe configuration
// ---------------------------------------------------------------------------

/// Outcome of the probabilistic zero test. ProvedZero is exact (the normal
/// form is the literal 0); ProvedNonzero is exact up to floating-point
/// thresholds and carries a witness point; Unknown is the honest remainder.
enum class ZeroVerdict { ProvedZero, ProvedNonzero, Unknown };

inline const char* to_string(ZeroVerdict v) {
    switch (v) {
        case ZeroVerdict::ProvedZero: return "proved_zero";
        case ZeroVerdict::ProvedNonzero: return "proved_nonzero";
        default: return "unknown";
    }
}

/// An assignment of numeric values to symbols.
struct Point {
    std::map<std::string, double> values;

    bool has(const std::string& name) const { return values.count(name) != 0; }
    double at(const std::string& name) const {
        auto it = values.find(name);
        if (it == values.end()) throw DomainError("unbound symbol '" + name + "' in numeric evaluation");
        return it->second;
    }
};

/// Configuration of the probabilistic zero test.
struct ProbeConfig {
    std::uint64_t seed = 1;
    int probes = 24;
    double abs_threshold = 1e-9;
    double rel_threshold = 1e-9;
    int max_domain_retries = 200;          ///< resample budget per probe slot
    std::map<std::string, double> pinned;  ///< user-pinned parameter values
};

/// Full result of a zero test, including the nonzero witness when found.
struct ZeroTestResult {
    ZeroVerdict verdict = ZeroVerdict::Unknown;
    std::optional<Point> witness;   ///< set iff ProvedNonzero via probing
    double witness_value = 0.0;     ///< |value| at the witness
    double max_abs_seen = 0.0;      ///< largest |value| over valid probes
    int probes_evaluated = 0;       ///< valid (in-domain) probes consumed
    int domain_rejections = 0;      ///< discarded out-of-domain samples
};

// ---------------------------------------------------------------------------
// Deterministic RNG (splitmix64), passed by value
// ---------------------------------------------------------------------------

/// Tiny counter-based generator. Identical seeds give identical streams on
/// every platform; no global state is involved.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1) with 53 bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform magnitude in [lo,hi].
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    bool next_bool() { return (next_u64() & 1) != 0; }

    /// Uniform integer in [lo,hi] inclusive.
    long next_int(long lo, long hi) {
        return lo + static_cast<long>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    /// Derive an independent child stream (for per-task determinism).
    Rng split(std::uint64_t salt) { return Rng(next_u64() ^ (salt * 0x9e3779b97f4a7c15ULL)); }

private:
    std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Exact rational helpers
// ---------------------------------------------------------------------------

using Rational = mpq_class;

inline Rational rational_of(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

/// r^k for integer k (k may be negative; r must be nonzero then).
inline Rational rat_pow(const Rational& r, long k) {
    if (k == 0) return Rational(1);
    mpz_class num = r.get_num(), den = r.get_den();
    bool invert = k < 0;
    unsigned long e = static_cast<unsigned long>(invert ? -k : k);
    mpz_class pn, pd;
    mpz_pow_ui(pn.get_mpz_t(), num.get_mpz_t(), e);
    mpz_pow_ui(pd.get_mpz_t(), den.get_mpz_t(), e);
    if (invert) {
        if (pn == 0) throw DivisionByZeroError("0 raised to a negative power");
        std::swap(pn, pd);
    }
    Rational out;
    out.get_num() = pn;
    out.get_den() = pd;
    out.canonicalize();
    return out;
}

/// Exact b-th root of a rational if it exists (real-signed for odd b).
/// Returns nullopt when the root is irrational or complex.
inline std::optional<Rational> rat_perfect_root(const Rational& r, long b) {
    if (b <= 0) return std::nullopt;
    if (r == 0) return Rational(0);
    bool negative = r < 0;
    if (negative && b % 2 == 0) return std::nullopt;  // complex
    mpz_class num = abs(r.get_num()), den = r.get_den();
    mpz_class rn, rd;
    int exact_n = mpz_root(rn.get_mpz_t(), num.get_mpz_t(), static_cast<unsigned long>(b));
    int exact_d = mpz_root(rd.get_mpz_t(), den.get_mpz_t(), static_cast<unsigned long>(b));
    if (!exact_n || !exact_d) return std::nullopt;
    Rational out;
    out.get_num() = negative ? mpz_class(-rn) : rn;
    out.get_den() = rd;
    out.canonicalize();
    return out;
}

/// Render without spaces, e.g. "3", "-3/16".
inline std::string rat_to_string(const Rational& r) { return r.get_str(); }

inline double rat_to_double(const Rational& r) { return r.get_d(); }

// ---------------------------------------------------------------------------
// Deterministic FNV-1a hashing (std::hash is implementation-defined)
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const unsigned char* b = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= b[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return fnv1a(&b, sizeof(b), a);
}

inline std::uint64_t hash_string(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    return fnv1a(s.data(), s.size(), h);
}

}  // namespace ode3geo
