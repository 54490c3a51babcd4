#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace tsgan {

/// Error raised for contract violations and data-integrity failures.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

inline void require(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
}

/// Deterministic 64-bit generator; every seeded component owns one.
using Rng = std::mt19937_64;

/// FNV-1a fingerprint of a byte string. Not cryptographic; used to record
/// which dataset a run was trained on.
inline std::uint64_t fnv1a64(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

/// Round half away from zero to the nearest integer.
inline long round_half_away(double x) {
    return x >= 0.0 ? static_cast<long>(x + 0.5) : -static_cast<long>(-x + 0.5);
}

}  // namespace tsgan
