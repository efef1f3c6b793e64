#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>

namespace polytorus {

/// SplitMix64 output function (Steele/Lea/Flood finalizer).
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

/// Counter-based splittable random stream.
///
/// A stream is identified by a 64-bit key. Draws walk a counter through the
/// SplitMix64 sequence; substreams are derived purely from (key, index), so
/// the n-th substream is the same no matter when or where it is requested.
/// All stochastic code in the library addresses randomness through named
/// streams ("torus", "bernoulli", "steinhaus", "gaussian") derived from a
/// master seed, which makes results independent of execution order and of
/// how sampling work is partitioned.
class RngStream {
public:
    RngStream() : RngStream(0) {}
    explicit RngStream(std::uint64_t key) : key_(key), state_(key) {}

    static RngStream from_seed(std::uint64_t master, std::string_view label) {
        std::uint64_t h = 1469598103934665603ULL; // FNV-1a
        for (char c : label) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ULL;
        }
        return RngStream(mix64(master ^ mix64(h)));
    }

    /// Positional derivation: depends only on the stream key and the index,
    /// never on how many values were already drawn.
    RngStream substream(std::uint64_t index) const {
        return RngStream(mix64(key_ ^ mix64(0x9E3779B97F4A7C15ULL * (index + 1))));
    }

    std::uint64_t key() const { return key_; }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    /// Uniform in [0, 1), 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1]; safe as a log argument.
    double next_unit_positive() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform on the unit circle.
    std::complex<double> next_circle() {
        double theta = 2.0 * pi() * next_unit();
        return {std::cos(theta), std::sin(theta)};
    }

    /// Standard normal via Box-Muller; the paired value is cached.
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = next_unit_positive();
        double v = next_unit();
        double rad = std::sqrt(-2.0 * std::log(u));
        double ang = 2.0 * pi() * v;
        spare_ = rad * std::sin(ang);
        has_spare_ = true;
        return rad * std::cos(ang);
    }

    static constexpr double pi() { return 3.14159265358979323846; }

private:
    std::uint64_t key_;
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Provenance attached to every stochastic result: the user-supplied master
/// seed and the named stream the values came from.
struct SeedRecord {
    std::uint64_t master = 0;
    std::string stream;
};

} // namespace polytorus
