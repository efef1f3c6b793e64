#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace polytorus {

/// j-th prime, 1-based (nth_prime(1) == 2). Backed by a process-wide sieve
/// that grows on demand; reads are concurrent, extension is serialized.
std::uint64_t nth_prime(std::size_t j);

/// Number of primes currently materialized (testing / diagnostics).
std::size_t prime_cache_size();

/// A positive integer together with its prime-exponent vector and the graded
/// weight sum(j * alpha_j). alpha is canonical: no trailing zeros, so n == 1
/// has an empty alpha and weight 0.
struct MonomialIndex {
    std::uint64_t n = 1;
    std::vector<std::uint32_t> alpha;
    std::uint64_t weight = 0;

    bool operator==(const MonomialIndex& other) const { return n == other.n; }
};

/// Unique factorization of n over the primes, positions aligned with
/// nth_prime. Throws std::domain_error for n == 0.
MonomialIndex factorize(std::uint64_t n);

/// Product prod_j nth_prime(j)^alpha[j-1]. Trailing zeros are accepted.
/// Throws std::overflow_error if the product leaves the 64-bit range.
std::uint64_t index_of(const std::vector<std::uint32_t>& alpha);

/// weight of factorize(n); convenience.
std::uint64_t weight_of(std::uint64_t n);

/// True iff every prime factor of n is among the first k primes (n lies in
/// the subsemigroup generated by them); n == 1 qualifies for every k >= 1.
bool in_abschnitt(std::uint64_t n, std::size_t k);

/// Truncation rule for materializing finite pieces of a monomial expansion:
/// either all n <= N or all n with weight <= W.
class TruncationPolicy {
public:
    enum class Kind { max_index, max_weight };

    static TruncationPolicy max_index(std::uint64_t n);
    static TruncationPolicy max_weight(std::uint64_t w);

    Kind kind() const { return kind_; }
    std::uint64_t value() const { return value_; }

    bool admits(std::uint64_t n) const;
    bool admits(const MonomialIndex& m) const;

    std::string to_string() const;
    static TruncationPolicy parse(const std::string& text); // "max_index:N" / "max_weight:W"

    bool operator==(const TruncationPolicy& other) const {
        return kind_ == other.kind_ && value_ == other.value_;
    }

private:
    TruncationPolicy(Kind k, std::uint64_t v) : kind_(k), value_(v) {}
    Kind kind_;
    std::uint64_t value_;
};

/// All monomial indices admitted by the cutoff, in increasing n. The
/// max_weight form is finite because each weight class is a finite set of
/// partitions; W >= 64 would overflow 64-bit n (2^W) and is rejected.
std::vector<MonomialIndex> enumerate_indices(const TruncationPolicy& cutoff);

namespace detail {
/// Visit every exponent pattern with weight <= W, without materializing n.
/// fn receives the weight of each visited pattern (the empty pattern, weight
/// 0, is visited first). Visiting order is deterministic.
template <typename Fn>
void visit_weights(std::uint64_t max_weight, Fn&& fn) {
    // Each pattern corresponds to a partition of its weight into parts j,
    // part j appearing alpha_j times.
    struct Frame {
        std::uint64_t min_part, budget, weight;
    };
    std::vector<Frame> stack;
    stack.push_back({1, max_weight, 0});
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        fn(f.weight);
        for (std::uint64_t j = f.min_part; j <= f.budget; ++j)
            stack.push_back({j, f.budget - j, f.weight + j});
    }
}
} // namespace detail

} // namespace polytorus
