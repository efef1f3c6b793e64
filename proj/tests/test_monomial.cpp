#include <doctest.h>

#include <numeric>
#include <set>

#include "polytorus/monomial.hpp"
#include "polytorus/rng.hpp"

using namespace polytorus;

namespace {

// test-local partition counter (dynamic programming over parts), the oracle
// for the weight-class counting identity
std::vector<std::uint64_t> partition_oracle(std::uint64_t max_m) {
    std::vector<std::uint64_t> p(max_m + 1, 0);
    p[0] = 1;
    for (std::uint64_t j = 1; j <= max_m; ++j)
        for (std::uint64_t m = j; m <= max_m; ++m) p[m] += p[m - j];
    return p;
}

} // namespace

TEST_CASE("factorize matches the defining examples") {
    MonomialIndex one = factorize(1);
    CHECK(one.alpha.empty());
    CHECK(one.weight == 0);

    MonomialIndex twelve = factorize(12);
    CHECK(twelve.alpha == std::vector<std::uint32_t>{2, 1});
    CHECK(twelve.weight == 4);

    MonomialIndex big = factorize(9000);
    CHECK(big.alpha == std::vector<std::uint32_t>{3, 2, 3});
    CHECK(big.weight == 16);

    CHECK_THROWS_AS(factorize(0), std::domain_error);
}

TEST_CASE("factorize handles a large prime cofactor") {
    MonomialIndex m = factorize(2 * 9973); // 9973 = p_1229
    CHECK(m.alpha.size() == 1229);
    CHECK(m.alpha[0] == 1);
    CHECK(m.alpha[1228] == 1);
    CHECK(m.weight == 1 + 1229);
}

TEST_CASE("index_of inverts factorize") {
    CHECK(index_of({}) == 1);
    CHECK(index_of({2, 1}) == 12);
    CHECK(index_of({0, 0, 1}) == 5);
    CHECK(index_of({1, 0, 0, 0}) == 2); // trailing zeros accepted

    CHECK_THROWS_AS(index_of({200}), std::overflow_error);

    for (std::uint64_t n = 1; n <= 100000; ++n) {
        if (index_of(factorize(n).alpha) != n) {
            CHECK(index_of(factorize(n).alpha) == n);
            break;
        }
    }
}

TEST_CASE("weight is additive over coprime products") {
    RngStream rng(2024);
    for (int i = 0; i < 2000; ++i) {
        std::uint64_t a = 2 + rng.next_u64() % 99998;
        std::uint64_t b = 2 + rng.next_u64() % 99998;
        if (std::gcd(a, b) != 1) continue;
        CHECK(weight_of(a * b) == weight_of(a) + weight_of(b));
    }
}

TEST_CASE("enumerate by max index") {
    auto idx = enumerate_indices(TruncationPolicy::max_index(6));
    REQUIRE(idx.size() == 6);
    for (std::size_t i = 0; i < idx.size(); ++i) CHECK(idx[i].n == i + 1);
}

TEST_CASE("enumerate by max weight matches brute force") {
    auto idx = enumerate_indices(TruncationPolicy::max_weight(2));
    std::vector<std::uint64_t> got;
    for (const auto& m : idx) got.push_back(m.n);
    CHECK(got == std::vector<std::uint64_t>{1, 2, 3, 4});

    // brute force oracle: filter n <= 64 by weight
    for (std::uint64_t w : {0ULL, 1ULL, 2ULL, 3ULL, 4ULL, 5ULL, 6ULL}) {
        std::set<std::uint64_t> brute;
        for (std::uint64_t n = 1; n <= (1ULL << w); ++n)
            if (weight_of(n) <= w) brute.insert(n);
        auto enumerated = enumerate_indices(TruncationPolicy::max_weight(w));
        std::set<std::uint64_t> got_w;
        for (const auto& m : enumerated) got_w.insert(m.n);
        CHECK(got_w == brute);
    }
}

TEST_CASE("max weight truncations are nested and sorted") {
    auto small = enumerate_indices(TruncationPolicy::max_weight(7));
    auto large = enumerate_indices(TruncationPolicy::max_weight(8));
    std::set<std::uint64_t> large_set;
    for (const auto& m : large) large_set.insert(m.n);
    for (const auto& m : small) CHECK(large_set.count(m.n) == 1);
    for (std::size_t i = 1; i < large.size(); ++i) CHECK(large[i - 1].n < large[i].n);
}

TEST_CASE("weight class sizes match the partition generating function") {
    const std::uint64_t W = 12;
    auto idx = enumerate_indices(TruncationPolicy::max_weight(W));
    std::vector<std::uint64_t> counts(W + 1, 0);
    for (const auto& m : idx) ++counts[m.weight];
    auto oracle = partition_oracle(W);
    for (std::uint64_t w = 0; w <= W; ++w) CHECK(counts[w] == oracle[w]);
    std::uint64_t total = std::accumulate(oracle.begin(), oracle.end(), std::uint64_t{0});
    CHECK(idx.size() == total);
}

TEST_CASE("enumerate rejects weight cutoffs that overflow") {
    CHECK_THROWS_AS(enumerate_indices(TruncationPolicy::max_weight(64)), std::overflow_error);
}

TEST_CASE("abschnitt membership") {
    CHECK(in_abschnitt(12, 2));
    CHECK_FALSE(in_abschnitt(10, 2));
    CHECK(in_abschnitt(1, 1));
    CHECK(in_abschnitt(10, 3));
    CHECK_THROWS_AS(in_abschnitt(0, 2), std::domain_error);
    CHECK_THROWS_AS(in_abschnitt(5, 0), std::domain_error);
}

TEST_CASE("truncation policy parsing round-trips") {
    auto t = TruncationPolicy::parse("max_index:100");
    CHECK(t.kind() == TruncationPolicy::Kind::max_index);
    CHECK(t.value() == 100);
    CHECK(t.to_string() == "max_index:100");
    auto w = TruncationPolicy::parse("max_weight:7");
    CHECK(w.admits(4));
    CHECK_FALSE(w.admits(1024)); // weight 10
    CHECK_THROWS_AS(TruncationPolicy::parse("bogus"), std::invalid_argument);
    CHECK_THROWS_AS(TruncationPolicy::parse("max_index:abc"), std::invalid_argument);
}
