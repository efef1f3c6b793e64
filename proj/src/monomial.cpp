#include "polytorus/monomial.hpp"

#include <algorithm>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace polytorus {

namespace {

constexpr std::uint64_t kSieveCap = 1ULL << 26; // largest prime value we will sieve

using PrimeVec = std::vector<std::uint64_t>;
using PrimeSnapshot = std::shared_ptr<const PrimeVec>;

std::mutex g_prime_mutex;
PrimeSnapshot g_primes = std::make_shared<const PrimeVec>(PrimeVec{2, 3, 5, 7, 11, 13});
std::uint64_t g_sieved_to = 13;

PrimeSnapshot snapshot() {
    std::lock_guard<std::mutex> lock(g_prime_mutex);
    return g_primes;
}

PrimeVec sieve_upto(std::uint64_t limit) {
    std::vector<bool> composite(limit + 1, false);
    PrimeVec out;
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        if (i <= limit / i)
            for (std::uint64_t k = i * i; k <= limit; k += i) composite[k] = true;
    }
    return out;
}

/// Grow the sieve so that all primes <= value are cached.
PrimeSnapshot extend_to_value(std::uint64_t value) {
    std::lock_guard<std::mutex> lock(g_prime_mutex);
    if (value <= g_sieved_to) return g_primes;
    if (value > kSieveCap)
        throw std::domain_error("prime request exceeds the supported sieve range");
    std::uint64_t target = std::max<std::uint64_t>(g_sieved_to * 2, 64);
    while (target < value) target *= 2;
    target = std::min(target, kSieveCap);
    g_primes = std::make_shared<const PrimeVec>(sieve_upto(target));
    g_sieved_to = target;
    return g_primes;
}

/// Grow the sieve until at least `count` primes are cached.
PrimeSnapshot extend_to_count(std::size_t count) {
    PrimeSnapshot snap = snapshot();
    while (snap->size() < count) {
        std::uint64_t next;
        {
            std::lock_guard<std::mutex> lock(g_prime_mutex);
            next = g_sieved_to * 2;
        }
        if (next > kSieveCap) {
            snap = extend_to_value(kSieveCap);
            if (snap->size() < count)
                throw std::domain_error("prime request exceeds the supported sieve range");
            break;
        }
        snap = extend_to_value(next);
    }
    return snap;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out;
    if (__builtin_mul_overflow(a, b, &out))
        throw std::overflow_error("monomial index overflows 64-bit range");
    return out;
}

} // namespace

std::uint64_t nth_prime(std::size_t j) {
    if (j == 0) throw std::domain_error("prime positions are 1-based");
    PrimeSnapshot snap = snapshot();
    if (j > snap->size()) snap = extend_to_count(j);
    return (*snap)[j - 1];
}

std::size_t prime_cache_size() { return snapshot()->size(); }

MonomialIndex factorize(std::uint64_t n) {
    if (n == 0) throw std::domain_error("index must be a positive integer");
    MonomialIndex out;
    out.n = n;
    if (n == 1) return out;

    PrimeSnapshot primes = snapshot();
    std::uint64_t m = n;
    std::size_t j = 0;
    while (m > 1) {
        if (j >= primes->size()) primes = extend_to_count(primes->size() * 2);
        std::uint64_t p = (*primes)[j];
        if (p > m / p) break; // p*p > m without overflow
        if (m % p == 0) {
            std::uint32_t e = 0;
            while (m % p == 0) {
                m /= p;
                ++e;
            }
            out.alpha.resize(j + 1, 0);
            out.alpha[j] = e;
            out.weight += static_cast<std::uint64_t>(j + 1) * e;
        }
        ++j;
    }
    if (m > 1) {
        // remaining cofactor is prime; locate its position
        if (m > primes->back()) primes = extend_to_value(m);
        auto it = std::lower_bound(primes->begin(), primes->end(), m);
        std::size_t pos = static_cast<std::size_t>(it - primes->begin()); // 0-based
        out.alpha.resize(pos + 1, 0);
        out.alpha[pos] = 1;
        out.weight += pos + 1;
    }
    return out;
}

std::uint64_t index_of(const std::vector<std::uint32_t>& alpha) {
    std::uint64_t n = 1;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        std::uint32_t e = alpha[j];
        if (e == 0) continue;
        std::uint64_t p = nth_prime(j + 1);
        for (std::uint32_t k = 0; k < e; ++k) n = checked_mul(n, p);
    }
    return n;
}

std::uint64_t weight_of(std::uint64_t n) { return factorize(n).weight; }

bool in_abschnitt(std::uint64_t n, std::size_t k) {
    if (n == 0) throw std::domain_error("index must be a positive integer");
    if (k == 0) throw std::domain_error("abschnitt order must be positive");
    std::uint64_t m = n;
    for (std::size_t j = 1; j <= k && m > 1; ++j) {
        std::uint64_t p = nth_prime(j);
        while (m % p == 0) m /= p;
    }
    return m == 1;
}

TruncationPolicy TruncationPolicy::max_index(std::uint64_t n) {
    if (n == 0) throw std::domain_error("max_index cutoff must be positive");
    return TruncationPolicy(Kind::max_index, n);
}

TruncationPolicy TruncationPolicy::max_weight(std::uint64_t w) {
    return TruncationPolicy(Kind::max_weight, w);
}

bool TruncationPolicy::admits(std::uint64_t n) const {
    if (kind_ == Kind::max_index) return n >= 1 && n <= value_;
    return weight_of(n) <= value_;
}

bool TruncationPolicy::admits(const MonomialIndex& m) const {
    if (kind_ == Kind::max_index) return m.n <= value_;
    return m.weight <= value_;
}

std::string TruncationPolicy::to_string() const {
    return (kind_ == Kind::max_index ? "max_index:" : "max_weight:") + std::to_string(value_);
}

TruncationPolicy TruncationPolicy::parse(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("truncation must look like max_index:N or max_weight:W");
    std::string kind = text.substr(0, colon);
    std::string num = text.substr(colon + 1);
    std::uint64_t value = 0;
    try {
        size_t used = 0;
        value = std::stoull(num, &used);
        if (used != num.size()) throw std::invalid_argument(num);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad truncation value: " + num);
    }
    if (kind == "max_index") return max_index(value);
    if (kind == "max_weight") return max_weight(value);
    throw std::invalid_argument("unknown truncation kind: " + kind);
}

namespace {

void enumerate_weight_rec(std::size_t min_pos, std::uint64_t budget, std::uint64_t n,
                          std::uint64_t weight, std::vector<std::uint32_t>& alpha,
                          std::vector<MonomialIndex>& out) {
    MonomialIndex m;
    m.n = n;
    m.weight = weight;
    m.alpha = alpha;
    while (!m.alpha.empty() && m.alpha.back() == 0) m.alpha.pop_back();
    out.push_back(std::move(m));
    for (std::size_t j = min_pos; j <= budget; ++j) {
        std::uint64_t p = nth_prime(j);
        std::uint64_t nn = checked_mul(n, p);
        if (alpha.size() < j) alpha.resize(j, 0);
        ++alpha[j - 1];
        enumerate_weight_rec(j, budget - j, nn, weight + j, alpha, out);
        --alpha[j - 1];
    }
}

} // namespace

std::vector<MonomialIndex> enumerate_indices(const TruncationPolicy& cutoff) {
    std::vector<MonomialIndex> out;
    if (cutoff.kind() == TruncationPolicy::Kind::max_index) {
        out.reserve(cutoff.value());
        for (std::uint64_t n = 1; n <= cutoff.value(); ++n) out.push_back(factorize(n));
        return out;
    }
    std::uint64_t w = cutoff.value();
    if (w >= 64)
        throw std::overflow_error("max_weight cutoff >= 64 overflows 64-bit indices (2^W)");
    std::vector<std::uint32_t> alpha;
    enumerate_weight_rec(1, w, 1, 0, alpha, out);
    std::sort(out.begin(), out.end(),
              [](const MonomialIndex& a, const MonomialIndex& b) { return a.n < b.n; });
    return out;
}

} // namespace polytorus
