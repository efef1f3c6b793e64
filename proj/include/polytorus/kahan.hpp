#pragma once

#include <complex>

namespace polytorus {

/// Kahan compensated accumulator. All norm and integral accumulations in the
/// library run through this; the stated tolerances assume it.
class KahanSum {
public:
    void add(double x) {
        double y = x - c_;
        double t = sum_ + y;
        c_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double c_ = 0.0;
};

class KahanComplexSum {
public:
    void add(std::complex<double> z) {
        re_.add(z.real());
        im_.add(z.imag());
    }
    std::complex<double> value() const { return {re_.value(), im_.value()}; }

private:
    KahanSum re_, im_;
};

/// Running mean/variance (Welford). Merging two stats is deterministic, so a
/// sample set split into fixed blocks gives the same result regardless of
/// which thread handled which block.
class RunningStat {
public:
    void add(double x) {
        ++count_;
        double delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (x - mean_);
    }
    void merge(const RunningStat& other) {
        if (other.count_ == 0) return;
        if (count_ == 0) { *this = other; return; }
        double n1 = static_cast<double>(count_);
        double n2 = static_cast<double>(other.count_);
        double delta = other.mean_ - mean_;
        double n = n1 + n2;
        mean_ += delta * n2 / n;
        m2_ += other.m2_ + delta * delta * n1 * n2 / n;
        count_ += other.count_;
    }
    std::uint64_t count() const { return count_; }
    double mean() const { return mean_; }
    double sample_variance() const {
        return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
    }
    double stderr_of_mean() const {
        if (count_ < 2) return 0.0;
        double v = sample_variance();
        if (v < 0.0) v = 0.0;
        return std::sqrt(v / static_cast<double>(count_));
    }

private:
    std::uint64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Integer-exponent power by repeated squaring; deterministic across libm
/// implementations, unlike std::pow with a rounded double exponent.
inline double pow_int(double base, std::uint64_t e) {
    double r = 1.0;
    double b = base;
    while (e != 0) {
        if (e & 1ULL) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

} // namespace polytorus
