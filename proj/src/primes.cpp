#include "phisolve/arith.hpp"

#include <algorithm>
#include <cmath>
#include <new>
#include <string>

namespace phisolve {

namespace {

// Refuse sieves whose working set would exceed this.
constexpr u64 kMaxSieveBytes = u64(8) << 30;

} // namespace

PrimeTable::PrimeTable(u64 limit) : limit_(limit) {
    if (limit < 2) {
        log_survival_.assign(1, 0.0);
        log_prime_.assign(1, 0.0);
        return;
    }
    // Odd-only byte sieve plus ~24 bytes per stored prime (prime and two sums).
    const double estimated_primes = limit < 100 ? 25.0 : 1.3 * limit / std::log(double(limit));
    const double bytes = double(limit) / 2 + 24.0 * estimated_primes;
    if (bytes > double(kMaxSieveBytes)) {
        throw std::length_error("prime table up to " + std::to_string(limit) +
                                " needs ~" + std::to_string(u64(bytes) >> 20) + " MiB");
    }

    try {
        // composite[i] describes 2i+1.
        const u64 half = (limit - 1) / 2 + 1;
        std::vector<std::uint8_t> composite(half, 0);
        composite[0] = 1;
        for (u64 i = 1; (2 * i + 1) * (2 * i + 1) <= limit; ++i) {
            if (composite[i]) {
                continue;
            }
            const u64 p = 2 * i + 1;
            for (u64 j = p * p / 2; j < half; j += p) {
                composite[j] = 1;
            }
        }

        primes_.reserve(std::size_t(estimated_primes));
        primes_.push_back(2);
        for (u64 i = 1; i < half; ++i) {
            if (!composite[i]) {
                primes_.push_back(2 * i + 1);
            }
        }

        log_survival_.resize(primes_.size() + 1);
        log_prime_.resize(primes_.size() + 1);
        long double survival = 0, logp = 0;
        log_survival_[0] = 0;
        log_prime_[0] = 0;
        for (std::size_t i = 0; i < primes_.size(); ++i) {
            const long double p = primes_[i];
            survival += std::log1p(-1.0L / p);
            logp += std::log(p);
            log_survival_[i + 1] = double(survival);
            log_prime_[i + 1] = double(logp);
        }
    } catch (const std::bad_alloc&) {
        throw std::length_error("out of memory building prime table up to " + std::to_string(limit));
    }
}

std::size_t PrimeTable::upper_index(u64 x) const {
    return std::size_t(std::upper_bound(primes_.begin(), primes_.end(), x) - primes_.begin());
}

std::size_t PrimeTable::lower_index(u64 x) const {
    return std::size_t(std::lower_bound(primes_.begin(), primes_.end(), x) - primes_.begin());
}

bool PrimeTable::contains(u64 x) const {
    return std::binary_search(primes_.begin(), primes_.end(), x);
}

PrimeTable build_prime_table(u64 limit) {
    return PrimeTable(limit);
}

} // namespace phisolve
