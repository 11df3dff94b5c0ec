#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace cmlab {

// Exact rational p / 2^k with an arbitrary-precision numerator.
// Canonical form: p odd, or k == 0 (zero is stored as 0 / 2^0).
class Dyadic {
public:
    Dyadic() = default;
    Dyadic(long v) : num_(v) {}  // NOLINT(google-explicit-constructor)
    explicit Dyadic(const mpz_class& v) : num_(v) {}

    // p / 2^k, canonicalized.
    static Dyadic make(mpz_class p, std::uint64_t k);
    // 2^e for any integer e.
    static Dyadic pow2(long e);
    // Parses "p/2^k", "p/q" with q a power of two, or a plain integer "p".
    static Dyadic parse(const std::string& text);

    const mpz_class& numerator() const { return num_; }
    std::uint64_t log_denominator() const { return k_; }

    int sign() const { return sgn(num_); }
    bool is_zero() const { return sign() == 0; }
    bool is_integer() const { return k_ == 0; }

    Dyadic operator-() const;
    Dyadic& operator+=(const Dyadic& o);
    Dyadic& operator-=(const Dyadic& o);
    Dyadic& operator*=(const Dyadic& o);
    friend Dyadic operator+(Dyadic a, const Dyadic& b) { return a += b; }
    friend Dyadic operator-(Dyadic a, const Dyadic& b) { return a -= b; }
    friend Dyadic operator*(Dyadic a, const Dyadic& b) { return a *= b; }

    // this * 2^e, exact.
    Dyadic scaled(long e) const;
    Dyadic half() const { return scaled(-1); }

    friend bool operator==(const Dyadic& a, const Dyadic& b) {
        return a.k_ == b.k_ && a.num_ == b.num_;
    }
    friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

    // floor(this * 2^r) / 2^r
    Dyadic floor_to(std::uint64_t r) const;
    // ceil(this * 2^r) / 2^r
    Dyadic ceil_to(std::uint64_t r) const;
    mpz_class floor() const;
    mpz_class ceil() const;

    mpq_class to_rational() const;
    double to_double() const;

    // Canonical text form "p/2^k".
    std::string str() const;
    // Friendlier "p/q" form ("5/16", "3", "0") for reports.
    std::string fraction() const;
    // Exact decimal expansion (a dyadic always terminates).
    std::string decimal() const;

private:
    void normalize();

    mpz_class num_{0};
    std::uint64_t k_ = 0;
};

std::ostream& operator<<(std::ostream& os, const Dyadic& d);

Dyadic dyadic_add(const Dyadic& a, const Dyadic& b);
Dyadic dyadic_mul(const Dyadic& a, const Dyadic& b);
Dyadic dyadic_avg(const Dyadic& a, const Dyadic& b);

// True iff the rational q has a power-of-two denominator.
bool is_dyadic(const mpq_class& q);
Dyadic from_rational(const mpq_class& q);  // throws std::domain_error if not dyadic

// Exact comparison d >= 2^e for a dyadic exponent e. Raises both sides to the
// power 2^k(e) so only integer comparisons remain.
bool geq_pow2(const Dyadic& d, const Dyadic& e);
// Same test for a rational value.
bool geq_pow2(const mpq_class& q, const Dyadic& e);
// Exact comparison d <= 2^e.
bool leq_pow2(const Dyadic& d, const Dyadic& e);

// floor(log2 q) for q > 0.
long floor_log2(const mpq_class& q);

}  // namespace cmlab
