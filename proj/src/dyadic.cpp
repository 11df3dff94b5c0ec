#include "cmlab/dyadic.hpp"

#include <algorithm>
#include <climits>
#include <sstream>

namespace cmlab {

namespace {

std::uint64_t bitlen(const mpz_class& v) {
    return v == 0 ? 0 : mpz_sizeinbase(v.get_mpz_t(), 2);
}

mpz_class shl(const mpz_class& v, std::uint64_t s) {
    mpz_class r;
    mpz_mul_2exp(r.get_mpz_t(), v.get_mpz_t(), s);
    return r;
}

}  // namespace

void Dyadic::normalize() {
    if (num_ == 0) {
        k_ = 0;
        return;
    }
    if (k_ == 0) return;
    std::uint64_t tz = mpz_scan1(num_.get_mpz_t(), 0);
    std::uint64_t s = std::min<std::uint64_t>(tz, k_);
    if (s > 0) {
        mpz_tdiv_q_2exp(num_.get_mpz_t(), num_.get_mpz_t(), s);
        k_ -= s;
    }
}

Dyadic Dyadic::make(mpz_class p, std::uint64_t k) {
    Dyadic d;
    d.num_ = std::move(p);
    d.k_ = k;
    d.normalize();
    return d;
}

Dyadic Dyadic::pow2(long e) {
    if (e >= 0) return Dyadic(shl(mpz_class(1), static_cast<std::uint64_t>(e)));
    return make(mpz_class(1), static_cast<std::uint64_t>(-e));
}

Dyadic Dyadic::parse(const std::string& text) {
    auto fail = [&]() -> Dyadic {
        throw std::invalid_argument("not a dyadic literal: '" + text + "'");
    };
    std::string t;
    for (char c : text)
        if (c != ' ') t.push_back(c);
    if (t.empty()) return fail();
    auto slash = t.find('/');
    mpz_class p;
    if (p.set_str(t.substr(0, slash), 10) != 0) return fail();
    if (slash == std::string::npos) return Dyadic(p);
    std::string den = t.substr(slash + 1);
    if (den.rfind("2^", 0) == 0) {
        std::string ks = den.substr(2);
        if (ks.empty() || !std::all_of(ks.begin(), ks.end(), ::isdigit)) return fail();
        return make(p, std::stoull(ks));
    }
    mpz_class q;
    if (q.set_str(den, 10) != 0 || q <= 0) return fail();
    if (mpz_popcount(q.get_mpz_t()) != 1) return fail();
    return make(p, bitlen(q) - 1);
}

Dyadic Dyadic::operator-() const {
    Dyadic r = *this;
    r.num_ = -r.num_;
    return r;
}

Dyadic& Dyadic::operator+=(const Dyadic& o) {
    if (k_ == o.k_) {
        num_ += o.num_;
    } else if (k_ > o.k_) {
        num_ += shl(o.num_, k_ - o.k_);
    } else {
        num_ = shl(num_, o.k_ - k_) + o.num_;
        k_ = o.k_;
    }
    normalize();
    return *this;
}

Dyadic& Dyadic::operator-=(const Dyadic& o) { return *this += -o; }

Dyadic& Dyadic::operator*=(const Dyadic& o) {
    num_ *= o.num_;
    k_ += o.k_;
    normalize();
    return *this;
}

Dyadic Dyadic::scaled(long e) const {
    Dyadic r = *this;
    if (r.num_ == 0) return r;
    if (e >= 0) {
        auto ue = static_cast<std::uint64_t>(e);
        if (r.k_ >= ue) {
            r.k_ -= ue;
        } else {
            r.num_ = shl(r.num_, ue - r.k_);
            r.k_ = 0;
        }
    } else {
        r.k_ += static_cast<std::uint64_t>(-e);
    }
    r.normalize();
    return r;
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    int sa = a.sign(), sb = b.sign();
    if (sa != sb) return sa <=> sb;
    int c;
    if (a.k_ == b.k_) {
        c = cmp(a.num_, b.num_);
    } else if (a.k_ > b.k_) {
        c = cmp(a.num_, shl(b.num_, a.k_ - b.k_));
    } else {
        c = cmp(shl(a.num_, b.k_ - a.k_), b.num_);
    }
    return c <=> 0;
}

Dyadic Dyadic::floor_to(std::uint64_t r) const {
    if (k_ <= r) return *this;
    mpz_class q;
    mpz_fdiv_q_2exp(q.get_mpz_t(), num_.get_mpz_t(), k_ - r);
    return make(q, r);
}

Dyadic Dyadic::ceil_to(std::uint64_t r) const {
    if (k_ <= r) return *this;
    mpz_class q;
    mpz_cdiv_q_2exp(q.get_mpz_t(), num_.get_mpz_t(), k_ - r);
    return make(q, r);
}

mpz_class Dyadic::floor() const { return floor_to(0).num_; }
mpz_class Dyadic::ceil() const { return ceil_to(0).num_; }

mpq_class Dyadic::to_rational() const {
    mpq_class q(num_, shl(mpz_class(1), k_));
    q.canonicalize();
    return q;
}

double Dyadic::to_double() const { return to_rational().get_d(); }

std::string Dyadic::str() const { return num_.get_str() + "/2^" + std::to_string(k_); }

std::string Dyadic::fraction() const {
    if (k_ == 0) return num_.get_str();
    return num_.get_str() + "/" + shl(mpz_class(1), k_).get_str();
}

std::string Dyadic::decimal() const {
    if (k_ == 0) return num_.get_str();
    // p / 2^k = p * 5^k / 10^k
    mpz_class five;
    mpz_ui_pow_ui(five.get_mpz_t(), 5, k_);
    mpz_class scaled = abs(num_) * five;
    std::string digits = scaled.get_str();
    if (digits.size() <= k_) digits = std::string(k_ - digits.size() + 1, '0') + digits;
    std::string out = digits.substr(0, digits.size() - k_) + "." + digits.substr(digits.size() - k_);
    return (num_ < 0 ? "-" : "") + out;
}

std::ostream& operator<<(std::ostream& os, const Dyadic& d) { return os << d.str(); }

Dyadic dyadic_add(const Dyadic& a, const Dyadic& b) { return a + b; }
Dyadic dyadic_mul(const Dyadic& a, const Dyadic& b) { return a * b; }
Dyadic dyadic_avg(const Dyadic& a, const Dyadic& b) { return (a + b).half(); }

bool is_dyadic(const mpq_class& q) {
    mpz_class den = q.get_den();
    return mpz_popcount(den.get_mpz_t()) == 1;
}

Dyadic from_rational(const mpq_class& q) {
    mpq_class c = q;
    c.canonicalize();
    if (!is_dyadic(c)) throw std::domain_error("rational " + c.get_str() + " is not dyadic");
    return Dyadic::make(c.get_num(), bitlen(c.get_den()) - 1);
}

namespace {

// u / v >= 2^(a / 2^j) with u, v > 0, decided on integers.
bool ratio_geq_pow2(const mpz_class& u, const mpz_class& v, const Dyadic& e) {
    const std::uint64_t j = e.log_denominator();
    if (j > 20) throw std::domain_error("exponent denominator too fine: " + e.str());
    const mpz_class& a = e.numerator();
    // Cheap bracket: log2(u/v) lies in (bu - bv - 1, bu - bv + 1).
    long lo = static_cast<long>(bitlen(u)) - static_cast<long>(bitlen(v)) - 1;
    long hi = lo + 2;
    mpz_class M = shl(mpz_class(1), j);
    if (a <= mpz_class(lo) * M) return true;
    if (a >= mpz_class(hi) * M) return false;
    // Both sides to the power M = 2^j.
    unsigned long m = 1ul << j;
    mpz_class lhs, rhs;
    mpz_pow_ui(lhs.get_mpz_t(), u.get_mpz_t(), m);
    mpz_pow_ui(rhs.get_mpz_t(), v.get_mpz_t(), m);
    long av = a.get_si();
    if (av >= 0)
        rhs = shl(rhs, static_cast<std::uint64_t>(av));
    else
        lhs = shl(lhs, static_cast<std::uint64_t>(-av));
    return lhs >= rhs;
}

}  // namespace

bool geq_pow2(const Dyadic& d, const Dyadic& e) {
    if (d.sign() <= 0) return false;
    return ratio_geq_pow2(d.numerator(), shl(mpz_class(1), d.log_denominator()), e);
}

bool geq_pow2(const mpq_class& q, const Dyadic& e) {
    if (sgn(q) <= 0) return false;
    return ratio_geq_pow2(q.get_num(), q.get_den(), e);
}

bool leq_pow2(const Dyadic& d, const Dyadic& e) {
    if (e.is_integer()) return d <= Dyadic::pow2(e.numerator().get_si());
    // 2^e is irrational here, so d can never equal it.
    return !geq_pow2(d, e);
}

long floor_log2(const mpq_class& q) {
    if (sgn(q) <= 0) throw std::domain_error("floor_log2 of a non-positive value");
    const mpz_class u = q.get_num(), v = q.get_den();
    long c = static_cast<long>(bitlen(u)) - static_cast<long>(bitlen(v));
    // q >= 2^c ?
    bool ge = c >= 0 ? u >= shl(v, c) : shl(u, -c) >= v;
    return ge ? c : c - 1;
}

}  // namespace cmlab
