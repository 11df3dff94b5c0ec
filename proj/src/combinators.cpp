#include "cmlab/combinators.hpp"

#include "cmlab/oracle.hpp"

#include <cmath>
#include <random>

namespace cmlab {

Martingale sum_finite(const Martingale& a, const Martingale& b) {
    Martingale m;
    m.name = "(" + a.name + ") + (" + b.name + ")";
    m.counting_class = a.counting_class == b.counting_class ? a.counting_class : a.counting_class + "+" + b.counting_class;
    m.supermartingale = a.supermartingale || b.supermartingale;
    if (a.has_exact() && b.has_exact()) {
        m.exact = [a, b](const BitString& w) { return a.exact(w) + b.exact(w); };
    } else if (a.has_rational() && b.has_rational()) {
        m.rational = [a, b](const BitString& w) { return mpq_class(a.rational_value(w) + b.rational_value(w)); };
    }
    m.approx = [a, b](const BitString& w, unsigned r) { return a.value(w, r + 1) + b.value(w, r + 1); };
    if (a.freeze_depth && b.freeze_depth) m.freeze_depth = std::max(*a.freeze_depth, *b.freeze_depth);
    m.initial_capital = a.initial_capital + b.initial_capital;
    return m;
}

MartingaleFamily::MartingaleFamily(std::string name, Generator gen, Bound capital_bound, std::size_t first,
                                   std::optional<std::size_t> last)
    : name_(std::move(name)),
      gen_(std::move(gen)),
      bound_(std::move(capital_bound)),
      first_(first),
      last_(last),
      cache_(std::make_shared<std::map<std::size_t, Martingale>>()) {
    if (last_ && *last_ < first_) throw std::invalid_argument("family '" + name_ + "' has an empty level range");
}

const Martingale& MartingaleFamily::at(std::size_t n) const {
    if (!contains_level(n))
        throw std::out_of_range("level " + std::to_string(n) + " outside family '" + name_ + "'");
    auto it = cache_->find(n);
    if (it != cache_->end()) return it->second;
    Martingale m = gen_(n);
    if (!m.has_exact()) throw std::invalid_argument("family '" + name_ + "' member " + std::to_string(n) + " is not exact");
    Dyadic cap = bound_(n);
    if (m.initial_capital > cap)
        throw CapitalBoundViolation("family '" + name_ + "' member " + std::to_string(n) + " has capital " +
                                    m.initial_capital.fraction() + " above its declared bound " + cap.fraction());
    return cache_->emplace(n, std::move(m)).first->second;
}

Dyadic sum_family(const MartingaleFamily& fam, const ConvergenceModulus& mod, const BitString& w, unsigned r,
                  const AuditOptions& opts) {
    const std::size_t M = mod.m(w, r);
    std::size_t hi = fam.last() ? std::min(M, *fam.last()) : M;
    Dyadic total;
    for (std::size_t n = fam.first(); n <= hi; ++n) total += fam.at(n).value(w);
    Dyadic tail;
    for (std::size_t n = M + 1; n <= M + opts.tail_span; ++n)
        if (fam.contains_level(n)) tail += fam.at(n).value(w);
    if (tail > Dyadic::pow2(-static_cast<long>(r)))
        throw ModulusFailure("modulus '" + mod.description + "' leaves tail " + tail.fraction() + " > 2^-" +
                             std::to_string(r) + " at w = '" + w.display() + "' (m = " + std::to_string(M) + ")");
    return total;
}

Martingale summed_martingale(const MartingaleFamily& fam, const ConvergenceModulus& mod, const AuditOptions& opts) {
    Martingale m;
    m.name = "sum(" + fam.name() + ")";
    m.counting_class = "#P";
    m.metadata = "modulus: " + mod.description;
    if (fam.finite()) {
        m.exact = [fam](const BitString& w) {
            Dyadic total;
            for (std::size_t n = fam.first(); n <= *fam.last(); ++n) total += fam.at(n).value(w);
            return total;
        };
        m.approx = [e = m.exact](const BitString& w, unsigned) { return e(w); };
        std::optional<std::size_t> freeze = 0;
        for (std::size_t n = fam.first(); n <= *fam.last(); ++n) {
            auto fd = fam.at(n).freeze_depth;
            if (!fd) {
                freeze.reset();
                break;
            }
            freeze = std::max(*freeze, *fd);
        }
        m.freeze_depth = freeze;
        m.initial_capital = m.exact(BitString{});
    } else {
        m.approx = [fam, mod, opts](const BitString& w, unsigned r) { return sum_family(fam, mod, w, r, opts); };
        m.initial_capital = m.approx(BitString{}, 32);
    }
    return m;
}

namespace {

void audit_capital_series(const MartingaleFamily& fam, const ConvergenceModulus& mod, const AuditOptions& opts) {
    std::mt19937_64 rng(opts.seed);
    for (std::size_t k = 0; k < opts.random_audits; ++k) {
        unsigned i = static_cast<unsigned>(rng() % 21);
        std::size_t M = mod.m(BitString{}, i);
        Dyadic tail;
        for (std::size_t n = M + 1; n <= M + opts.tail_span; ++n)
            if (fam.contains_level(n)) tail += fam.capital_bound(n);
        if (tail > Dyadic::pow2(-static_cast<long>(i)))
            throw ModulusFailure("declared capital series of '" + fam.name() + "' fails modulus '" + mod.description +
                                 "' at i = " + std::to_string(i));
    }
}

}  // namespace

Martingale borel_cantelli_measure(const MartingaleFamily& fam, const ConvergenceModulus& mod, const AuditOptions& opts) {
    std::size_t hi = fam.last() ? *fam.last() : fam.first() + opts.tail_span;
    bool all_zero = true;
    for (std::size_t n = fam.first(); n <= hi && all_zero; ++n) all_zero = fam.at(n).initial_capital.is_zero();
    if (all_zero) throw DegenerateFamily("family '" + fam.name() + "' aggregates to the zero martingale");
    audit_capital_series(fam, mod, opts);
    Martingale m = summed_martingale(fam, mod, opts);
    m.name = "borel-cantelli(" + fam.name() + ")";
    return m;
}

long dimension_scale_exponent(const Dyadic& t, std::size_t n) {
    return ((Dyadic(1) - t) * Dyadic(static_cast<long>(n))).ceil().get_si();
}

Martingale borel_cantelli_dimension(const MartingaleFamily& fam, const Dyadic& s, const Dyadic& t,
                                    std::optional<ConvergenceModulus> mod, const AuditOptions& opts) {
    if (!(t > s)) throw std::invalid_argument("dimension aggregate needs t > s (s = " + s.fraction() + ", t = " + t.fraction() + ")");
    auto gen = [fam, s, t](std::size_t n) {
        const Martingale& dn = fam.at(n);
        Dyadic e = (s - Dyadic(1)) * Dyadic(static_cast<long>(n));
        if (!leq_pow2(dn.initial_capital, e))
            throw CapitalBoundViolation("member " + std::to_string(n) + " of '" + fam.name() + "' has capital " +
                                        dn.initial_capital.fraction() + " above 2^{(s-1)n}");
        long k = dimension_scale_exponent(t, n);
        Martingale scaled = dn;
        scaled.name = "2^" + std::to_string(k) + " * " + dn.name;
        scaled.exact = [inner = dn.exact, k](const BitString& w) { return inner(w).scaled(k); };
        scaled.approx = [e = scaled.exact](const BitString& w, unsigned) { return e(w); };
        scaled.initial_capital = dn.initial_capital.scaled(k);
        return scaled;
    };
    auto bound = [fam, t](std::size_t n) { return fam.capital_bound(n).scaled(dimension_scale_exponent(t, n)); };
    MartingaleFamily scaled("scaled(" + fam.name() + ")", gen, bound, fam.first(), fam.last());

    if (!mod) {
        // d_n'(w) <= 2^{|w| + 1 - δn} with δ = t - s, so the tail past M is at most
        // 2^{|w|+1-δ(M+1)} / (1 - 2^-δ) and 1 - 2^-δ >= min(δ, 1) / 4.
        const Dyadic delta = t - s;
        long c = 2;
        if (delta < Dyadic(1)) c += -floor_log2(delta.to_rational());
        mod = ConvergenceModulus{
            "geometric bound for delta = " + delta.fraction(), [delta, c](const BitString& w, unsigned r) {
                Dyadic need(static_cast<long>(w.size()) + 1 + static_cast<long>(r) + c);
                mpq_class q = need.to_rational() / delta.to_rational();
                mpz_class M;
                mpz_cdiv_q(M.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
                return static_cast<std::size_t>(M.get_ui());
            }};
    }
    if (!fam.finite()) audit_capital_series(scaled, *mod, opts);
    Martingale m = summed_martingale(scaled, *mod, opts);
    m.name = "borel-cantelli-dim(" + fam.name() + ", t = " + t.fraction() + ")";
    return m;
}

namespace {

template <class Target>
GuaranteeReport check_guarantee(const MartingaleFamily& fam, const Martingale& aggregate, Target target_met) {
    if (!fam.finite()) throw std::invalid_argument("guarantee checks need a finite family");
    GuaranteeReport rep;
    for (std::size_t n = fam.first(); n <= *fam.last(); ++n) {
        const Martingale& dn = fam.at(n);
        if (!dn.freeze_depth) throw std::invalid_argument("member " + std::to_string(n) + " has no freeze depth");
        const std::size_t L = *dn.freeze_depth;
        if (L > 22) throw CapExceeded("guarantee check at depth " + std::to_string(L));
        BitString w = BitString::zeros(L);
        do {
            ++rep.leaves_checked;
            if (dn.value(w) >= Dyadic(1)) {
                ++rep.covered;
                Dyadic v = aggregate.value(w);
                if (!target_met(v, w))
                    rep.failures.push_back("n=" + std::to_string(n) + ",w=" + w.display() + ",value=" + v.fraction());
            }
        } while (w.increment());
    }
    return rep;
}

}  // namespace

GuaranteeReport check_measure_guarantee(const MartingaleFamily& fam, const Martingale& aggregate) {
    return check_guarantee(fam, aggregate, [](const Dyadic& v, const BitString&) { return v >= Dyadic(1); });
}

GuaranteeReport check_dimension_guarantee(const MartingaleFamily& fam, const Martingale& aggregate, const Dyadic& t) {
    return check_guarantee(fam, aggregate, [t](const Dyadic& v, const BitString& w) {
        return geq_pow2(v, (Dyadic(1) - t) * Dyadic(static_cast<long>(w.size())));
    });
}

ScalingAudit dimension_scaling_audit(const Dyadic& s, const Dyadic& t, std::size_t horizon) {
    ScalingAudit a;
    for (std::size_t n = 1; n <= horizon; ++n) {
        Dyadic N(static_cast<long>(n));
        Dyadic lhs = Dyadic(dimension_scale_exponent(t, n)) + (s - Dyadic(1)) * N;
        Dyadic rhs = Dyadic(1) - (t - s) * N;
        if (lhs > rhs) a.termwise = false;
        a.scaled_partial += std::pow(2.0L, static_cast<long double>(lhs.to_double()));
        a.geometric_partial += std::pow(2.0L, static_cast<long double>(rhs.to_double()));
    }
    return a;
}

CountingRepresentation leveled_representation(std::size_t n, std::function<mpz_class(const BitString&)> ext_sum) {
    CountingRepresentation rep;
    rep.n = n;
    rep.f = std::move(ext_sum);
    rep.log_g = [n](const BitString& w) { return static_cast<std::uint64_t>(n - std::min(n, w.size())); };
    return rep;
}

mpq_class shrink_factor(std::size_t n) {
    mpz_class num, den;
    mpz_ui_pow_ui(num.get_mpz_t(), n - 1, n);
    mpz_ui_pow_ui(den.get_mpz_t(), n + 1, n);
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

mpq_class gamma_factor(std::size_t n) {
    mpq_class q = mpq_class(static_cast<long>(n) - 1, static_cast<long>(n)) * shrink_factor(n);
    q.canonicalize();
    return q;
}

mpq_class e_minus_two_lower_bound() {
    mpq_class q(13533528, 100000000);
    q.canonicalize();
    return q;
}

Martingale approx_supermartingale(const CountingRepresentation& rep, Approximator h) {
    const std::size_t n = rep.n;
    if (n < 2) throw std::invalid_argument("approximate-counting transform needs n >= 2");
    auto eval = [rep, h = std::move(h), n](const BitString& w) {
        BitString v = w.prefix(n);
        mpz_class fv = rep.f(v);
        mpq_class hv = h(v);
        mpq_class lo = mpq_class(fv) * mpq_class(static_cast<long>(n) - 1, static_cast<long>(n));
        mpq_class hi = mpq_class(fv) * mpq_class(static_cast<long>(n) + 1, static_cast<long>(n));
        lo.canonicalize();
        hi.canonicalize();
        if (hv < lo || hv > hi)
            throw ApproximatorOutOfBand("h('" + v.display() + "') = " + hv.get_str() + " outside [" + lo.get_str() +
                                        ", " + hi.get_str() + "]");
        mpz_class rn, rd, g;
        mpz_ui_pow_ui(rn.get_mpz_t(), n - 1, v.size());
        mpz_ui_pow_ui(rd.get_mpz_t(), n + 1, v.size());
        mpz_setbit(g.get_mpz_t(), rep.log_g(v));
        mpq_class out = hv * mpq_class(rn, rd * g);
        out.canonicalize();
        return out;
    };
    Martingale m;
    m.name = "approx-supermartingale(n = " + std::to_string(n) + ")";
    m.counting_class = "Delta3";
    m.metadata = "dyadic floor error <= 2^-" + std::to_string(kSupermartingaleFloorBits);
    m.supermartingale = true;
    m.freeze_depth = n;
    m.rational = eval;
    m.approx = [eval](const BitString& w, unsigned r) {
        const unsigned R = std::max(r, kSupermartingaleFloorBits);
        mpq_class q = eval(w);
        mpz_class scaled_num, fl;
        mpz_mul_2exp(scaled_num.get_mpz_t(), q.get_num_mpz_t(), R);
        mpz_fdiv_q(fl.get_mpz_t(), scaled_num.get_mpz_t(), q.get_den_mpz_t());
        return Dyadic::make(fl, R);
    };
    m.initial_capital = m.approx(BitString{}, kSupermartingaleFloorBits);
    return m;
}

}  // namespace cmlab
