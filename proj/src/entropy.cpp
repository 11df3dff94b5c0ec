#include "cmlab/entropy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <sstream>

namespace cmlab {

namespace {

mpz_class binomial(std::size_t n, std::size_t k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

void enumerate_level(std::size_t n, std::size_t cap, const std::function<bool(const BitString&)>& member,
                     const std::function<void(const BitString&)>& visit) {
    if (n > cap) throw CapExceeded("enumerating level " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
    BitString x = BitString::zeros(n);
    do {
        if (member(x)) visit(x);
    } while (x.increment());
}

// The MCSP level index n for m = 2^{n+1} - 1 with n >= 2, or 0.
unsigned mcsp_level(std::size_t m) {
    if (m < 7 || !std::has_single_bit(m + 1)) return 0;
    return static_cast<unsigned>(std::countr_zero(m + 1)) - 1;
}

double log2_mpz(const mpz_class& z) {
    if (z <= 0) return -INFINITY;
    long e = 0;
    double d = mpz_get_d_2exp(&e, z.get_mpz_t());
    return std::log2(d) + static_cast<double>(e);
}

}  // namespace

// --- Families -------------------------------------------------------------------

LanguageFamily enumerated_family(std::string name, std::function<bool(const BitString&)> member, std::size_t cap) {
    LanguageFamily A;
    A.name = std::move(name);
    A.member = member;
    A.count = [member, cap](std::size_t n) {
        mpz_class c = 0;
        enumerate_level(n, cap, member, [&c](const BitString&) { ++c; });
        return c;
    };
    A.level = [name = A.name, member](std::size_t n) {
        CoverSpec s;
        s.name = name + "=" + std::to_string(n);
        s.n = n;
        s.member = member;
        s.counting_class = "SpanP";
        return s;
    };
    A.for_each = [member, cap](std::size_t n, const std::function<void(const BitString&)>& visit) {
        enumerate_level(n, cap, member, visit);
    };
    return A;
}

LanguageFamily all_strings_family() {
    LanguageFamily A = enumerated_family("all", [](const BitString&) { return true; });
    A.count = [](std::size_t n) { return mpz_class(mpz_class(1) << static_cast<mp_bitcnt_t>(n)); };
    return A;
}

LanguageFamily zeros_family() {
    LanguageFamily A = enumerated_family("zeros", [](const BitString& x) { return x.count_ones() == 0; });
    A.count = [](std::size_t) { return mpz_class(1); };
    A.for_each = [](std::size_t n, const std::function<void(const BitString&)>& visit) { visit(BitString::zeros(n)); };
    return A;
}

LanguageFamily low_weight_family(std::size_t num, std::size_t den) {
    if (den == 0 || num > den) throw std::invalid_argument("weight fraction must lie in [0, 1]");
    auto limit = [num, den](std::size_t n) { return num * n / den; };
    LanguageFamily A = enumerated_family(
        "weight<=" + std::to_string(num) + "/" + std::to_string(den),
        [limit](const BitString& x) { return x.count_ones() <= limit(x.size()); });
    A.count = [limit](std::size_t n) {
        mpz_class c = 0;
        for (std::size_t k = 0; k <= limit(n); ++k) c += binomial(n, k);
        return c;
    };
    A.level = [name = A.name, member = A.member, limit](std::size_t n) {
        CoverSpec s;
        s.name = name + "=" + std::to_string(n);
        s.n = n;
        s.member = member;
        s.counting_class = "SpanP";
        s.counter = ExtensionCounter{n, [n, limit](const BitString& w) {
            mpz_class c = 0;
            const std::size_t ones = w.count_ones(), K = limit(n), rest = n - w.size();
            if (ones > K) return c;
            for (std::size_t k = 0; k <= std::min(K - ones, rest); ++k) c += binomial(rest, k);
            return c;
        }};
        return s;
    };
    return A;
}

LanguageFamily family_union(const LanguageFamily& a, const LanguageFamily& b, std::size_t cap) {
    auto ma = a.member, mb = b.member;
    return enumerated_family(a.name + "+" + b.name, [ma, mb](const BitString& x) { return ma(x) || mb(x); }, cap);
}

LanguageFamily leveled_family(std::string name, std::map<std::size_t, CoverSpec> levels) {
    auto shared = std::make_shared<const std::map<std::size_t, CoverSpec>>(std::move(levels));
    LanguageFamily A;
    A.name = std::move(name);
    A.member = [shared](const BitString& x) {
        auto it = shared->find(x.size());
        return it != shared->end() && it->second.member(x);
    };
    A.count = [shared](std::size_t n) -> mpz_class {
        auto it = shared->find(n);
        if (it == shared->end()) return 0;
        if (it->second.counter) return it->second.counter->ext_sum(BitString{});
        mpz_class c = 0;
        enumerate_level(n, kDefaultWitnessCap, it->second.member, [&c](const BitString&) { ++c; });
        return c;
    };
    A.level = [shared, nm = A.name](std::size_t n) {
        auto it = shared->find(n);
        if (it != shared->end()) return it->second;
        CoverSpec s;
        s.name = nm + "=" + std::to_string(n) + " (empty)";
        s.n = n;
        s.member = [](const BitString&) { return false; };
        s.counter = ExtensionCounter{n, [](const BitString&) { return mpz_class(0); }};
        return s;
    };
    A.for_each = [shared](std::size_t n, const std::function<void(const BitString&)>& visit) {
        auto it = shared->find(n);
        if (it == shared->end()) return;
        enumerate_level(n, kDefaultWitnessCap, it->second.member, visit);
    };
    return A;
}

LanguageFamily mcsp_family(const std::vector<McspCover>& covers) {
    std::map<std::size_t, CoverSpec> levels;
    auto by_level = std::make_shared<std::map<std::size_t, McspCover>>();
    std::string name = "mcsp";
    for (const auto& c : covers) {
        levels[c.N] = c.spec();
        (*by_level)[c.N] = c;
        name += "[n=" + std::to_string(c.n) + ",s=" + std::to_string(c.s) + "]";
    }
    LanguageFamily A = leveled_family(name, std::move(levels));
    A.count = [by_level](std::size_t n) -> mpz_class {
        auto it = by_level->find(n);
        return it == by_level->end() ? mpz_class(0) : it->second.size();
    };
    // Elements are (free head) x (good table); visited without scanning 2^N strings.
    A.for_each = [by_level](std::size_t n, const std::function<void(const BitString&)>& visit) {
        auto it = by_level->find(n);
        if (it == by_level->end()) return;
        const McspCover& c = it->second;
        const std::size_t rows = std::size_t{1} << c.n, head = c.N - rows;
        if (head > 32) throw CapExceeded("MCSP element walk limited to 2^32 heads");
        std::vector<BitString> tables;
        for (auto key : c.keys) tables.push_back(BitString::from_uint(key, rows));
        for (std::uint64_t h = 0; h < (std::uint64_t{1} << head); ++h) {
            const BitString prefix = BitString::from_uint(h, head);
            for (const auto& t : tables) visit(prefix + t);
        }
    };
    return A;
}

// --- Entropy rates ----------------------------------------------------------------

EntropyTable entropy_rate(const LanguageFamily& A, std::size_t H) {
    EntropyTable t;
    t.family = A.name;
    for (std::size_t n = 1; n <= H; ++n) {
        RateLevel lv;
        lv.n = n;
        lv.count = A.count(n);
        if (lv.count > 0) {
            const mpq_class c(lv.count);
            // Largest j with count >= 2^{j n / 1024}.
            long lo = 0, hi = 1L << kRateGridBits;
            const long top = static_cast<long>(n) << kRateGridBits;  // enough for count <= 2^n
            if (geq_pow2(c, Dyadic::make(mpz_class(hi) * static_cast<long>(n), kRateGridBits))) lo = hi, hi = top;
            while (lo < hi) {
                long mid = lo + (hi - lo + 1) / 2;
                if (geq_pow2(c, Dyadic::make(mpz_class(mid) * static_cast<long>(n), kRateGridBits))) lo = mid;
                else hi = mid - 1;
            }
            lv.grid_rate = Dyadic::make(mpz_class(lo), kRateGridBits);
            lv.rate = log2_mpz(lv.count) / static_cast<double>(n);
            if (!t.max_grid_rate || *lv.grid_rate > *t.max_grid_rate) t.max_grid_rate = lv.grid_rate;
        } else {
            lv.rate = -INFINITY;
        }
        t.levels.push_back(std::move(lv));
    }
    return t;
}

std::string EntropyTable::to_csv() const {
    std::ostringstream os;
    os << "# family=" << family << "\n";
    os << "n,count,grid_rate,rate\n";
    for (const auto& lv : levels) {
        os << lv.n << ',' << lv.count.get_str() << ',' << (lv.grid_rate ? lv.grid_rate->fraction() : "-inf") << ',';
        if (lv.grid_rate) os << lv.rate;
        else os << "-inf";
        os << '\n';
    }
    os << "max,," << (max_grid_rate ? max_grid_rate->fraction() : "-inf") << ",\n";
    return os.str();
}

// --- Gap functions ----------------------------------------------------------------

GapFunction dyadic_gap(std::string description, std::function<Dyadic(std::size_t)> f) {
    GapFunction g;
    g.description = std::move(description);
    g.below = [f](const mpz_class& count, std::size_t n) {
        if (count == 0) return true;
        return !geq_pow2(mpq_class(count), Dyadic(static_cast<long>(n)) - f(n));
    };
    g.floor_value = [f](std::size_t n) { return f(n).floor().get_si(); };
    g.show = [f](std::size_t n) { return f(n).fraction(); };
    return g;
}

GapFunction mcsp_log_gap(const Dyadic& alpha) {
    if (alpha.sign() < 0 || !(alpha < Dyadic(2))) throw std::invalid_argument("alpha must lie in [0, 2)");
    // At N = 2^{n+1} - 1: f = e log2 n with e = (1 - alpha/2) 2^n / n.
    auto exponent = [a = alpha.to_rational()](unsigned n) {
        mpq_class e = (mpq_class(1) - a / 2) * mpq_class(mpz_class(1) << n, n);
        e.canonicalize();
        return e;
    };
    GapFunction g;
    g.description = "(1 - " + alpha.fraction() + "/2)(2^n/n) log2 n at N = 2^{n+1}-1, f(m) = m elsewhere";
    g.below = [exponent](const mpz_class& count, std::size_t m) {
        if (count == 0) return true;
        const unsigned n = mcsp_level(m);
        if (n == 0) return false;  // f(m) = m leaves room only for the empty level
        // count < 2^{m - e log2 n}  <=>  count^q n^p < 2^{m q}
        const mpq_class e = exponent(n);
        const unsigned long p = e.get_num().get_ui(), q = e.get_den().get_ui();
        mpz_class lhs, np, rhs;
        mpz_pow_ui(lhs.get_mpz_t(), count.get_mpz_t(), q);
        mpz_ui_pow_ui(np.get_mpz_t(), n, p);
        mpz_ui_pow_ui(rhs.get_mpz_t(), 2, m * q);
        return lhs * np < rhs;
    };
    g.floor_value = [exponent](std::size_t m) -> long {
        const unsigned n = mcsp_level(m);
        if (n == 0) return static_cast<long>(m);
        // Largest k with 2^k <= n^e, i.e. 2^{kq} <= n^p.
        const mpq_class e = exponent(n);
        const unsigned long p = e.get_num().get_ui(), q = e.get_den().get_ui();
        mpz_class np;
        mpz_ui_pow_ui(np.get_mpz_t(), n, p);
        long k = 0;
        while (mpz_class(1) << static_cast<mp_bitcnt_t>((k + 1) * q) <= np) ++k;
        return k;
    };
    g.show = [exponent](std::size_t m) {
        const unsigned n = mcsp_level(m);
        if (n == 0) return std::to_string(m);
        std::ostringstream os;
        os << exponent(n).get_d() * std::log2(static_cast<double>(n));
        return os.str();
    };
    return g;
}

GapFunction mcsp_linear_gap() {
    return dyadic_gap("n - 2 at N = 2^{n+1}-1, f(m) = m elsewhere", [](std::size_t m) {
        const unsigned n = mcsp_level(m);
        return n == 0 ? Dyadic(static_cast<long>(m)) : Dyadic(static_cast<long>(n) - 2);
    });
}

ConvergenceModulus mcsp_linear_modulus() {
    return ConvergenceModulus{"m(i) = 2^{i+5} - 1", [](const BitString&, unsigned i) {
                                  if (i > 40) throw CapExceeded("modulus index too large");
                                  return (std::size_t{1} << (i + 5)) - 1;
                              }};
}

// --- Certificates -----------------------------------------------------------------

EntropyCertificate mc_certificate(const LanguageFamily& A, const GapFunction& f, const ConvergenceModulus& modulus,
                                  std::size_t H, const CertificateOptions& opts) {
    EntropyCertificate cert;
    cert.family = A.name;
    cert.gap = f.description;
    cert.modulus = modulus.description;
    cert.horizon = H;
    auto fail = [&cert](std::size_t level, std::string what) {
        if (cert.failing_condition.empty()) {
            cert.failing_level = level;
            cert.failing_condition = std::move(what);
        }
    };

    for (std::size_t n = 1; n <= H; ++n) {
        LevelVerdict v;
        v.n = n;
        v.count = A.count(n);
        v.f = f.show(n);
        v.holds = f.below(v.count, n);
        if (!v.holds) fail(n, "condition 2: |A_{=n}| >= 2^{n - f(n)}");
        cert.levels.push_back(std::move(v));
    }

    std::vector<unsigned> indices = opts.tail_indices;
    std::mt19937_64 rng(opts.seed);
    for (std::size_t k = 0; k < opts.random_tail_audits; ++k) indices.push_back(static_cast<unsigned>(rng() % 13));
    for (unsigned i : indices) {
        TailVerdict t;
        t.i = i;
        t.m = modulus.m(BitString{}, i);
        // The window reaches well past the modulus so sparse heavy levels are included.
        const std::size_t end = std::min<std::size_t>(4 * (t.m + 1), t.m + (std::size_t{1} << 16));
        for (std::size_t n = t.m + 1; n <= end; ++n) t.tail += Dyadic::pow2(-f.floor_value(n));
        t.holds = t.tail <= Dyadic::pow2(-static_cast<long>(i));
        t.beyond_horizon = t.m >= H;
        if (!t.holds) fail(t.m + 1, "condition 3: tail past m(" + std::to_string(i) + ") exceeds 2^-" + std::to_string(i));
        cert.tails.push_back(std::move(t));
    }

    for (const auto& S : opts.witnesses) {
        WitnessVerdict w;
        w.sequence = S;
        for (std::size_t n = 1; n <= std::min(H, S.size()); ++n) {
            if (A.member(S.prefix(n))) {
                w.level = n;
                break;
            }
        }
        if (!w.level) fail(0, "condition 1: witness " + S.display() + " has no prefix in A up to the horizon");
        cert.witnesses.push_back(std::move(w));
    }
    cert.valid = cert.failing_condition.empty();
    return cert;
}

std::string EntropyCertificate::report() const {
    std::ostringstream os;
    os << "certificate family=" << family << "\n";
    os << "gap f: " << gap << "\n";
    os << "modulus: " << modulus << "\n";
    os << "horizon: " << horizon << "\n";
    os << "verdict: " << (valid ? "VALID" : "INVALID");
    if (!valid) os << " at level " << (failing_level ? std::to_string(*failing_level) : "?") << " (" << failing_condition << ")";
    os << "\n[condition 1: " << condition1_label << " " << witnesses.size() << " witness sequence(s)]\n";
    for (const auto& w : witnesses)
        os << "  " << w.sequence.display() << " -> " << (w.level ? "prefix in A at n=" + std::to_string(*w.level) : "MISS")
           << "\n";
    os << "[condition 2: |A_{=n}| < 2^{n - f(n)}]\n";
    for (const auto& v : levels)
        if (v.count != 0 || !v.holds)
            os << "  n=" << v.n << " count=" << v.count.get_str() << " f=" << v.f << " " << (v.holds ? "ok" : "FAIL")
               << "\n";
    os << "  (levels with |A_{=n}| = 0 hold trivially and are omitted)\n";
    os << "[condition 3: tail of sum 2^{-floor f(n)} past m(i) <= 2^-i]\n";
    for (const auto& t : tails)
        os << "  i=" << t.i << " m=" << t.m << " tail~" << t.tail.to_double() << " " << (t.holds ? "ok" : "FAIL")
           << (t.beyond_horizon ? " (past horizon)" : "") << "\n";
    return os.str();
}

// --- Bridge -------------------------------------------------------------------------

BridgeReport entropy_bridge(const EntropyCertificate& cert, const LanguageFamily& A, const GapFunction& f) {
    if (!cert.valid) throw std::invalid_argument("bridge needs a valid certificate (" + cert.failing_condition + ")");
    const std::size_t H = cert.horizon;
    BridgeReport rep;
    std::vector<mpz_class> counts(H + 1);
    for (std::size_t n = 1; n <= H; ++n) {
        counts[n] = A.count(n);
        if (counts[n] != 0) rep.cover_levels.push_back(n);
    }
    auto level = A.level;
    MartingaleFamily fam(
        "cover(" + A.name + ")",
        [level, counts](std::size_t n) {
            if (counts[n] == 0) return constant_martingale(Dyadic(0));
            return cover_martingale(level(n));
        },
        [f](std::size_t n) { return Dyadic::pow2(-f.floor_value(n)); }, 1, H);

    for (std::size_t n : rep.cover_levels) {
        const Dyadic cap = fam.at(n).initial_capital;
        const Dyadic scaled = cap.scaled(static_cast<long>(n));
        if (!scaled.is_integer() || scaled.numerator() != counts[n] || !f.below(scaled.numerator(), n))
            rep.capital_failures.push_back("n=" + std::to_string(n) + ", d_n(λ)=" + cap.fraction());
    }

    ConvergenceModulus finite{"finite family, m = " + std::to_string(H),
                              [H](const BitString&, unsigned) { return H; }};
    Martingale agg = borel_cantelli_measure(fam, finite);
    rep.aggregate_capital = agg.initial_capital;

    // Same sum as agg.value(x), regrouped: members frozen at depth <= P only see
    // x↾P, so their part is computed once per distinct prefix.
    std::mt19937_64 rng(0x5eed);
    for (std::size_t n : rep.cover_levels) {
        std::size_t P = 0;
        std::vector<std::size_t> shallow, deep;
        for (std::size_t m = 1; m <= H; ++m) {
            const auto& fd = fam.at(m).freeze_depth;
            if (fd && *fd < n) P = std::max(P, *fd);
        }
        for (std::size_t m = 1; m <= H; ++m) {
            const auto& fd = fam.at(m).freeze_depth;
            (fd && *fd <= P ? shallow : deep).push_back(m);
        }
        BitString last_prefix("");
        Dyadic head_part;
        bool have_head = false;
        const std::uint64_t expected = counts[n].fits_ulong_p() ? counts[n].get_ui() : 0;
        A.for_each(n, [&](const BitString& x) {
            ++rep.elements_checked;
            const BitString prefix = x.prefix(P);
            if (!have_head || prefix != last_prefix) {
                head_part = Dyadic(0);
                for (std::size_t m : shallow) head_part += fam.at(m).value(prefix);
                last_prefix = prefix;
                have_head = true;
            }
            Dyadic v = head_part;
            for (std::size_t m : deep) v += fam.at(m).value(x);
            if (expected <= kBridgeFullAggregateLimit || rng() % kBridgeSampleEvery == 0) {
                ++rep.aggregate_crosschecks;
                if (agg.value(x) != v && rep.element_failures.size() < 16)
                    rep.element_failures.push_back("x=" + x.str() + ": regrouped sum differs from the aggregate");
            }
            if (v < Dyadic(1) && rep.element_failures.size() < 16)
                rep.element_failures.push_back("x=" + x.str() + ", d=" + v.fraction());
        });
    }
    return rep;
}

}  // namespace cmlab
