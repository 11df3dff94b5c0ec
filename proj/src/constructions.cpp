#include "cmlab/constructions.hpp"

#include <memory>
#include <set>

namespace cmlab {

ExtensionCounter tabulate_leaves(std::size_t n, const std::function<std::int64_t(const BitString&)>& F,
                                 std::size_t cap) {
    if (n > cap)
        throw CapExceeded("level " + std::to_string(n) + " exceeds the enumeration cap " + std::to_string(cap));
    const std::uint64_t size = std::uint64_t{1} << n;
    auto prefix = std::make_shared<std::vector<std::int64_t>>(size + 1, 0);
    BitString x = BitString::zeros(n);
    for (std::uint64_t v = 0; v < size; ++v) {
        std::int64_t fx = F(x);
        if (fx < 0) throw NegativeValue("leaf function is negative at x = '" + x.str() + "'");
        if (__builtin_add_overflow((*prefix)[v], fx, &(*prefix)[v + 1]))
            throw std::overflow_error("leaf sum overflows 64 bits");
        x.increment();
    }
    ExtensionCounter c;
    c.n = n;
    c.ext_sum = [prefix, n](const BitString& w) {
        const std::size_t rest = n - w.size();
        const std::uint64_t lo = w.to_uint() << rest;
        const std::uint64_t hi = (w.to_uint() + 1) << rest;
        return mpz_class(static_cast<long>((*prefix)[hi] - (*prefix)[lo]));
    };
    return c;
}

Martingale leveled_martingale(std::string name, std::string counting_class, ExtensionCounter counter) {
    const std::size_t n = counter.n;
    auto ext = std::move(counter.ext_sum);
    return make_martingale(
        std::move(name), std::move(counting_class),
        [ext, n](const BitString& w) { return Dyadic::make(ext(w), n - w.size()); }, n);
}

CoverSpec cover_from_set(std::size_t n, const std::vector<BitString>& members) {
    for (const auto& m : members)
        if (m.size() != n)
            throw std::invalid_argument("cover member '" + m.str() + "' does not have length " + std::to_string(n));
    auto set = std::make_shared<std::set<BitString>>(members.begin(), members.end());
    CoverSpec spec;
    spec.name = "cover(explicit)";
    spec.n = n;
    spec.member = [set](const BitString& x) { return set->count(x) > 0; };
    spec.counting_class = "#P";
    return spec;
}

CoverSpec cover_from_relation(const WitnessRelation& rel, std::size_t n, CoverMembership how, std::size_t cap) {
    CoverSpec spec;
    spec.n = n;
    spec.name = "cover(" + rel.name + ")";
    switch (how) {
        case CoverMembership::Unique:
            spec.counting_class = "#P";
            spec.member = [rel, cap](const BitString& x) { return decide_unique(rel, x, cap); };
            break;
        case CoverMembership::Nondeterministic:
            spec.counting_class = "SpanP";
            spec.member = [rel, cap](const BitString& x) { return count(rel, CountMode::WitnessCount, x, cap) > 0; };
            break;
        case CoverMembership::GapIndicator:
            spec.counting_class = "GapP";
            spec.member = [rel, cap](const BitString& x) {
                std::int64_t g = count(rel, CountMode::AcceptMinusReject, x, cap);
                if (g != 0 && g != 1)
                    throw std::domain_error("relation '" + rel.name + "' has gap " + std::to_string(g) + " on '" +
                                            x.str() + "'; an indicator gap must be 0 or 1");
                return g == 1;
            };
            break;
    }
    return spec;
}

Martingale cover_martingale(const CoverSpec& spec, std::size_t cap) {
    ExtensionCounter c = spec.counter
                             ? *spec.counter
                             : tabulate_leaves(spec.n, [m = spec.member](const BitString& x) { return std::int64_t{m(x)}; },
                                               cap);
    if (c.n != spec.n) throw std::invalid_argument("cover counter level does not match the spec");
    return leveled_martingale(spec.name, spec.counting_class, std::move(c));
}

Martingale condexp_martingale(const CountingFunction& f, std::size_t n, std::string counting_class, std::size_t cap) {
    return leveled_martingale("condexp", std::move(counting_class), tabulate_leaves(n, f, cap));
}

Martingale subset_martingale(const LanguageView& B, std::size_t n) {
    if (n > B.horizon())
        throw HorizonExceeded("subset martingale at level " + std::to_string(n) + " beyond horizon " +
                              std::to_string(B.horizon()));
    // Leaf w is in the cover iff every 1-bit of w names a member of B.
    std::vector<bool> inB(n);
    for (std::size_t i = 0; i < n; ++i) inB[i] = B.contains_index(i);
    auto leaf = [inB](const BitString& w) -> std::int64_t {
        for (std::size_t i = 0; i < w.size(); ++i)
            if (w[i] && !inB[i]) return 0;
        return 1;
    };
    // Closed form: extensions of w inside the cover number 2^{#free positions past |w|}.
    ExtensionCounter c;
    c.n = n;
    c.ext_sum = [inB, leaf, n](const BitString& w) {
        if (leaf(w) == 0) return mpz_class(0);
        std::size_t free = 0;
        for (std::size_t i = w.size(); i < n; ++i) free += inB[i];
        mpz_class r;
        mpz_setbit(r.get_mpz_t(), free);
        return r;
    };
    return leveled_martingale("subset(" + B.name() + ")", "#P", std::move(c));
}

AcceptanceSpec AcceptanceSpec::gap_form(std::function<mpz_class(const BitString&)> g,
                                        std::function<std::size_t(std::size_t)> t) {
    AcceptanceSpec s;
    s.name = "acceptance(gap)";
    s.q = t;
    s.f = [g = std::move(g), t](const BitString& x, int b) {
        mpz_class gx = g(x);
        if (b == 1) return gx;
        mpz_class full;
        mpz_setbit(full.get_mpz_t(), t(x.size()));
        return mpz_class(full - gx);
    };
    return s;
}

AcceptanceSpec AcceptanceSpec::bounded_error(const LanguageView& target, std::function<mpz_class(std::size_t)> correct,
                                             std::function<std::size_t(std::size_t)> q) {
    AcceptanceSpec s;
    s.name = "acceptance(" + target.name() + ")";
    s.q = q;
    s.f = [target, correct = std::move(correct), q](const BitString& x, int b) {
        mpz_class c = correct(x.size());
        if (b == static_cast<int>(target.contains(x))) return c;
        mpz_class full;
        mpz_setbit(full.get_mpz_t(), q(x.size()));
        return mpz_class(full - c);
    };
    return s;
}

Martingale acceptance_martingale(const AcceptanceSpec& spec) {
    auto eval = [spec](const BitString& w) {
        mpz_class num = 1;
        std::uint64_t log_den = 0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            BitString si = string_index(i);
            mpz_class f0 = spec.f(si, 0), f1 = spec.f(si, 1);
            const std::size_t qi = spec.q(si.size());
            mpz_class full;
            mpz_setbit(full.get_mpz_t(), qi);
            if (f0 + f1 != full)
                throw RowSumViolation("f(x,0) + f(x,1) = " + mpz_class(f0 + f1).get_str() + " != 2^" +
                                      std::to_string(qi) + " at x = '" + si.str() + "'");
            if (f0 < 0 || f1 < 0) throw NegativeValue("negative acceptance count at x = '" + si.str() + "'");
            num *= (w[i] ? f1 : f0);
            log_den += qi;
        }
        // 2^{|w|} * num / 2^{log_den}
        return Dyadic::make(num, log_den).scaled(static_cast<long>(w.size()));
    };
    return make_martingale(spec.name, "#P", eval);
}

Martingale biimmunity_martingale(const LanguageView& A) {
    auto eval = [A](const BitString& w) {
        Dyadic d(1);
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (!A.contains_index(i)) continue;
            if (w[i] == 0) return Dyadic(0);
            d = d.scaled(1);
        }
        return d;
    };
    return make_martingale("biimmunity(" + A.name() + ")", "#P", eval);
}

}  // namespace cmlab
