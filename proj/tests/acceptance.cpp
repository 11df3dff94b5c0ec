// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmlab/circuits.hpp"
#include "cmlab/combinators.hpp"
#include "cmlab/constructions.hpp"
#include "cmlab/entropy.hpp"
#include "cmlab/figures.hpp"
#include "cmlab/kolmogorov.hpp"
#include "cmlab/martingale.hpp"

using namespace cmlab;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Collects the first few failure messages of a criterion.
class Tally {
public:
    void require(bool ok, const std::string& what) {
        ++checks_;
        if (ok) return;
        ++failures_;
        if (failures_ <= 5) msgs_ << (failures_ > 1 ? "; " : "") << what;
    }
    std::uint64_t checks() const { return checks_; }
    Outcome done(const std::string& summary) const {
        Outcome o;
        o.pass = failures_ == 0;
        o.detail = summary + ", " + std::to_string(checks_) + " checks";
        if (failures_) o.detail += ", " + std::to_string(failures_) + " failed: " + msgs_.str();
        return o;
    }

private:
    std::uint64_t checks_ = 0, failures_ = 0;
    std::ostringstream msgs_;
};

// ---------------------------------------------------------------------------
// Random instances of the five constructions.

std::vector<BitString> random_subset(std::mt19937_64& rng, std::size_t n, unsigned num, unsigned den) {
    std::vector<BitString> out;
    for (auto& x : all_strings(n))
        if (rng() % den < num) out.push_back(x);
    return out;
}

LanguageView random_language(std::mt19937_64& rng, std::uint64_t span, std::uint64_t horizon) {
    std::vector<std::uint64_t> idx;
    for (std::uint64_t i = 0; i < span; ++i)
        if (rng() & 1u) idx.push_back(i);
    return LanguageView::from_indices(idx, horizon);
}

struct RandomAcceptance {
    AcceptanceSpec spec;
    std::shared_ptr<std::vector<std::size_t>> q;  // by length
    std::shared_ptr<std::vector<mpz_class>> f1;   // by string index
};

RandomAcceptance random_acceptance(std::mt19937_64& rng, std::size_t depth) {
    RandomAcceptance r;
    r.q = std::make_shared<std::vector<std::size_t>>();
    for (std::size_t len = 0; len <= 8; ++len) r.q->push_back(rng() % 4);
    r.f1 = std::make_shared<std::vector<mpz_class>>();
    for (std::size_t i = 0; i < depth; ++i) {
        const std::size_t full = std::size_t{1} << (*r.q)[length_of_index(i)];
        r.f1->push_back(mpz_class(static_cast<unsigned long>(rng() % (full + 1))));
    }
    auto q = r.q;
    auto f1 = r.f1;
    r.spec.q = [q](std::size_t len) { return (*q)[len]; };
    r.spec.f = [q, f1](const BitString& x, int b) {
        const mpz_class& one = (*f1)[index_of(x)];
        if (b == 1) return one;
        return mpz_class((mpz_class(1) << static_cast<mp_bitcnt_t>((*q)[x.size()])) - one);
    };
    r.spec.name = "random acceptance";
    return r;
}

// An approximator inside the (1 +- 1/n) band, fixed per node.
Approximator band_approximator(const CountingRepresentation& rep, std::uint64_t seed) {
    const std::size_t n = rep.n;
    return [rep, seed, n](const BitString& v) {
        std::mt19937_64 g(seed ^ (index_of(v) * 0x9e3779b97f4a7c15ULL));
        const long u = static_cast<long>(g() % 129) - 64;  // in [-64, 64]
        mpq_class k = 1 + mpq_class(u, 64 * static_cast<long>(n));
        k.canonicalize();
        mpq_class out = mpq_class(rep.f(v)) * k;
        out.canonicalize();
        return out;
    };
}

CountingRepresentation cover_representation(const Martingale& d, std::size_t n) {
    return leveled_representation(n, [d, n](const BitString& w) {
        return mpz_class(d.value(w).scaled(static_cast<long>(n - std::min(n, w.size()))).to_rational());
    });
}

Martingale random_instance(std::mt19937_64& rng, int kind, std::size_t& depth) {
    switch (kind) {
        case 0: {
            const std::size_t n = 1 + rng() % 6;
            depth = n + 3;
            return cover_martingale(cover_from_set(n, random_subset(rng, n, 1, 3)));
        }
        case 1: {
            const std::size_t n = 1 + rng() % 6;
            depth = n + 3;
            auto vals = std::make_shared<std::vector<std::int64_t>>();
            for (std::size_t i = 0; i < (std::size_t{1} << n); ++i) vals->push_back(static_cast<std::int64_t>(rng() % 9));
            return condexp_martingale([vals](const BitString& x) { return (*vals)[x.to_uint()]; }, n);
        }
        case 2: {
            const std::size_t n = 1 + rng() % 6;
            depth = n + 3;
            return subset_martingale(random_language(rng, n, 64), n);
        }
        case 3: {
            return acceptance_martingale(random_acceptance(rng, depth).spec);
        }
        case 4: {
            return biimmunity_martingale(random_language(rng, 16, 1u << 20));
        }
        default: {
            const std::size_t n = 2 + rng() % 5;
            depth = n + 2;
            Martingale d = cover_martingale(cover_from_set(n, random_subset(rng, n, 1, 2)));
            auto rep = cover_representation(d, n);
            return approx_supermartingale(rep, band_approximator(rep, rng()));
        }
    }
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
    Tally t;
    const char* roots[] = {"5/16", "7/8", "1/4", "1", "1"};
    for (int id = 1; id <= 5; ++id) {
        auto f = figures::figure(id);
        auto mm = figures::compare(f);
        t.require(mm.empty(), "figure " + std::to_string(id) + " differs at '" + (mm.empty() ? "" : mm[0].node) + "'");
        t.require(f.golden.size() == 31, "figure " + std::to_string(id) + " golden table incomplete");
        t.require(f.martingale.initial_capital.fraction() == roots[id - 1],
                  "figure " + std::to_string(id) + " root " + f.martingale.initial_capital.fraction());
    }
    return t.done("5 figures, 31 nodes each");
}

Outcome criterion2() {
    Tally t;
    std::mt19937_64 rng(2024);
    std::uint64_t nodes = 0, super = 0;
    for (int i = 0; i < 10000; ++i) {
        const int kind = i % 6;
        // Acceptance and bi-immunity: depth 12 on every 5th instance, 8 otherwise.
        // Level-n kinds pick n + 3 themselves.
        std::size_t depth = (i / 6) % 5 == 0 ? 12 : 8;
        Martingale m = random_instance(rng, kind, depth);
        auto rep = verify_averaging(m, depth);
        nodes += rep.nodes_checked;
        super += rep.supermartingale;
        t.require(rep.pass(), "instance " + std::to_string(i) + " (" + m.name + ") violates averaging at '" +
                                  (rep.pass() ? "" : rep.violations[0].node.display()) + "'");
    }
    return t.done("10000 instances, " + std::to_string(super) + " supermartingale transforms, " +
                  std::to_string(nodes) + " nodes");
}

Outcome criterion3() {
    Tally t;
    std::mt19937_64 rng(33);
    for (std::size_t n = 1; n <= 6; ++n) {
        for (int trial = 0; trial < 20; ++trial) {
            // Cover: capital and identity with the conditional expectation of the indicator.
            auto members = random_subset(rng, n, 1 + rng() % 3, 4);
            Martingale cov = cover_martingale(cover_from_set(n, members));
            t.require(cov.initial_capital == Dyadic::make(static_cast<long>(members.size()), n), "cover capital");
            std::vector<std::int64_t> ind(std::size_t{1} << n, 0);
            for (auto& x : members) ind[x.to_uint()] = 1;
            Martingale ce_ind = condexp_martingale([&ind](const BitString& x) { return ind[x.to_uint()]; }, n);
            for (std::size_t k = 0; k <= n; ++k)
                for (auto& w : all_strings(k)) t.require(cov.value(w) == ce_ind.value(w), "cover != condexp(1_A)");

            // Conditional expectation leaf law.
            std::vector<std::int64_t> vals(std::size_t{1} << n);
            for (auto& v : vals) v = static_cast<std::int64_t>(rng() % 11);
            Martingale ce = condexp_martingale([&vals](const BitString& x) { return vals[x.to_uint()]; }, n);
            for (auto& x : all_strings(n)) t.require(ce.value(x) == Dyadic(vals[x.to_uint()]), "condexp leaf law");

            // Subset: capital and the number of value-1 leaves.
            LanguageView B = random_language(rng, n, 64);
            Martingale sub = subset_martingale(B, n);
            const auto c = census(B, n);
            t.require(sub.initial_capital == Dyadic::pow2(static_cast<long>(c) - static_cast<long>(n)), "subset capital");
            std::uint64_t ones = 0;
            for (auto& w : all_strings(n)) ones += sub.value(w) == Dyadic(1);
            t.require(ones == (std::uint64_t{1} << c), "subset leaf-1 count");

            // Bi-immunity value law.
            LanguageView A = random_language(rng, 8, 64);
            Martingale bi = biimmunity_martingale(A);
            for (std::size_t k = 0; k <= n; ++k) {
                for (auto& w : all_strings(k)) {
                    bool inside = true;
                    long hits = 0;
                    for (std::size_t i = 0; i < k; ++i) {
                        if (!A.contains(string_index(i))) continue;
                        ++hits;
                        inside = inside && w[i];
                    }
                    t.require(bi.value(w) == (inside ? Dyadic::pow2(hits) : Dyadic(0)), "bi-immunity value law");
                }
            }

            // Acceptance product law, recomputed in rationals.
            RandomAcceptance ra = random_acceptance(rng, n);
            Martingale acc = acceptance_martingale(ra.spec);
            for (std::size_t k = 0; k <= n; ++k) {
                for (auto& w : all_strings(k)) {
                    mpq_class prod = 1;
                    for (std::size_t i = 0; i < k; ++i) {
                        const std::size_t q = (*ra.q)[length_of_index(i)];
                        const mpz_class& f1 = (*ra.f1)[i];
                        const mpz_class full = mpz_class(1) << static_cast<mp_bitcnt_t>(q);
                        prod *= mpq_class(2 * (w[i] ? f1 : mpz_class(full - f1)), full);
                        prod.canonicalize();
                    }
                    t.require(acc.value(w).to_rational() == prod, "acceptance product law");
                }
            }
        }
    }
    // Acceptance growth on the characteristic prefix with p(k) = 2k.
    LanguageView target = figures::reference_language(1u << 20);
    AcceptanceSpec grow = AcceptanceSpec::bounded_error(
        target, [](std::size_t k) { return mpz_class((mpz_class(1) << static_cast<mp_bitcnt_t>(2 * k)) - 1); },
        [](std::size_t k) { return 2 * k; });
    Martingale g = acceptance_martingale(grow);
    const BitString A12 = char_prefix(target, 12);
    mpq_class bound = 1;
    for (std::size_t i = 0; i <= 12; ++i) {
        t.require(g.value(A12.prefix(i)).to_rational() >= bound, "acceptance growth bound");
        if (i == 12) break;
        const std::size_t len = string_index(i).size();
        bound *= 2 * (1 - mpq_class(1, mpz_class(mpz_class(1) << static_cast<mp_bitcnt_t>(2 * len))));
        bound.canonicalize();
    }
    return t.done("n = 1..6, 20 random specs per construction and level");
}

// Independent closed forms for the summation check.
mpq_class geometric_sum(long k) { return mpq_class(1, mpz_class((mpz_class(1) << static_cast<mp_bitcnt_t>(k)) - 1)); }

// Sum over n >= 1 of the 1^{ceil(n/2)}-prefix covers at w: each prefix length k
// serves two levels; k <= |w| contributes 1 when w starts with 1^k, k > |w|
// contributes 2^{|w|-k} when w is all ones.
mpq_class half_prefix_sum(const BitString& w) {
    std::size_t j = 0;
    while (j < w.size() && w[j]) ++j;
    return mpq_class(static_cast<long>(2 * j + (j == w.size() ? 2 : 0)));
}

Outcome criterion4() {
    Tally t;
    std::mt19937_64 rng(44);
    std::vector<std::pair<std::string, MartingaleFamily>> fams;
    std::vector<ConvergenceModulus> mods;
    std::vector<std::function<mpq_class(const BitString&)>> truth;
    for (long k : {1L, 2L, 3L}) {
        fams.emplace_back("geometric k=" + std::to_string(k),
                          MartingaleFamily(
                              "2^-" + std::to_string(k) + "n",
                              [k](std::size_t n) { return constant_martingale(Dyadic::pow2(-k * static_cast<long>(n))); },
                              [k](std::size_t n) { return Dyadic::pow2(-k * static_cast<long>(n)); }, 1, std::nullopt));
        mods.push_back({"ceil(i/k)", [k](const BitString&, unsigned i) {
                            return std::max<std::size_t>(1, static_cast<std::size_t>((i + k - 1) / k));
                        }});
        truth.push_back([k](const BitString&) { return geometric_sum(k); });
    }
    // 2^{-f(n)} covers with f(n) = ceil(n/2).
    fams.emplace_back(
        "prefix cover f(n)=ceil(n/2)",
        MartingaleFamily(
            "1^ceil(n/2)",
            [](std::size_t n) {
                const std::size_t k = (n + 1) / 2;
                CoverSpec spec = cover_from_set(0, {});
                spec.n = n;
                spec.member = [k](const BitString& x) { return x.prefix(k) == BitString::ones(k); };
                spec.counter = ExtensionCounter{n, [n, k](const BitString& w) {
                                                    const std::size_t m = std::min(w.size(), k);
                                                    if (w.prefix(m) != BitString::ones(m)) return mpz_class(0);
                                                    return mpz_class(mpz_class(1) << static_cast<mp_bitcnt_t>(
                                                                         n - std::max(w.size(), k)));
                                                }};
                return cover_martingale(spec);
            },
            [](std::size_t n) { return Dyadic::pow2(-static_cast<long>((n + 1) / 2)); }, 1, std::nullopt));
    // Past M the tail at w is at most 2^{|w|+2-M/2}.
    mods.push_back({"2(|w| + i + 3)", [](const BitString& w, unsigned i) { return 2 * (w.size() + i + 3); }});
    truth.push_back(half_prefix_sum);

    std::size_t queries = 0;
    for (std::size_t f = 0; f < fams.size(); ++f) {
        for (int s = 0; s < 100; ++s) {
            const std::size_t len = rng() % 13;
            BitString w = BitString::from_uint(rng() & ((std::uint64_t{1} << len) - 1), len);
            if (f == 3 && s % 3 == 0) w = BitString::ones(len);  // exercise the all-ones branch
            const mpq_class exact = truth[f](w);
            for (unsigned r = 0; r <= 20; ++r) {
                ++queries;
                Dyadic approx;
                try {
                    approx = sum_family(fams[f].second, mods[f], w, r);
                } catch (const ModulusFailure& e) {
                    t.require(false, e.what());
                    continue;
                }
                mpq_class err = exact - approx.to_rational();
                if (err < 0) err = -err;
                t.require(err <= Dyadic::pow2(-static_cast<long>(r)).to_rational(),
                          fams[f].first + " at w='" + w.display() + "', r=" + std::to_string(r));
            }
        }
    }
    return t.done(std::to_string(fams.size()) + " families, " + std::to_string(queries) + " queries, r = 0..20");
}

Outcome criterion5() {
    Tally t;
    std::mt19937_64 rng(55);
    std::uint64_t leaves = 0, covered = 0;
    for (Dyadic s : {Dyadic::make(1, 2), Dyadic::make(1, 1), Dyadic::make(3, 2)}) {
        for (int rep = 0; rep < 3; ++rep) {
            // |A_n| = 2^{floor(sn)} random strings of length n, so d_n(λ) <= 2^{(s-1)n}.
            auto sn = [s](std::size_t n) { return (s * Dyadic(static_cast<long>(n))).floor().get_si(); };
            auto sets = std::make_shared<std::vector<std::vector<BitString>>>(13);
            for (std::size_t n = 1; n <= 12; ++n) {
                std::vector<BitString> all = all_strings(n);
                std::shuffle(all.begin(), all.end(), rng);
                all.resize(std::size_t{1} << sn(n));
                (*sets)[n] = all;
            }
            MartingaleFamily fam(
                "random covers", [sets](std::size_t n) { return cover_martingale(cover_from_set(n, (*sets)[n])); },
                [sn](std::size_t n) { return Dyadic::pow2(sn(n) - static_cast<long>(n)); }, 1, std::size_t{12});
            ConvergenceModulus finite{"12", [](const BitString&, unsigned) { return std::size_t{12}; }};
            Martingale agg = borel_cantelli_measure(fam, finite);
            auto mg = check_measure_guarantee(fam, agg);
            leaves += mg.leaves_checked;
            covered += mg.covered;
            t.require(mg.pass(), "measure guarantee: " + (mg.pass() ? std::string() : mg.failures[0]));
            for (Dyadic tt : {s + Dyadic::make(1, 3), s + Dyadic::make(1, 1)}) {
                if (tt > Dyadic(1)) continue;
                Martingale dagg = borel_cantelli_dimension(fam, s, tt);
                auto dg = check_dimension_guarantee(fam, dagg, tt);
                t.require(dg.pass(), "dimension guarantee t=" + tt.fraction() + ": " +
                                         (dg.pass() ? std::string() : dg.failures[0]));
            }
        }
    }
    t.require(covered > 0, "no covered leaves");
    return t.done("s in {1/4, 1/2, 3/4}, n <= 12, " + std::to_string(leaves) + " leaves, " + std::to_string(covered) +
                  " covered");
}

Outcome criterion6() {
    Tally t;
    std::mt19937_64 rng(66);
    for (int i = 0; i < 100; ++i) {
        std::size_t depth = 16;
        Martingale m = random_instance(rng, i % 5, depth);
        auto d = diagonalize(m, 16);
        t.require(d.trace.size() == 17 && d.trace[0] == m.initial_capital, "trace must start at the capital");
        for (std::size_t k = 1; k < d.trace.size(); ++k) {
            t.require(d.trace[k] <= d.trace[k - 1], "trace increases at step " + std::to_string(k) + " of " + m.name);
            t.require(d.trace[k] <= m.initial_capital, "trace exceeds the capital");
            t.require(d.trace[k] == m.value(d.prefix.prefix(k)), "trace disagrees with the martingale");
        }
    }
    return t.done("100 random martingales, 16 diagonal steps");
}

// Level-n cover of strings whose first n/2 bits are zero, with closed-form counts.
Martingale low_prefix_cover(std::size_t n, std::size_t k) {
    CoverSpec spec = cover_from_set(0, {});
    spec.n = n;
    spec.member = [k](const BitString& x) { return x.prefix(k).count_ones() == 0; };
    spec.counter = ExtensionCounter{n, [n, k](const BitString& w) {
                                        const std::size_t m = std::min(w.size(), k);
                                        if (w.prefix(m).count_ones() != 0) return mpz_class(0);
                                        return mpz_class(mpz_class(1) << static_cast<mp_bitcnt_t>(
                                                             n - std::max(w.size(), k)));
                                    }};
    return cover_martingale(spec);
}

Outcome criterion7() {
    Tally t;
    std::mt19937_64 rng(77);
    for (std::size_t n = 2; n <= 32; ++n) {
        Martingale d = n <= 8 ? cover_martingale(cover_from_set(n, random_subset(rng, n, 1, 2)))
                              : low_prefix_cover(n, n / 2);
        auto rep = cover_representation(d, n);
        Martingale sup = approx_supermartingale(rep, band_approximator(rep, rng()));
        const mpq_class gamma = gamma_factor(n);
        if (n <= 10) {
            auto av = verify_averaging(sup, n + 1);
            t.require(av.pass(), "supermartingale law at n = " + std::to_string(n));
            for (auto& v : all_strings(n))
                t.require(sup.rational_value(v) >= gamma * d.value(v).to_rational(),
                          "gamma bound at n = " + std::to_string(n));
        } else {
            auto av = verify_averaging_sampled(sup, n + 1, 64, rng());
            t.require(av.pass(), "sampled supermartingale law at n = " + std::to_string(n));
            for (int s = 0; s < 256; ++s) {
                BitString v = BitString::from_uint(rng() & ((std::uint64_t{1} << n) - 1), n);
                if (s % 2 == 0) v = BitString::zeros(n / 2) + v.suffix_from(n / 2);  // land inside the cover
                t.require(sup.rational_value(v) >= gamma * d.value(v).to_rational(),
                          "gamma bound at n = " + std::to_string(n));
            }
        }
        if (n > 2) t.require(gamma_factor(n) > gamma_factor(n - 1), "gamma not increasing at " + std::to_string(n));
        t.require(shrink_factor(n) < mpq_class(135335284, 1000000000), "rho above e^-2");
    }
    t.require(shrink_factor(2) == mpq_class(1, 9), "rho_2 = 1/9");
    t.require(gamma_factor(2) == mpq_class(1, 18), "gamma_2 = 1/18");
    t.require(gamma_factor(32) > mpq_class(1, 9), "gamma_32 > 1/9");
    t.require(gamma_factor(32) > gamma_factor(2), "gamma_32 > gamma_2");
    return t.done("n = 2..32, exhaustive for n <= 10, sampled above; gamma_32 = " +
                  std::to_string(gamma_factor(32).get_d()));
}

Outcome criterion8(const std::string& cache_dir) {
    Tally t;
    CircuitCensus c2 = load_or_build_census(2, 6, cache_dir);
    auto oracle = dag_enumeration_minima(2, 6);
    for (std::uint32_t bits = 0; bits < 16; ++bits) {
        auto m = c2.min_size(TruthTable{2, bits});
        t.require(m && static_cast<int>(*m) == oracle[bits], "n = 2 census differs from DAG enumeration");
    }
    for (unsigned n = 3; n <= 4; ++n) {
        CircuitCensus a = build_census(n, 8), b = build_census(n, 8);
        t.require(a == b, "census not deterministic at n = " + std::to_string(n));
        for (unsigned S = 1; S < 8; ++S) {
            CircuitCensus small = build_census(n, S);
            t.require(small.reachable() <= a.reachable(), "reachable not monotone in S");
            for (unsigned s = 0; s <= S; ++s)
                t.require(small.count_at_most(s) == a.count_at_most(s), "count_at_most depends on S");
        }
        t.require(load_or_build_census(n, 8, cache_dir) == a, "cached census differs at n = " + std::to_string(n));
    }
    std::ostringstream reports;
    for (unsigned n = 2; n <= 4; ++n) {
        CircuitCensus c = load_or_build_census(n, 8, cache_dir);
        for (Dyadic alpha : {Dyadic(0), Dyadic::make(1, 1)}) {
            MnpReport r = mnp_cover_check(n, alpha, c);
            t.require(r.table_count == c.count_at_most(r.s_floor), "MNP table count");
            t.require(r.cover_size == (mpz_class(static_cast<unsigned long>(r.table_count))
                                       << static_cast<mp_bitcnt_t>(r.N - (1u << n))),
                      "MNP cover size");
            t.require(r.counting_bound_holds, "counting bound at n = " + std::to_string(n));
            reports << " [n=" << n << " a=" << alpha.fraction() << " s=" << r.s_floor << " tables=" << r.table_count
                    << " gap=" << (r.entropy_gap_holds ? "holds" : "fails") << "]";
        }
    }
    return t.done("oracle match at n = 2, determinism and S-monotonicity at n = 3, 4; MNP" + reports.str());
}

Outcome criterion9(const std::string& cache_dir) {
    Tally t;
    const Budget base{};
    const Budget wide{2, 2, 32};
    const Budget pairing = pairing_budget(base);
    const std::size_t L = 10;
    KtTable tb = load_or_build_kt_table(L, base, cache_dir);
    KtTable tw = load_or_build_kt_table(L, wide, cache_dir);
    KtTable tp = load_or_build_kt_table(L, pairing, cache_dir);
    t.require(tb.literal_bound_holds() && tw.literal_bound_holds() && tp.literal_bound_holds(), "literal bound");
    std::uint64_t pairs = 0;
    for (std::size_t n = 0; n <= L; ++n) {
        for (auto& x : all_strings(n)) {
            t.require(*tw.at(x) <= *tb.at(x), "budget monotonicity at '" + x.display() + "'");
            t.require(*tp.at(x) <= *tb.at(x), "pairing budget monotonicity at '" + x.display() + "'");
        }
    }
    // K^{t'}(xy) <= K^t(x) + K^t(y) + 2 floor(log2 K^t(x)) + c_pair.
    for (std::size_t a = 1; a <= L; ++a) {
        for (std::size_t b = 0; a + b <= L; ++b) {
            for (auto& x : all_strings(a)) {
                const std::size_t kx = *tb.at(x);
                const std::size_t lg = static_cast<std::size_t>(std::bit_width(kx) - 1);
                for (auto& y : all_strings(b)) {
                    ++pairs;
                    const std::size_t bound = kx + *tb.at(y) + 2 * lg + machine::kPairOverhead;
                    t.require(*tp.at(x + y) <= bound, "pairing at '" + x.display() + "','" + y.display() + "'");
                }
            }
        }
    }
    // Cover martingale: capital bound and leaf law.
    std::uint64_t leaves = 0;
    for (std::size_t n = 1; n <= L; ++n) {
        for (long f : {-1L, 0L, 1L, 2L}) {
            if (static_cast<long>(n) - f < 1) continue;
            Martingale d = kt_cover_martingale(n, [f](std::size_t) { return f; }, base);
            t.require(d.initial_capital <= Dyadic::pow2(-f), "capital bound at n = " + std::to_string(n));
            for (auto& x : all_strings(n)) {
                ++leaves;
                const bool short_prog = static_cast<long>(*tb.at(x)) < static_cast<long>(n) - f;
                t.require((d.value(x) >= Dyadic(1)) == short_prog,
                          "leaf law at '" + x.display() + "', f = " + std::to_string(f));
            }
        }
    }
    return t.done("L = 10, " + std::to_string(pairs) + " pairs, " + std::to_string(leaves) + " cover leaves");
}

Outcome criterion10(const std::string& cache_dir) {
    Tally t;
    std::vector<McspCover> covers;
    for (unsigned n = 2; n <= 4; ++n)
        covers.push_back(mcsp_cover(load_or_build_census(n, 8, cache_dir), size_bound_floor(n, Dyadic(0))));
    LanguageFamily A = mcsp_family(covers);
    GapFunction f = mcsp_linear_gap();
    const std::size_t H = 31;
    EntropyCertificate cert = mc_certificate(A, f, mcsp_linear_modulus(), H);
    t.require(cert.valid, "certificate invalid: " + cert.failing_condition);
    if (!cert.valid) return t.done("no bridge");
    BridgeReport br = entropy_bridge(cert, A, f);
    t.require(br.capital_failures.empty(), "capital failures");
    t.require(br.element_failures.empty(),
              "element failures: " + (br.element_failures.empty() ? std::string() : br.element_failures[0]));
    mpz_class total = 0;
    for (auto& c : covers) total += c.size();
    t.require(total == br.elements_checked, "not every cover element was visited");
    return t.done("n = 2..4, levels 7/15/31, " + std::to_string(br.elements_checked) + " elements, " +
                  std::to_string(br.aggregate_crosschecks) + " through the aggregate, d(λ) = " +
                  br.aggregate_capital.fraction());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::string cache_dir;
    app.add_option("--cache-dir", cache_dir, "census and K^t cache directory");
    CLI11_PARSE(app, argc, argv);

    struct Criterion {
        int id;
        const char* name;
        double limit_s;  // 0 = no limit
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "figure reproduction", 1, criterion1},
        {2, "averaging law", 30, criterion2},
        {3, "construction laws", 0, criterion3},
        {4, "summation lemma", 0, criterion4},
        {5, "borel-cantelli guarantees", 0, criterion5},
        {6, "diagonalization", 0, criterion6},
        {7, "supermartingale transform", 0, criterion7},
        {8, "circuit census", 0, [&] { return criterion8(cache_dir); }},
        {9, "kolmogorov tables", 300, [&] { return criterion9(cache_dir); }},
        {10, "entropy bridge", 120, [&] { return criterion10(cache_dir); }},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_s > 0 && secs >= c.limit_s) {
            o.pass = false;
            o.detail += "; over the " + std::to_string(static_cast<int>(c.limit_s)) + " s limit";
        }
        failed += !o.pass;
        std::printf("criterion %2d: %s  %-26s (%.2f s) %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
