#include "cmlab/martingale.hpp"

#include <random>
#include <sstream>
#include <stdexcept>

namespace cmlab {

Dyadic Martingale::value(const BitString& w) const {
    if (!exact) throw std::logic_error("martingale '" + name + "' has no exact evaluator");
    return exact(w);
}

Dyadic Martingale::value(const BitString& w, unsigned r) const {
    if (approx) return approx(w, r);
    return value(w);
}

mpq_class Martingale::rational_value(const BitString& w) const {
    if (exact) return exact(w).to_rational();
    if (rational) return rational(w);
    throw std::logic_error("martingale '" + name + "' has no exact evaluator");
}

Martingale make_martingale(std::string name, std::string counting_class,
                           std::function<Dyadic(const BitString&)> exact, std::optional<std::size_t> freeze) {
    Martingale m;
    m.name = std::move(name);
    m.counting_class = std::move(counting_class);
    if (freeze) {
        std::size_t n = *freeze;
        m.exact = [f = std::move(exact), n](const BitString& w) { return f(w.size() > n ? w.prefix(n) : w); };
    } else {
        m.exact = std::move(exact);
    }
    m.freeze_depth = freeze;
    m.approx = [e = m.exact](const BitString& w, unsigned) { return e(w); };
    m.initial_capital = m.exact(BitString{});
    return m;
}

Martingale constant_martingale(const Dyadic& c) {
    return make_martingale("constant " + c.fraction(), "P", [c](const BitString&) { return c; }, 0);
}

namespace {

int sgn_of(const Dyadic& d) { return d.sign(); }
int sgn_of(const mpq_class& q) { return sgn(q); }

template <class V>
std::string text(const V& v) {
    if constexpr (std::is_same_v<V, Dyadic>)
        return v.fraction();
    else
        return v.get_str();
}

template <class V, class Eval>
AveragingReport averaging_exhaustive(std::size_t depth, bool super, Eval eval) {
    AveragingReport rep;
    rep.depth = depth;
    rep.supermartingale = super;
    std::vector<BitString> level{BitString{}};
    std::vector<V> vals{eval(BitString{})};
    if (sgn_of(vals[0]) < 0) rep.violations.push_back({BitString{}, text(vals[0]), "", "", "negative"});
    for (std::size_t d = 0; d < depth; ++d) {
        std::vector<BitString> next;
        std::vector<V> nvals;
        next.reserve(level.size() * 2);
        nvals.reserve(level.size() * 2);
        for (std::size_t i = 0; i < level.size(); ++i) {
            BitString l = level[i].child(0), r = level[i].child(1);
            V lv = eval(l), rv = eval(r);
            ++rep.nodes_checked;
            V twice = vals[i] + vals[i];
            V sum = lv + rv;
            bool ok = super ? twice >= sum : twice == sum;
            if (!ok) rep.violations.push_back({level[i], text(vals[i]), text(lv), text(rv), "averaging"});
            if (sgn_of(lv) < 0) rep.violations.push_back({l, text(lv), "", "", "negative"});
            if (sgn_of(rv) < 0) rep.violations.push_back({r, text(rv), "", "", "negative"});
            next.push_back(std::move(l));
            next.push_back(std::move(r));
            nvals.push_back(std::move(lv));
            nvals.push_back(std::move(rv));
        }
        level = std::move(next);
        vals = std::move(nvals);
    }
    return rep;
}

template <class V, class Eval>
AveragingReport averaging_sampled(std::size_t depth, bool super, std::size_t paths, std::uint64_t seed, Eval eval) {
    AveragingReport rep;
    rep.depth = depth;
    rep.supermartingale = super;
    std::mt19937_64 rng(seed);
    for (std::size_t p = 0; p < paths; ++p) {
        BitString w;
        V v = eval(w);
        for (std::size_t d = 0; d < depth; ++d) {
            BitString l = w.child(0), r = w.child(1);
            V lv = eval(l), rv = eval(r);
            ++rep.nodes_checked;
            V twice = v + v;
            V sum = lv + rv;
            bool ok = super ? twice >= sum : twice == sum;
            if (!ok) rep.violations.push_back({w, text(v), text(lv), text(rv), "averaging"});
            if (sgn_of(lv) < 0) rep.violations.push_back({l, text(lv), "", "", "negative"});
            if (sgn_of(rv) < 0) rep.violations.push_back({r, text(rv), "", "", "negative"});
            if (rng() & 1u) {
                w = std::move(r);
                v = std::move(rv);
            } else {
                w = std::move(l);
                v = std::move(lv);
            }
        }
    }
    return rep;
}

}  // namespace

AveragingReport verify_averaging(const Martingale& m, std::size_t depth) {
    if (depth > 24) throw std::length_error("exhaustive averaging check limited to depth 24");
    if (m.has_exact())
        return averaging_exhaustive<Dyadic>(depth, m.supermartingale, [&](const BitString& w) { return m.exact(w); });
    return averaging_exhaustive<mpq_class>(depth, m.supermartingale,
                                           [&](const BitString& w) { return m.rational_value(w); });
}

AveragingReport verify_averaging_sampled(const Martingale& m, std::size_t depth, std::size_t paths,
                                         std::uint64_t seed) {
    if (m.has_exact())
        return averaging_sampled<Dyadic>(depth, m.supermartingale, paths, seed,
                                         [&](const BitString& w) { return m.exact(w); });
    return averaging_sampled<mpq_class>(depth, m.supermartingale, paths, seed,
                                        [&](const BitString& w) { return m.rational_value(w); });
}

SuccessReport success_scan(const Martingale& m, const BitString& S, const Dyadic& s) {
    SuccessReport rep;
    rep.horizon = S.size();
    rep.s = s;
    const Dyadic one_minus_s = Dyadic(1) - s;
    for (std::size_t n = 0; n <= S.size(); ++n) {
        Dyadic v = m.value(S.prefix(n));
        if (geq_pow2(v, one_minus_s * Dyadic(static_cast<long>(n)))) rep.success_levels.push_back(n);
        if (!rep.unitary_hit && v >= Dyadic(1)) rep.unitary_hit = n;
        rep.values.push_back(std::move(v));
    }
    return rep;
}

DiagonalResult diagonalize(const Martingale& m, std::size_t N) {
    DiagonalResult res;
    res.trace.push_back(m.value(res.prefix));
    for (std::size_t k = 0; k < N; ++k) {
        Dyadic v0 = m.value(res.prefix.child(0));
        Dyadic v1 = m.value(res.prefix.child(1));
        if (v1 < v0) {
            res.prefix.push_back(1);
            res.trace.push_back(std::move(v1));
        } else {
            res.prefix.push_back(0);
            res.trace.push_back(std::move(v0));
        }
    }
    return res;
}

std::optional<Dyadic> dimension_grid_point(const Dyadic& value, std::size_t n) {
    if (n == 0) throw std::invalid_argument("dimension statistic needs n >= 1");
    if (value.sign() < 0) throw std::domain_error("negative martingale value");
    if (value.is_zero()) return std::nullopt;
    const long G = 1L << kDimensionGridBits;
    const long nn = static_cast<long>(n);
    // passes(j): value >= 2^{(1 - j/G) n}; monotone in j.
    auto passes = [&](long j) { return geq_pow2(value, Dyadic::make(mpz_class((G - j) * nn), kDimensionGridBits)); };
    long fl = floor_log2(value.to_rational());
    // 1 - log2(v)/n lies in (1 - (fl+1)/n, 1 - fl/n].
    auto fdiv = [](long a, long b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); };
    long lo = fdiv((nn - fl - 1) * G, nn) - 1;
    long hi = -fdiv(-(nn - fl) * G, nn) + 1;
    while (lo + 1 < hi) {  // invariant: !passes(lo), passes(hi)
        long mid = lo + (hi - lo) / 2;
        if (passes(mid))
            hi = mid;
        else
            lo = mid;
    }
    return Dyadic::make(mpz_class(hi), kDimensionGridBits);
}

DimensionStats empirical_dimension(const Martingale& m, const BitString& S) {
    if (S.empty()) throw std::invalid_argument("empirical_dimension needs |S| >= 1");
    DimensionStats st;
    bool any_inf = false;
    for (std::size_t n = 1; n <= S.size(); ++n) {
        auto g = dimension_grid_point(m.value(S.prefix(n)), n);
        st.per_level.push_back(g);
        if (!g) {
            any_inf = true;
            continue;
        }
        if (!st.min || *g < *st.min) st.min = g;
        if (!st.max || *g > *st.max) st.max = g;
    }
    if (any_inf) st.max = std::nullopt;  // +infinity dominates
    return st;
}

namespace {
Dyadic display_value(const Martingale& m, const BitString& w) {
    return m.has_exact() ? m.exact(w) : m.value(w, 32);
}
}  // namespace

std::vector<std::pair<BitString, Dyadic>> tree_values(const Martingale& m, std::size_t depth) {
    if (depth > 20) throw std::length_error("tree dumps limited to depth 20");
    std::vector<std::pair<BitString, Dyadic>> out;
    for (std::size_t d = 0; d <= depth; ++d)
        for (auto& w : all_strings(d)) out.emplace_back(w, display_value(m, w));
    return out;
}

std::string tree_csv(const Martingale& m, std::size_t depth) {
    std::ostringstream os;
    os << "node,value\n";
    for (auto& [w, v] : tree_values(m, depth)) os << w.display() << ',' << v.str() << '\n';
    return os.str();
}

std::string tree_dot(const Martingale& m, std::size_t depth, const std::optional<BitString>& highlight) {
    std::ostringstream os;
    os << "digraph martingale {\n  rankdir=TB;\n  ordering=out;\n  node [shape=box];\n";
    for (auto& [w, v] : tree_values(m, depth)) {
        bool fill = (w.size() == depth && v == Dyadic(1)) || (highlight && w.is_prefix_of(*highlight));
        os << "  \"n" << w.str() << "\" [label=\"" << v.fraction() << "\"" << (fill ? ", style=filled, fillcolor=green" : "")
           << "];\n";
        if (!w.empty()) {
            os << "  \"n" << w.prefix(w.size() - 1).str() << "\" -> \"n" << w.str() << "\";\n";
        }
    }
    os << "}\n";
    return os.str();
}

}  // namespace cmlab
