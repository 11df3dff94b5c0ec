#include <doctest.h>

#include "cmlab/combinators.hpp"
#include "cmlab/constructions.hpp"
#include "cmlab/oracle.hpp"

using namespace cmlab;

namespace {

// Cover of the single string b^n, with a closed-form counter so deep levels stay cheap.
Martingale point_cover(std::size_t n, bool b) {
    CoverSpec spec = cover_from_set(0, {});
    spec.n = n;
    spec.member = [b](const BitString& x) { return b ? x.count_ones() == x.size() : x.count_ones() == 0; };
    spec.counter = ExtensionCounter{n, [b](const BitString& w) {
                                        const bool run = b ? w.count_ones() == w.size() : w.count_ones() == 0;
                                        return mpz_class(run ? 1 : 0);
                                    }};
    return cover_martingale(spec);
}

// d_n = cover of {1^n}: capital 2^-n, value 1 on 1^n.
MartingaleFamily ones_family(std::optional<std::size_t> last) {
    return MartingaleFamily(
        "ones", [](std::size_t n) { return point_cover(n, true); },
        [](std::size_t n) { return Dyadic::pow2(-static_cast<long>(n)); }, 1, last);
}

ConvergenceModulus shift_modulus(std::size_t c) {
    // Tail past M of sum 2^{|w|-n} is at most 2^{|w|-M}.
    return {"|w| + i + " + std::to_string(c),
            [c](const BitString& w, unsigned i) { return w.size() + i + c; }};
}

}  // namespace

TEST_CASE("finite pointwise sum adds values and capitals") {
    Martingale a = cover_martingale(cover_from_set(2, {BitString("01")}));
    Martingale b = cover_martingale(cover_from_set(2, {BitString("01"), BitString("11")}));
    Martingale s = sum_finite(a, b);
    CHECK(s.initial_capital == Dyadic::make(3, 2));
    CHECK(s.value(BitString("01")) == Dyadic(2));
    CHECK(s.value(BitString("1")) == Dyadic::make(1, 1));
    CHECK(verify_averaging(s, 4).pass());
}

TEST_CASE("family rejects members above the declared capital bound") {
    MartingaleFamily fam(
        "too-rich", [](std::size_t) { return constant_martingale(Dyadic(1)); },
        [](std::size_t) { return Dyadic::make(1, 1); }, 1, 3);
    CHECK_THROWS_AS(fam.at(1), CapitalBoundViolation);
    CHECK_THROWS_AS(fam.at(4), std::out_of_range);
    CHECK_THROWS_AS(MartingaleFamily("empty", {}, {}, 3, std::size_t{2}), std::invalid_argument);
}

TEST_CASE("finite family sums exactly") {
    auto fam = ones_family(std::size_t{6});
    Martingale d = summed_martingale(fam, shift_modulus(2));
    CHECK(d.initial_capital == Dyadic::make(63, 6));
    CHECK(d.freeze_depth == std::optional<std::size_t>(6));
    // On 111 the members n <= 3 are at 1 and the rest at 2^{3-n}.
    CHECK(d.value(BitString("111")) == Dyadic(3) + Dyadic::make(7, 3));
    CHECK(verify_averaging(d, 7).pass());
}

TEST_CASE("infinite family sums within 2^-r") {
    auto fam = ones_family(std::nullopt);
    auto mod = shift_modulus(1);
    for (unsigned r : {4u, 10u, 20u}) {
        Dyadic v = sum_family(fam, mod, BitString(""), r);
        CHECK(Dyadic(1) - v <= Dyadic::pow2(-static_cast<long>(r)));
        CHECK(v < Dyadic(1));
        Dyadic u = sum_family(fam, mod, BitString("11"), r);
        // 1 + 1 + 1/2 + 1/4 + ... -> 3
        CHECK(Dyadic(3) - u <= Dyadic::pow2(-static_cast<long>(r)));
    }
}

TEST_CASE("a modulus that stops too early is caught") {
    auto fam = ones_family(std::nullopt);
    ConvergenceModulus bad{"i", [](const BitString&, unsigned i) { return std::size_t{i}; }};
    CHECK_THROWS_AS(sum_family(fam, bad, BitString("1111"), 3), ModulusFailure);
    CHECK_THROWS_AS(borel_cantelli_measure(fam, ConvergenceModulus{"zero", [](const BitString&, unsigned) {
                                                                       return std::size_t{0};
                                                                   }}),
                    ModulusFailure);
}

TEST_CASE("borel-cantelli measure form rejects the zero family") {
    MartingaleFamily zero(
        "zero", [](std::size_t) { return constant_martingale(Dyadic(0)); },
        [](std::size_t n) { return Dyadic::pow2(-static_cast<long>(n)); }, 1, std::size_t{5});
    CHECK_THROWS_AS(borel_cantelli_measure(zero, shift_modulus(1)), DegenerateFamily);
}

TEST_CASE("measure guarantee holds for the cover family") {
    auto fam = ones_family(std::size_t{8});
    Martingale agg = borel_cantelli_measure(fam, shift_modulus(1));
    auto rep = check_measure_guarantee(fam, agg);
    CHECK(rep.pass());
    CHECK(rep.covered == 8);
    CHECK(rep.leaves_checked == 510);
}

TEST_CASE("dimension form scales members and keeps the guarantee") {
    // d_n covers {0^n} with capital 2^-n <= 2^{(s-1)n} for s = 0.
    MartingaleFamily fam(
        "zeros", [](std::size_t n) { return cover_martingale(cover_from_set(n, {BitString::zeros(n)})); },
        [](std::size_t n) { return Dyadic::pow2(-static_cast<long>(n)); }, 1, std::size_t{8});
    const Dyadic s(0), t = Dyadic::make(1, 1);
    Martingale agg = borel_cantelli_dimension(fam, s, t);
    CHECK(dimension_scale_exponent(t, 5) == 3);
    CHECK(dimension_scale_exponent(Dyadic(1), 5) == 0);
    CHECK(check_dimension_guarantee(fam, agg, t).pass());
    CHECK(verify_averaging(agg, 9).pass());
    CHECK_THROWS_AS(borel_cantelli_dimension(fam, t, s), std::invalid_argument);
    // s too small for the capital: 2^-1 > 2^{(s-1)1} fails at s = -1/2.
    CHECK_THROWS_AS(borel_cantelli_dimension(fam, Dyadic::make(-1, 1), t).value(BitString("0")),
                    CapitalBoundViolation);
}

TEST_CASE("infinite dimension aggregate uses the derived modulus") {
    MartingaleFamily fam(
        "zeros", [](std::size_t n) { return point_cover(n, false); },
        [](std::size_t n) { return Dyadic::pow2(-static_cast<long>(n)); }, 1, std::nullopt);
    Martingale agg = borel_cantelli_dimension(fam, Dyadic(0), Dyadic::make(3, 2));
    // Members n <= 6 sit at 2^{ceil(n/4)} on 0^6.
    Dyadic v = agg.value(BitString::zeros(6), 12);
    CHECK(v >= Dyadic(2 + 2 + 2 + 2 + 4 + 4));
    CHECK(geq_pow2(v, Dyadic::make(6, 2)));
}

TEST_CASE("dimension scaling audit") {
    CHECK(dimension_scaling_audit(Dyadic::make(1, 2), Dyadic::make(3, 4)).pass());
    CHECK(dimension_scaling_audit(Dyadic(0), Dyadic::make(1, 10)).pass());
}

TEST_CASE("shrink and gamma factors") {
    CHECK(shrink_factor(2) == mpq_class(1, 9));
    CHECK(gamma_factor(2) == mpq_class(1, 18));
    CHECK(shrink_factor(3) == mpq_class(1, 8));
    const mpq_class e2 = e_minus_two_lower_bound();
    CHECK(e2 < mpq_class(135335283, 1000000000));
    mpq_class prev_s = 0, prev_g = 0;
    for (std::size_t n = 2; n <= 40; ++n) {
        const mpq_class s = shrink_factor(n), g = gamma_factor(n);
        CHECK(s > prev_s);
        CHECK(g > prev_g);
        CHECK(s < mpq_class(135335284, 1000000000));
        prev_s = s;
        prev_g = g;
    }
    CHECK(shrink_factor(1000) > mpq_class(1353, 10000));
}

TEST_CASE("approximate-counting transform is a supermartingale within the band") {
    const std::size_t n = 4;
    std::vector<BitString> members = {BitString("0001"), BitString("0110"), BitString("0111"), BitString("1100")};
    CoverSpec spec = cover_from_set(n, members);
    Martingale d = cover_martingale(spec);
    auto rep = leveled_representation(n, [d, n](const BitString& w) {
        return mpz_class(d.value(w).scaled(static_cast<long>(n - std::min(n, w.size()))).to_rational());
    });
    // h = f (1 + 1/n) when |v| is odd, f (1 - 1/n) otherwise.
    auto h = [rep, n](const BitString& v) {
        mpq_class f(rep.f(v));
        mpq_class k = v.size() % 2 ? mpq_class(n + 1, n) : mpq_class(n - 1, n);
        mpq_class out = f * k;
        out.canonicalize();
        return out;
    };
    Martingale sup = approx_supermartingale(rep, h);
    CHECK(sup.supermartingale);
    auto av = verify_averaging(sup, n + 1);
    CHECK(av.pass());
    // On a member leaf the value is at least gamma_n times the leaf indicator.
    for (auto& x : members) CHECK(sup.rational_value(x) >= gamma_factor(n));
    auto bad = [rep](const BitString& v) { return mpq_class(rep.f(v) * 2 + 1); };
    CHECK_THROWS_AS(approx_supermartingale(rep, bad).rational_value(BitString("0")), ApproximatorOutOfBand);
    CHECK_THROWS_AS(approx_supermartingale(leveled_representation(1, rep.f), h), std::invalid_argument);
}

TEST_CASE("with h = f at n = 2 the transform scales level-n values by exactly 1/9") {
    Martingale d = cover_martingale(cover_from_set(2, {BitString("01"), BitString("10"), BitString("11")}));
    auto rep = leveled_representation(2, [d](const BitString& w) {
        return mpz_class(d.value(w).scaled(static_cast<long>(2 - std::min<std::size_t>(2, w.size()))).to_rational());
    });
    Martingale sup = approx_supermartingale(rep, [rep](const BitString& v) { return mpq_class(rep.f(v)); });
    for (auto& v : all_strings(2)) CHECK(sup.rational_value(v) == mpq_class(1, 9) * d.value(v).to_rational());
    CHECK(sup.rational_value(BitString("")) == d.initial_capital.to_rational());
}

TEST_CASE("h = f at n = 4 scales depth-4 values by (3/5)^4; the upper band edge stays a supermartingale") {
    std::vector<BitString> members = {BitString("0000"), BitString("0101"), BitString("1011"), BitString("1110"),
                                      BitString("1111")};
    Martingale d = cover_martingale(cover_from_set(4, members));
    auto rep = leveled_representation(4, [d](const BitString& w) {
        return mpz_class(d.value(w).scaled(static_cast<long>(4 - std::min<std::size_t>(4, w.size()))).to_rational());
    });
    Martingale exact = approx_supermartingale(rep, [rep](const BitString& v) { return mpq_class(rep.f(v)); });
    for (auto& v : all_strings(4)) CHECK(exact.rational_value(v) == mpq_class(81, 625) * d.value(v).to_rational());
    Martingale upper = approx_supermartingale(rep, [rep](const BitString& v) {
        mpq_class h = mpq_class(rep.f(v)) * mpq_class(5, 4);
        h.canonicalize();
        return h;
    });
    CHECK(verify_averaging(upper, 6).pass());
}

TEST_CASE("summation at two precisions agrees within the sum of both errors") {
    MartingaleFamily fam(
        "ones", [](std::size_t n) { return point_cover(n, true); },
        [](std::size_t n) { return Dyadic::pow2(-static_cast<long>(n)); }, 1, std::nullopt);
    auto mod = shift_modulus(1);
    for (const char* w : {"", "1", "0", "111", "1101"}) {
        for (unsigned r = 0; r < 12; ++r) {
            for (unsigned r2 = r + 1; r2 <= 14; ++r2) {
                Dyadic a = sum_family(fam, mod, BitString(w), r), b = sum_family(fam, mod, BitString(w), r2);
                Dyadic diff = a < b ? b - a : a - b;
                CHECK(diff <= Dyadic::pow2(-static_cast<long>(r)) + Dyadic::pow2(-static_cast<long>(r2)));
            }
        }
    }
}

TEST_CASE("finite sums commute and associate node for node") {
    Martingale a = cover_martingale(cover_from_set(3, {BitString("001"), BitString("111")}));
    Martingale b = condexp_martingale([](const BitString& x) { return static_cast<std::int64_t>(x.count_ones()); }, 3);
    Martingale c = biimmunity_martingale(LanguageView::from_indices({0, 2}, 64));
    Martingale ab = sum_finite(a, b), ba = sum_finite(b, a);
    Martingale l = sum_finite(ab, c), r = sum_finite(a, sum_finite(b, c));
    for (std::size_t k = 0; k <= 5; ++k) {
        for (auto& w : all_strings(k)) {
            CHECK(ab.value(w) == ba.value(w));
            CHECK(l.value(w) == r.value(w));
        }
    }
}

TEST_CASE("gamma increases for n = 2..64 and stays below e^-2") {
    for (std::size_t n = 3; n <= 64; ++n) CHECK(gamma_factor(n) > gamma_factor(n - 1));
    CHECK(gamma_factor(64) < e_minus_two_lower_bound());
    CHECK(dimension_scaling_audit(Dyadic::make(1, 1), Dyadic::make(3, 2), 64).pass());
}
