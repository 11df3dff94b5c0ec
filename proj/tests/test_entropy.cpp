#include <doctest.h>

#include <cmath>

#include "cmlab/entropy.hpp"

using namespace cmlab;

namespace {

LanguageFamily zeros_up_to(std::size_t top) {
    std::map<std::size_t, CoverSpec> levels;
    for (std::size_t n = 1; n <= top; ++n) levels[n] = cover_from_set(n, {BitString::zeros(n)});
    return leveled_family("zeros<=" + std::to_string(top), levels);
}

std::vector<McspCover> mcsp_covers(unsigned lo, unsigned hi) {
    std::vector<McspCover> out;
    for (unsigned n = lo; n <= hi; ++n)
        out.push_back(mcsp_cover(build_census(n, 8), size_bound_floor(n, Dyadic(0))));
    return out;
}

}  // namespace

TEST_CASE("entropy rates of the basic families") {
    EntropyTable all = entropy_rate(all_strings_family(), 12);
    for (auto& lv : all.levels) CHECK(lv.grid_rate == Dyadic(1));
    CHECK(all.max_grid_rate == Dyadic(1));

    EntropyTable z = entropy_rate(zeros_family(), 12);
    for (auto& lv : z.levels) CHECK(lv.grid_rate == Dyadic(0));

    EntropyTable none = entropy_rate(leveled_family("empty", {}), 5);
    for (auto& lv : none.levels) CHECK_FALSE(lv.grid_rate.has_value());
    CHECK_FALSE(none.max_grid_rate.has_value());
    CHECK(none.to_csv().find("max,,-inf,") != std::string::npos);
}

TEST_CASE("low-weight rates climb toward the binary entropy of the weight") {
    const double h = -(0.25 * std::log2(0.25) + 0.75 * std::log2(0.75));
    EntropyTable t = entropy_rate(low_weight_family(1, 4), 256);
    for (auto& lv : t.levels) CHECK(lv.rate <= h + 1e-12);
    CHECK(t.levels[15].count == 2517);
    CHECK(t.levels[255].rate > 0.79);
    CHECK(t.levels[255].rate > t.levels[63].rate);
    CHECK(t.levels[63].rate > t.levels[15].rate);
    // The grid rate floors the real rate.
    for (auto& lv : t.levels) {
        REQUIRE(lv.grid_rate.has_value());
        CHECK(lv.grid_rate->to_double() <= lv.rate + 1e-12);
        CHECK(lv.rate < lv.grid_rate->to_double() + std::ldexp(1.0, -static_cast<int>(kRateGridBits)) + 1e-12);
    }
}

TEST_CASE("closed-form counts match enumeration") {
    auto lw = low_weight_family(1, 3);
    auto en = enumerated_family("lw", lw.member);
    for (std::size_t n = 1; n <= 12; ++n) CHECK(lw.count(n) == en.count(n));
    for (std::size_t n = 1; n <= 8; ++n) {
        CoverSpec s = lw.level(n);
        for (std::size_t k = 0; k <= n; ++k) {
            for (auto& w : all_strings(k)) {
                mpz_class direct = 0;
                for (auto& x : all_strings(n)) direct += w.is_prefix_of(x) && lw.member(x);
                CHECK(s.counter->ext_sum(w) == direct);
            }
        }
    }
}

TEST_CASE("union rate exceeds the larger rate by at most 1/n") {
    std::vector<LanguageFamily> fams = {zeros_family(), low_weight_family(1, 4),
                                        enumerated_family("even", [](const BitString& x) { return x.count_ones() % 2 == 0; }),
                                        enumerated_family("prefix1", [](const BitString& x) { return !x.empty() && x[0]; })};
    for (auto& a : fams) {
        for (auto& b : fams) {
            EntropyTable ta = entropy_rate(a, 12), tb = entropy_rate(b, 12), tu = entropy_rate(family_union(a, b), 12);
            for (std::size_t i = 0; i < 12; ++i) {
                const double bound = std::max(ta.levels[i].rate, tb.levels[i].rate) + 1.0 / static_cast<double>(i + 1);
                CHECK(tu.levels[i].rate <= bound + 1e-12);
                CHECK(tu.levels[i].rate >= std::max(ta.levels[i].rate, tb.levels[i].rate) - 1e-12);
            }
        }
    }
}

TEST_CASE("a zero gap fails condition 2 on the full language") {
    auto cert = mc_certificate(all_strings_family(), dyadic_gap("0", [](std::size_t) { return Dyadic(0); }),
                               ConvergenceModulus{"i", [](const BitString&, unsigned i) { return std::size_t{i}; }}, 6);
    CHECK_FALSE(cert.valid);
    CHECK(cert.failing_level == std::size_t{1});
    CHECK(cert.failing_condition.rfind("condition 2", 0) == 0);
}

TEST_CASE("a finite family with gap n/2 is certified") {
    auto A = zeros_up_to(3);
    auto f = dyadic_gap("n/2", [](std::size_t n) { return Dyadic::make(static_cast<long>(n), 1); });
    ConvergenceModulus mod{"2i + 4", [](const BitString&, unsigned i) { return std::size_t{2 * i + 4}; }};
    CertificateOptions opts;
    opts.witnesses = {BitString("0000"), BitString("0110")};
    auto cert = mc_certificate(A, f, mod, 10, opts);
    CHECK(cert.valid);
    CHECK(cert.condition1_label == "claimed-for");
    REQUIRE(cert.witnesses.size() == 2);
    CHECK(cert.witnesses[0].level == std::size_t{1});
    CHECK(cert.witnesses[1].level == std::size_t{1});
    CHECK(cert.tails.size() == 17);
    for (auto& t : cert.tails) CHECK(t.holds);
    CHECK(cert.report().find("claimed-for") != std::string::npos);

    BridgeReport br = entropy_bridge(cert, A, f);
    CHECK(br.pass());
    CHECK(br.cover_levels == std::vector<std::size_t>{1, 2, 3});
    CHECK(br.aggregate_capital == Dyadic::make(7, 3));
    CHECK(br.elements_checked == 3);
    CHECK(br.aggregate_crosschecks == 3);
}

TEST_CASE("a witness that never enters the family invalidates the certificate") {
    auto A = zeros_up_to(3);
    auto f = dyadic_gap("n/2", [](std::size_t n) { return Dyadic::make(static_cast<long>(n), 1); });
    ConvergenceModulus mod{"2i + 4", [](const BitString&, unsigned i) { return std::size_t{2 * i + 4}; }};
    CertificateOptions opts;
    opts.witnesses = {BitString("1111")};
    auto cert = mc_certificate(A, f, mod, 10, opts);
    CHECK_FALSE(cert.valid);
    CHECK(cert.failing_condition.rfind("condition 1", 0) == 0);
    CHECK_THROWS_AS(entropy_bridge(cert, A, f), std::invalid_argument);
}

TEST_CASE("a modulus that is too short fails condition 3") {
    auto A = zeros_up_to(3);
    auto f = dyadic_gap("n/2", [](std::size_t n) { return Dyadic::make(static_cast<long>(n), 1); });
    ConvergenceModulus mod{"i", [](const BitString&, unsigned i) { return std::size_t{i}; }};
    auto cert = mc_certificate(A, f, mod, 10);
    CHECK_FALSE(cert.valid);
    CHECK(cert.failing_condition.rfind("condition 3", 0) == 0);
}

TEST_CASE("MCSP covers: the linear gap certifies and the logarithmic gap does not") {
    auto A = mcsp_family(mcsp_covers(2, 4));
    CHECK(A.count(7) == 8 * 14);
    CHECK(A.count(15) == mpz_class(128) * 40);
    CHECK(A.count(31) == (mpz_class(886) << 15));
    CHECK(A.count(8) == 0);

    auto lin = mc_certificate(A, mcsp_linear_gap(), mcsp_linear_modulus(), 31);
    CHECK(lin.valid);
    auto lg = mc_certificate(A, mcsp_log_gap(Dyadic(0)), mcsp_linear_modulus(), 31);
    CHECK_FALSE(lg.valid);
    CHECK(lg.failing_level == std::size_t{7});
    CHECK_THROWS_AS(mcsp_log_gap(Dyadic(2)), std::invalid_argument);
}

TEST_CASE("bridge over the small MCSP covers") {
    auto A = mcsp_family(mcsp_covers(2, 3));
    auto f = mcsp_linear_gap();
    auto cert = mc_certificate(A, f, mcsp_linear_modulus(), 15);
    REQUIRE(cert.valid);
    BridgeReport br = entropy_bridge(cert, A, f);
    CHECK(br.pass());
    CHECK(br.cover_levels == std::vector<std::size_t>{7, 15});
    CHECK(br.elements_checked == 112 + 5120);
    CHECK(br.aggregate_crosschecks == br.elements_checked);
    CHECK(br.aggregate_capital == Dyadic::make(14, 4) + Dyadic::make(40, 8));
}
