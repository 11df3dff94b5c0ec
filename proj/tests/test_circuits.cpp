#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "cmlab/circuits.hpp"
#include "cmlab/machine.hpp"

using namespace cmlab;

namespace {

std::filesystem::path scratch_dir(const std::string& tag) {
    auto p = std::filesystem::temp_directory_path() / ("cmlab_test_" + tag);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("truth table conventions") {
    CHECK(TruthTable::projection(2, 0).str().str() == "0011");
    CHECK(TruthTable::projection(2, 1).str().str() == "0101");
    CHECK(TruthTable::constant(3, true).str().str() == "11111111");
    auto t = TruthTable::from_string(BitString("0001"));
    CHECK(t.n == 2);
    CHECK(t.bits == 0b1000u);
    CHECK(TruthTable::from_string(t.str()) == t);
    CHECK_THROWS_AS(TruthTable::from_string(BitString("001")), std::invalid_argument);
}

TEST_CASE("circuit evaluation") {
    Circuit c;
    c.n = 2;
    c.gates = {{GateOp::And, 0, 1}, {GateOp::Not, 4, 0}};
    c.output = 5;
    CHECK(c.evaluate().str().str() == "1110");
    c.gates[0].b = 4;
    CHECK_THROWS_AS(c.evaluate(), std::invalid_argument);
}

TEST_CASE("n = 2 census equals exhaustive DAG enumeration") {
    CircuitCensus c = build_census(2, 6);
    auto oracle = dag_enumeration_minima(2, 6);
    REQUIRE(oracle.size() == 16);
    for (std::uint32_t bits = 0; bits < 16; ++bits) {
        auto m = c.min_size(TruthTable{2, bits});
        REQUIRE(m.has_value());
        CHECK(static_cast<int>(*m) == oracle[bits]);
    }
    auto h = c.histogram();
    CHECK(h[0] == 4);
    CHECK(h[1] == 4);
    CHECK(h[2] == 6);
    CHECK(h[4] == 2);
    CHECK(c.count_at_most(2) == 14);
}

TEST_CASE("n = 3 census is an upper bound on DAG minima") {
    CircuitCensus c = build_census(3, 8);
    auto oracle = dag_enumeration_minima(3, 4);
    std::size_t agree = 0, compared = 0;
    for (std::uint32_t bits = 0; bits < 256; ++bits) {
        if (oracle[bits] < 0) continue;
        auto m = c.min_size(TruthTable{3, bits});
        REQUIRE(m.has_value());
        CHECK(static_cast<int>(*m) >= oracle[bits]);
        ++compared;
        agree += static_cast<int>(*m) == oracle[bits];
    }
    CHECK(compared == c.count_at_most(4) + (compared - agree));
    CHECK(c.count_at_most(2) == 40);
    CHECK(c.count_at_most(3) == 84);
    CHECK(c.count_at_most(4) == 121);
    CHECK(c.reachable() == 248);
}

TEST_CASE("census is deterministic and monotone in S") {
    CircuitCensus a = build_census(3, 6), b = build_census(3, 6), c = build_census(3, 8);
    CHECK(a == b);
    for (unsigned s = 0; s <= 6; ++s) CHECK(a.count_at_most(s) == c.count_at_most(s));
    CHECK(a.reachable() <= c.reachable());
    CHECK_THROWS_AS(a.count_at_most(7), CensusIncomplete);
    CHECK_THROWS_AS(build_census(2, 9), CapExceeded);
    CHECK_THROWS_AS(build_census(5, 2), CapExceeded);
}

TEST_CASE("census cache round trip and rejection of foreign files") {
    auto dir = scratch_dir("census");
    CircuitCensus c = build_census(3, 5);
    const auto path = (dir / CircuitCensus::cache_file_name(3, 5)).string();
    CHECK(CircuitCensus::cache_file_name(3, 5) == "census_n3_S5_and2-or2-not1.bin");
    c.save(path);
    CircuitCensus back = CircuitCensus::load(path);
    CHECK(back == c);
    CHECK(back.circuit_for(TruthTable{3, 0x80}).evaluate() == c.circuit_for(TruthTable{3, 0x80}).evaluate());
    CHECK(load_or_build_census(3, 5, dir.string()) == c);
    CHECK(load_or_build_census(2, 4, dir.string()) == build_census(2, 4));
    CHECK(std::filesystem::exists(dir / CircuitCensus::cache_file_name(2, 4)));
    {
        std::ofstream os(dir / "junk.bin", std::ios::binary);
        os << "not a census";
    }
    CHECK_THROWS_AS(CircuitCensus::load((dir / "junk.bin").string()), std::runtime_error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("reconstructed circuits realize their tables within the recorded size") {
    for (unsigned n = 1; n <= 4; ++n) {
        CircuitCensus c = build_census(n, n == 4 ? 6 : 8);
        std::mt19937_64 rng(n);
        for (std::uint32_t bits : c.tables_at_most(c.max_size())) {
            if (n == 4 && rng() % 16) continue;
            TruthTable tt{n, bits};
            Circuit circ = c.circuit_for(tt);
            CHECK(circ.evaluate() == tt);
            CHECK(circ.size() <= *c.min_size(tt));
        }
    }
}

TEST_CASE("encoded circuits print their truth tables within the length bound") {
    for (unsigned n = 1; n <= 4; ++n) {
        CircuitCensus c = build_census(n, n == 4 ? 6 : 8);
        std::mt19937_64 rng(10 + n);
        for (std::uint32_t bits : c.tables_at_most(c.max_size())) {
            if (n == 4 && rng() % 16) continue;
            TruthTable tt{n, bits};
            Circuit circ = c.circuit_for(tt);
            BitString prog = encode_circuit(circ);
            auto r = machine::run(prog, 1u << 20);
            REQUIRE(r.halted);
            CHECK(r.output == tt.str());
            CHECK(prog.size() <= encoding_length_bound(n, circ.size()));
        }
    }
    CHECK(encoding_length_bound(2, 1) == 2 * (10 + 2));
    CHECK(encoding_length_bound(4, 4) == 5 * (10 + 3));
    // The constant is tight: a projection at n = 4 uses the whole bound.
    Circuit proj;
    proj.n = 4;
    proj.output = 2;
    CHECK(encode_circuit(proj).size() == encoding_length_bound(4, 0));
    Circuit inv;
    inv.n = 1;
    inv.gates = {{GateOp::Not, 0, 0}};
    inv.output = 3;
    auto r = machine::run(encode_circuit(inv), 100);
    CHECK(r.output.str() == "10");
}

TEST_CASE("MCSP relation agrees with the n = 2 census") {
    CircuitCensus c = build_census(2, 6);
    for (unsigned s = 0; s <= 2; ++s) {
        auto rel = mcsp_relation(2, s);
        for (std::uint32_t bits = 0; bits < 16; ++bits) {
            TruthTable tt{2, bits};
            CHECK((count(rel, CountMode::WitnessCount, tt.str()) > 0) == mcsp(c, tt, s));
        }
    }
    CHECK_THROWS_AS(mcsp(build_census(2, 2), TruthTable{2, 6}, 3), CensusIncomplete);
}

TEST_CASE("size bound floor is exact") {
    CHECK(size_bound_floor(2, Dyadic(0)) == 2);
    CHECK(size_bound_floor(3, Dyadic(0)) == 2);
    CHECK(size_bound_floor(4, Dyadic(0)) == 4);
    CHECK(size_bound_floor(2, Dyadic::make(1, 1)) == 2);
    CHECK(size_bound_floor(3, Dyadic::make(1, 1)) == 3);
    CHECK(size_bound_floor(4, Dyadic::make(1, 1)) == 5);
    CHECK(size_bound_floor(4, Dyadic(1)) == 6);
    for (unsigned n = 2; n <= 12; ++n)
        CHECK(size_bound_floor(n, Dyadic::make(3, 2)) == static_cast<unsigned>(size_bound_real(n, Dyadic::make(3, 2))));
    CHECK_THROWS_AS(size_bound_floor(1, Dyadic(0)), DegenerateParameter);
    CHECK_THROWS_AS(size_bound_floor(3, Dyadic(-1)), std::invalid_argument);
}

TEST_CASE("MNP cover check reports exact counts") {
    for (unsigned n = 2; n <= 4; ++n) {
        CircuitCensus c = build_census(n, 8);
        for (Dyadic alpha : {Dyadic(0), Dyadic::make(1, 1), Dyadic(1)}) {
            MnpReport r = mnp_cover_check(n, alpha, c);
            CHECK(r.N == (2u << n) - 1);
            CHECK(r.table_count == c.count_at_most(r.s_floor));
            mpz_class expect = mpz_class(r.table_count) << static_cast<mp_bitcnt_t>(r.N - (1u << n));
            CHECK(r.cover_size == expect);
            CHECK(r.counting_bound_holds);
            if (std::abs(r.log2_cover_size - (static_cast<double>(r.N) - r.f_N)) > 1e-6)
                CHECK(r.entropy_gap_holds == (r.log2_cover_size < static_cast<double>(r.N) - r.f_N));
            CHECK(r.to_json().find("\"entropy_gap_holds\"") != std::string::npos);
        }
    }
    CHECK_THROWS_AS(mnp_cover_check(1, Dyadic(0), build_census(1, 4)), DegenerateParameter);
}

TEST_CASE("MCSP cover counter agrees with enumeration at n = 2") {
    CircuitCensus c = build_census(2, 6);
    for (unsigned s : {0u, 2u, 4u}) {
        McspCover cov = mcsp_cover(c, s);
        CHECK(cov.N == 7);
        CoverSpec spec = cov.spec();
        REQUIRE(spec.counter.has_value());
        std::vector<BitString> members;
        for (auto& x : all_strings(7))
            if (cov.member(x)) members.push_back(x);
        CHECK(cov.size() == members.size());
        CHECK(cov.size() == mpz_class(8) * c.count_at_most(s));
        for (std::size_t k = 0; k <= 7; ++k) {
            for (auto& w : all_strings(k)) {
                std::size_t direct = 0;
                for (auto& x : members) direct += w.is_prefix_of(x);
                CHECK(spec.counter->ext_sum(w) == direct);
            }
        }
        // The last four bits are the table of the level-2 slice.
        for (auto& x : members) CHECK(mcsp(c, TruthTable::from_string(x.suffix_from(3)), s));
    }
    CHECK_THROWS_AS(mcsp_cover(c, 2).member(BitString("0101")), std::invalid_argument);
}
