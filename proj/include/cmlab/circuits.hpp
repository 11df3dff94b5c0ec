#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "cmlab/cantor.hpp"
#include "cmlab/constructions.hpp"
#include "cmlab/dyadic.hpp"
#include "cmlab/oracle.hpp"

namespace cmlab {

class DegenerateParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};
class CensusIncomplete : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr unsigned kMaxCircuitInputs = 4;
inline constexpr unsigned kDefaultCensusCap = 8;
inline constexpr const char* kBasisName = "and2-or2-not1";

// Truth table of an n-input function: bit j of `bits` is the output on the
// j-th input string of length n in lexicographic order.
struct TruthTable {
    unsigned n = 0;
    std::uint32_t bits = 0;

    std::uint32_t rows() const { return 1u << n; }
    BitString str() const;  // position j = output on row j
    static TruthTable from_string(const BitString& s);
    static TruthTable projection(unsigned n, unsigned i);
    static TruthTable constant(unsigned n, bool v);
    friend bool operator==(const TruthTable&, const TruthTable&) = default;
};

enum class GateOp : std::uint8_t { And = 0, Or = 1, Not = 2 };

// Nodes: inputs 0..n-1, constant 0 at n, constant 1 at n+1, gate i at n+2+i.
struct Circuit {
    struct Gate {
        GateOp op;
        unsigned a = 0, b = 0;
    };
    unsigned n = 0;
    std::vector<Gate> gates;
    unsigned output = 0;

    std::size_t size() const { return gates.size(); }
    TruthTable evaluate() const;
};

class CircuitCensus {
public:
    unsigned n() const { return n_; }
    unsigned max_size() const { return S_; }
    const std::string& basis() const { return basis_; }

    std::optional<unsigned> min_size(const TruthTable& tt) const;
    std::size_t reachable() const;
    std::size_t count_at_most(unsigned s) const;
    std::map<unsigned, std::size_t> histogram() const;
    std::string histogram_csv() const;
    // All reachable tables with min size <= s, ascending by bits.
    std::vector<std::uint32_t> tables_at_most(unsigned s) const;

    // A circuit realizing the recorded minimum (shared subfunctions merged).
    Circuit circuit_for(const TruthTable& tt) const;

    void save(const std::string& path) const;
    static CircuitCensus load(const std::string& path);
    static std::string cache_file_name(unsigned n, unsigned S);

    friend bool operator==(const CircuitCensus& a, const CircuitCensus& b) {
        return a.n_ == b.n_ && a.S_ == b.S_ && a.basis_ == b.basis_ && a.size_ == b.size_;
    }

    friend CircuitCensus build_census(unsigned n, unsigned S, unsigned cap);

private:
    struct Origin {
        std::uint8_t op = 0xff;  // 0xff = seed
        std::uint32_t a = 0, b = 0;
    };
    unsigned n_ = 0, S_ = 0;
    std::string basis_ = kBasisName;
    std::vector<std::int8_t> size_;  // indexed by table bits; -1 = unreached
    std::vector<Origin> origin_;
};

// Breadth-first closure: seed inputs and constants at size 0, then combine
// tables of sizes i and j through a gate into size i + j + 1 (NOT: i + 1).
CircuitCensus build_census(unsigned n, unsigned S, unsigned cap = kDefaultCensusCap);
CircuitCensus load_or_build_census(unsigned n, unsigned S, const std::string& cache_dir);

// Independent oracle: exhaustive straight-line programs with up to
// max_gates gates. Entry is -1 when a table needs more gates.
std::vector<int> dag_enumeration_minima(unsigned n, unsigned max_gates);

bool mcsp(const CircuitCensus& census, const TruthTable& tt, unsigned s);

// Witness relation behind MCSP: x is a 2^n-bit truth table, a witness is a
// fixed-width encoding of s gates plus an output node.
WitnessRelation mcsp_relation(unsigned n, unsigned s);

// floor of s(n) = (2^n / n)(1 + alpha log2(n) / n), computed exactly.
unsigned size_bound_floor(unsigned n, const Dyadic& alpha);
double size_bound_real(unsigned n, const Dyadic& alpha);

struct MnpReport {
    unsigned n = 0;
    Dyadic alpha;
    double s_real = 0;
    unsigned s_floor = 0;
    std::uint64_t N = 0;             // 2^{n+1} - 1
    std::uint64_t table_count = 0;   // tables with min size <= s(n)
    mpz_class cover_size;            // |A_{=N}| = 2^{N - 2^n} * table_count
    double log2_cover_size = 0;
    double f_N = 0;                  // (1 - alpha/2)(2^n/n) log2 n
    bool entropy_gap_holds = false;  // log2 |A_{=N}| < N - f(N), exact
    double counting_bound_log2 = 0;  // s log2(48 e s)
    bool counting_bound_holds = false;
    std::string to_json() const;
};

MnpReport mnp_cover_check(unsigned n, const Dyadic& alpha, const CircuitCensus& census);

// The cover {B_{<=n} : B_{=n} has a circuit of size <= s} at level N = 2^{n+1} - 1.
struct McspCover {
    unsigned n = 0, s = 0;
    std::size_t N = 0;
    std::vector<std::uint32_t> keys;  // good tables, position 0 as the most significant bit, sorted
    bool member(const BitString& x) const;
    mpz_class size() const;  // |A_{=N}|
    CoverSpec spec() const;  // closed-form extension counts, no 2^N enumeration
};

McspCover mcsp_cover(const CircuitCensus& census, unsigned s);

// Program for the toy machine printing the circuit's truth table.
BitString encode_circuit(const Circuit& c);
// c0, measured: the smallest constant that covers every n <= 4, s <= 8 with all
// gates binary. A bare projection at n = 4 (12 bits) already needs 10.
inline constexpr std::size_t kEncodingConstant = 10;
// (s + 1)(c0 + ceil(log2(n + s)))
std::size_t encoding_length_bound(unsigned n, std::size_t s);

}  // namespace cmlab
