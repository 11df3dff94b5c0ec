#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmlab/cantor.hpp"

namespace cmlab {

inline constexpr std::size_t kDefaultWitnessCap = 22;

class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UniquenessViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A finitely described witness relation. The computation paths on input x are
// the strings y of length witness_length(|x|).
struct WitnessRelation {
    std::string name;
    std::function<std::size_t(std::size_t)> witness_length;
    std::function<bool(const BitString& x, const BitString& y)> verify;
    // Only needed for DistinctOutputCount.
    std::function<BitString(const BitString& x, const BitString& y)> emit;
};

enum class CountMode { WitnessCount, DistinctOutputCount, AcceptMinusReject };

const char* to_string(CountMode m);
CountMode parse_count_mode(const std::string& s);

// Exhaustive count over the witness cube.
//   WitnessCount         |{y : verify(x, y)}|
//   DistinctOutputCount  |{emit(x, y) : verify(x, y)}|
//   AcceptMinusReject    accepts - rejects
std::int64_t count(const WitnessRelation& rel, CountMode mode, const BitString& x,
                   std::size_t cap = kDefaultWitnessCap);

// Accepts iff exactly one witness; two or more raise UniquenessViolation.
bool decide_unique(const WitnessRelation& rel, const BitString& x, std::size_t cap = kDefaultWitnessCap);

using CountingFunction = std::function<std::int64_t(const BitString&)>;
CountingFunction counting_function(WitnessRelation rel, CountMode mode, std::size_t cap = kDefaultWitnessCap);

// Built-in relations ------------------------------------------------------

// x encodes a CNF over `vars` variables: each clause takes 2*vars bits, one
// pair per variable ("10" positive, "01" negated, "00" absent, "11" malformed).
// Witnesses are assignments y of length `vars`.
WitnessRelation ksat_relation(std::size_t vars);
BitString encode_cnf(std::size_t vars, const std::vector<std::vector<int>>& clauses);

// x is accepted with the single empty witness iff x is listed.
WitnessRelation finite_set_relation(const std::vector<BitString>& members, std::string name = "finite-set");

}  // namespace cmlab
