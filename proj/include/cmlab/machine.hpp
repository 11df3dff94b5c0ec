#pragma once

#include <cstdint>
#include <string>

#include "cmlab/cantor.hpp"

// The pinned toy machine behind every K^t value in this repository.
//
// A program is a bit string decoded by its leading opcode:
//
//   0 x                         literal: print x (the rest of the program)
//   10 γ(k) P                   repeat: print out(P) k times (k >= 1)
//   110 γ(ℓ) P1 P2              pair: print out(P1) then out(P2), |P1| = ℓ
//   111 γ(n) γ(s+1) G_1..G_s o  circuit: print the truth table of a circuit
//
// γ is the Elias gamma code. A circuit has nodes 0..n-1 (inputs), n (constant
// 0), n+1 (constant 1) and n+2+i (gate i). With w = ceil(log2(n+2+s)), gate
// G_i is "00 a b" (AND), "01 a b" (OR) or "10 a" (NOT) with w-bit operands that
// must name earlier nodes; o is the w-bit output node and must end the program.
// The truth table lists outputs on the inputs x in {0,1}^n in lexicographic
// order, input i being bit i of x.
//
// Cost model: one step per program bit decoded, one per output bit printed,
// and one per gate per truth-table row. A repeat re-runs its body k times.
// Malformed programs and the empty program diverge; so does any run that
// would exceed its step budget.
namespace cmlab::machine {

inline constexpr int kVersion = 1;
// |literal(x)| = |x| + kLiteralOverhead
inline constexpr std::size_t kLiteralOverhead = 1;
// |pair(p, q)| = |p| + |q| + 2 floor(log2 |p|) + kPairOverhead
inline constexpr std::size_t kPairOverhead = 4;

struct RunResult {
    bool halted = false;
    BitString output;
    std::uint64_t steps = 0;
    std::string reason;  // why it diverged
};

RunResult run(const BitString& program, std::uint64_t budget);

BitString gamma(std::uint64_t k);  // k >= 1
BitString literal(const BitString& x);
BitString repeat(std::uint64_t k, const BitString& body);
BitString pair(const BitString& p1, const BitString& p2);  // p1 nonempty

std::string version_tag();

}  // namespace cmlab::machine
