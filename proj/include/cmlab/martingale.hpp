#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "cmlab/cantor.hpp"
#include "cmlab/dyadic.hpp"

namespace cmlab {

// An evaluable betting function on finite strings.
//
// `exact` is optional; `approx(w, r)` must be within 2^-r of the true value.
// Values that are rational but not dyadic (the approximate-counting
// transform) are exposed through `rational` instead of `exact`.
struct Martingale {
    std::string name;
    std::string counting_class;  // claimed class, recorded but never proved
    std::string metadata;        // free-form provenance (modulus, error bound, ...)
    std::function<Dyadic(const BitString&)> exact;
    std::function<Dyadic(const BitString&, unsigned)> approx;
    std::function<mpq_class(const BitString&)> rational;
    std::optional<std::size_t> freeze_depth;
    Dyadic initial_capital;
    bool supermartingale = false;

    bool has_exact() const { return static_cast<bool>(exact); }
    bool has_rational() const { return static_cast<bool>(rational) || has_exact(); }
    Dyadic value(const BitString& w) const;
    Dyadic value(const BitString& w, unsigned r) const;
    mpq_class rational_value(const BitString& w) const;
};

// Wraps an exact evaluator. When `freeze` is set, strings longer than the
// freeze depth are evaluated at their prefix of that length.
Martingale make_martingale(std::string name, std::string counting_class,
                           std::function<Dyadic(const BitString&)> exact,
                           std::optional<std::size_t> freeze = std::nullopt);

Martingale constant_martingale(const Dyadic& c);

struct AveragingViolation {
    BitString node;
    std::string parent, left, right;  // values as text
    std::string kind;                 // "averaging" or "negative"
};

struct AveragingReport {
    std::size_t depth = 0;
    std::uint64_t nodes_checked = 0;
    bool supermartingale = false;
    std::vector<AveragingViolation> violations;
    bool pass() const { return violations.empty(); }
};

// Checks 2 d(w) = d(w0) + d(w1) (or >= for supermartingales) for every |w| < depth,
// and nonnegativity of every value reached.
AveragingReport verify_averaging(const Martingale& m, std::size_t depth);
// The same law along `paths` seeded random root-to-depth paths.
AveragingReport verify_averaging_sampled(const Martingale& m, std::size_t depth, std::size_t paths,
                                         std::uint64_t seed);

struct SuccessReport {
    std::size_t horizon = 0;
    Dyadic s;
    std::vector<Dyadic> values;                // d(S↾n) for n = 0..horizon
    std::vector<std::size_t> success_levels;   // n with d(S↾n) >= 2^{(1-s)n}
    std::optional<std::size_t> unitary_hit;    // least n with d(S↾n) >= 1
};

SuccessReport success_scan(const Martingale& m, const BitString& S, const Dyadic& s);

struct DiagonalResult {
    BitString prefix;
    std::vector<Dyadic> trace;  // d(w↾k) for k = 0..N
};

// Next bit is 1 iff d(w1) < d(w0); ties go to 0.
DiagonalResult diagonalize(const Martingale& m, std::size_t N);

inline constexpr unsigned kDimensionGridBits = 10;

struct DimensionStats {
    // Per level n = 1..|S|: the least grid point g = j/2^10 with
    // 1 - log2 d(S↾n)/n <= g; nullopt stands for +infinity (d = 0).
    std::vector<std::optional<Dyadic>> per_level;
    std::optional<Dyadic> min;  // nullopt = +infinity
    std::optional<Dyadic> max;
};

DimensionStats empirical_dimension(const Martingale& m, const BitString& S);
// The grid statistic for one value at one level.
std::optional<Dyadic> dimension_grid_point(const Dyadic& value, std::size_t n);

// All nodes of depth <= depth in level order with their values.
std::vector<std::pair<BitString, Dyadic>> tree_values(const Martingale& m, std::size_t depth);
std::string tree_csv(const Martingale& m, std::size_t depth);
// Root on top, 0-child on the left; value-1 leaves and nodes on `highlight`
// (a path given as its endpoint) are filled.
std::string tree_dot(const Martingale& m, std::size_t depth, const std::optional<BitString>& highlight = {});

}  // namespace cmlab
