#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "cmlab/cantor.hpp"
#include "cmlab/circuits.hpp"
#include "cmlab/combinators.hpp"
#include "cmlab/constructions.hpp"
#include "cmlab/dyadic.hpp"

namespace cmlab {

// A language A described level by level: |A_{=n}| in closed form or by
// enumeration, membership on {0,1}^n, and a cover spec per level for the
// martingale bridge.
struct LanguageFamily {
    std::string name;
    std::function<mpz_class(std::size_t n)> count;
    std::function<bool(const BitString&)> member;
    std::function<CoverSpec(std::size_t n)> level;
    // Visits every element of A_{=n}.
    std::function<void(std::size_t n, const std::function<void(const BitString&)>&)> for_each;
};

LanguageFamily enumerated_family(std::string name, std::function<bool(const BitString&)> member,
                                 std::size_t cap = kDefaultWitnessCap);
LanguageFamily all_strings_family();
LanguageFamily zeros_family();                   // A_{=n} = {0^n}
LanguageFamily low_weight_family(std::size_t num, std::size_t den);  // at most (num/den) n ones, closed form
LanguageFamily family_union(const LanguageFamily& a, const LanguageFamily& b, std::size_t cap = kDefaultWitnessCap);
// A_{=m} empty except at the listed levels.
LanguageFamily leveled_family(std::string name, std::map<std::size_t, CoverSpec> levels);
// The MCSP covers at their levels N = 2^{n+1} - 1, with closed-form counts.
LanguageFamily mcsp_family(const std::vector<McspCover>& covers);

struct RateLevel {
    std::size_t n = 0;
    mpz_class count;
    std::optional<Dyadic> grid_rate;  // floor of log2|A_{=n}|/n on the 2^-10 grid; empty = -inf
    double rate = 0;
};

struct EntropyTable {
    std::string family;
    std::vector<RateLevel> levels;
    std::optional<Dyadic> max_grid_rate;  // max over 1 <= n <= H; empty = -inf
    std::string to_csv() const;
};

inline constexpr unsigned kRateGridBits = 10;

EntropyTable entropy_rate(const LanguageFamily& A, std::size_t H);

// The capital-gap function f of the certificate. `below(count, n)` decides
// count < 2^{n - f(n)} exactly; `floor_value(n)` = floor(f(n)) feeds the tail audit.
struct GapFunction {
    std::string description;
    std::function<bool(const mpz_class& count, std::size_t n)> below;
    std::function<long(std::size_t n)> floor_value;
    std::function<std::string(std::size_t n)> show;
};

GapFunction dyadic_gap(std::string description, std::function<Dyadic(std::size_t)> f);
// f(2^{n+1} - 1) = (1 - alpha/2)(2^n/n) log2 n at the MCSP levels, f(m) = m elsewhere.
GapFunction mcsp_log_gap(const Dyadic& alpha);
// f(2^{n+1} - 1) = n - 2 at the MCSP levels, f(m) = m elsewhere.
GapFunction mcsp_linear_gap();
// m(i) = 2^{i+5} - 1: a valid modulus for the series of mcsp_linear_gap.
ConvergenceModulus mcsp_linear_modulus();

struct LevelVerdict {
    std::size_t n = 0;
    mpz_class count;
    std::string f;
    bool holds = false;  // |A_{=n}| < 2^{n - f(n)}
};

struct TailVerdict {
    unsigned i = 0;
    std::size_t m = 0;
    Dyadic tail;         // sum over m < n <= H of 2^{-floor f(n)}
    bool holds = false;  // tail <= 2^-i
    bool beyond_horizon = false;
};

struct WitnessVerdict {
    BitString sequence;                // finite prefix of the witness sequence
    std::optional<std::size_t> level;  // least n <= H with S↾n in A
};

struct EntropyCertificate {
    std::string family;
    std::string gap;
    std::string modulus;
    std::size_t horizon = 0;
    std::vector<LevelVerdict> levels;      // condition 2
    std::vector<TailVerdict> tails;        // condition 3
    std::vector<WitnessVerdict> witnesses; // condition 1, claimed-for the supplied set
    std::string condition1_label = "claimed-for";
    bool valid = false;
    std::optional<std::size_t> failing_level;
    std::string failing_condition;
    std::string report() const;
};

struct CertificateOptions {
    std::vector<BitString> witnesses;
    std::vector<unsigned> tail_indices = {0, 1, 2, 3, 4, 5, 6, 7, 8};
    std::size_t random_tail_audits = 8;
    std::uint64_t seed = 1;
};

EntropyCertificate mc_certificate(const LanguageFamily& A, const GapFunction& f, const ConvergenceModulus& modulus,
                                  std::size_t H, const CertificateOptions& opts = {});

struct BridgeReport {
    Dyadic aggregate_capital;
    std::vector<std::size_t> cover_levels;
    std::vector<std::string> capital_failures;  // levels where d_n(λ) >= 2^{-f(n)}
    std::uint64_t elements_checked = 0;
    std::uint64_t aggregate_crosschecks = 0;    // elements also evaluated through the aggregate itself
    std::vector<std::string> element_failures;  // elements with aggregate value < 1
    bool pass() const { return capital_failures.empty() && element_failures.empty(); }
};

// Levels with at most this many elements are evaluated through the aggregate
// in full; larger ones through an exact regrouping of the same sum, with every
// kBridgeSampleEvery-th element (seeded) cross-checked against the aggregate.
inline constexpr std::uint64_t kBridgeFullAggregateLimit = std::uint64_t{1} << 16;
inline constexpr std::uint64_t kBridgeSampleEvery = 4096;

// Feeds the certificate's cover martingales to borel_cantelli_measure and
// checks d(x) >= 1 on every element of every nonempty level <= H.
BridgeReport entropy_bridge(const EntropyCertificate& cert, const LanguageFamily& A, const GapFunction& f);

}  // namespace cmlab
