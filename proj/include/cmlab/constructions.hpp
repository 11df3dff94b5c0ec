#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "cmlab/cantor.hpp"
#include "cmlab/martingale.hpp"
#include "cmlab/oracle.hpp"

namespace cmlab {

class RowSumViolation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NegativeValue : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Level-n martingales all have the shape d_n(w) = S(w) / 2^{n-|w|}, where
// S(w) sums a nonnegative leaf function over the length-n extensions of w.
struct ExtensionCounter {
    std::size_t n = 0;
    std::function<mpz_class(const BitString& w)> ext_sum;  // |w| <= n
};

// Tabulates F over {0,1}^n (n <= cap) and answers ext_sum with prefix sums.
ExtensionCounter tabulate_leaves(std::size_t n, const std::function<std::int64_t(const BitString&)>& F,
                                 std::size_t cap = kDefaultWitnessCap);

Martingale leveled_martingale(std::string name, std::string counting_class, ExtensionCounter counter);

// How a witness relation is turned into a cover.
enum class CoverMembership {
    Unique,            // decide_unique; UP stand-in, #P martingale
    Nondeterministic,  // count > 0; NP stand-in, SpanP martingale
    GapIndicator,      // gap in {0,1} asserted; SPP stand-in, GapP martingale
};

struct CoverSpec {
    std::string name = "cover";
    std::size_t n = 0;
    std::function<bool(const BitString&)> member;  // on {0,1}^n
    std::string counting_class = "#P";
    // Optional closed-form counter of |ext_A(w, n)|; bypasses enumeration.
    std::optional<ExtensionCounter> counter;
};

CoverSpec cover_from_set(std::size_t n, const std::vector<BitString>& members);
CoverSpec cover_from_relation(const WitnessRelation& rel, std::size_t n, CoverMembership how,
                              std::size_t cap = kDefaultWitnessCap);

// d_n(w) = |ext_A(w, n)| / 2^{n-|w|}, frozen past n.
Martingale cover_martingale(const CoverSpec& spec, std::size_t cap = kDefaultWitnessCap);
// d_n(w) = E[f(x) | w ⊑ x] over uniform x in {0,1}^n.
Martingale condexp_martingale(const CountingFunction& f, std::size_t n, std::string counting_class = "#P",
                              std::size_t cap = kDefaultWitnessCap);
// Cover {w in {0,1}^n : L(w) ⊆ B}.
Martingale subset_martingale(const LanguageView& B, std::size_t n);

struct AcceptanceSpec {
    // f(x, b) for b in {0,1}; must satisfy f(x,0) + f(x,1) = 2^{q(|x|)}.
    std::function<mpz_class(const BitString& x, int b)> f;
    std::function<std::size_t(std::size_t)> q;
    std::string name = "acceptance";

    // f(x,1) = g(x), f(x,0) = 2^{t(|x|)} - g(x).
    static AcceptanceSpec gap_form(std::function<mpz_class(const BitString&)> g,
                                   std::function<std::size_t(std::size_t)> t);
    // Machine deciding `target` correctly on x with probability
    // correct(|x|) / 2^{q(|x|)}.
    static AcceptanceSpec bounded_error(const LanguageView& target,
                                        std::function<mpz_class(std::size_t)> correct,
                                        std::function<std::size_t(std::size_t)> q);
};

// d(w) = 2^{|w|} ∏_{i<|w|} f(s_i, w[i]) / 2^{q(|s_i|)}; no freeze depth.
Martingale acceptance_martingale(const AcceptanceSpec& spec);

// d(w1) = 2 d(w), d(w0) = 0 when s_{|w|} ∈ A; otherwise both children keep d(w).
Martingale biimmunity_martingale(const LanguageView& A);

}  // namespace cmlab
