#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "cmlab/martingale.hpp"

namespace cmlab {

class ModulusFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class DegenerateFamily : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class CapitalBoundViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class ApproximatorOutOfBand : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Pointwise sum; the approximate evaluator splits the error budget.
Martingale sum_finite(const Martingale& a, const Martingale& b);

// A uniform family (d_n) of exact martingales indexed by n in [first, last].
// `last` empty means the family is infinite. Members are generated once and
// cached; the generator must be pure.
class MartingaleFamily {
public:
    using Generator = std::function<Martingale(std::size_t)>;
    using Bound = std::function<Dyadic(std::size_t)>;

    MartingaleFamily(std::string name, Generator gen, Bound capital_bound, std::size_t first,
                     std::optional<std::size_t> last);

    const std::string& name() const { return name_; }
    std::size_t first() const { return first_; }
    std::optional<std::size_t> last() const { return last_; }
    bool finite() const { return last_.has_value(); }
    bool contains_level(std::size_t n) const { return n >= first_ && (!last_ || n <= *last_); }
    Dyadic capital_bound(std::size_t n) const { return bound_(n); }

    // Generated member; checks initial_capital <= capital_bound(n).
    const Martingale& at(std::size_t n) const;

private:
    std::string name_;
    Generator gen_;
    Bound bound_;
    std::size_t first_;
    std::optional<std::size_t> last_;
    std::shared_ptr<std::map<std::size_t, Martingale>> cache_;
};

// m(w, i): summing members n <= m(w, i) leaves a tail of at most 2^-i at w.
struct ConvergenceModulus {
    std::string description;
    std::function<std::size_t(const BitString& w, unsigned i)> m;
};

struct AuditOptions {
    std::size_t tail_span = 16;  // tail terms evaluated past the modulus on every query
    std::size_t random_audits = 8;
    std::uint64_t seed = 1;
};

// d̂(w, r) = sum of d_n(w) over first <= n <= m(w, r). The next tail_span
// terms are evaluated and must total at most 2^-r, else ModulusFailure.
Dyadic sum_family(const MartingaleFamily& fam, const ConvergenceModulus& mod, const BitString& w, unsigned r,
                  const AuditOptions& opts = {});

// Martingale d = sum of the family. Exact when the family is finite;
// otherwise only the approximate evaluator (sum_family) is available.
Martingale summed_martingale(const MartingaleFamily& fam, const ConvergenceModulus& mod,
                             const AuditOptions& opts = {});

// Sum for the measure form: rejects an identically-zero aggregate
// (DegenerateFamily) and capital series that fail their modulus on a seeded audit.
Martingale borel_cantelli_measure(const MartingaleFamily& fam, const ConvergenceModulus& mod,
                                  const AuditOptions& opts = {});

// Sum of d_n' = 2^{ceil((1-t)n)} d_n. Requires t > s and d_n(λ) <= 2^{(s-1)n}.
// Infinite families get a modulus derived from the geometric bound unless one is given.
Martingale borel_cantelli_dimension(const MartingaleFamily& fam, const Dyadic& s, const Dyadic& t,
                                    std::optional<ConvergenceModulus> mod = std::nullopt,
                                    const AuditOptions& opts = {});

// ceil((1 - t) n), exact.
long dimension_scale_exponent(const Dyadic& t, std::size_t n);

struct GuaranteeReport {
    std::uint64_t leaves_checked = 0;
    std::uint64_t covered = 0;                 // leaves with d_n(w) >= 1
    std::vector<std::string> failures;         // "n=..,w=..,value=.."
    bool pass() const { return failures.empty(); }
};

// For each member level n (finite family) and each w of length freeze_depth(d_n):
// d_n(w) >= 1 must imply aggregate(w) >= 1.
GuaranteeReport check_measure_guarantee(const MartingaleFamily& fam, const Martingale& aggregate);
// Dimension form: d_n(w) >= 1 must imply aggregate(w) >= 2^{(1-t)|w|}.
GuaranteeReport check_dimension_guarantee(const MartingaleFamily& fam, const Martingale& aggregate, const Dyadic& t);

// Term-wise check of 2^{ceil((1-t)n)} 2^{(s-1)n} <= 2^{1-(t-s)n} for n = 1..horizon,
// plus the floating partial sums of both series.
struct ScalingAudit {
    bool termwise = true;
    long double scaled_partial = 0, geometric_partial = 0;
    bool pass() const { return termwise && scaled_partial <= geometric_partial; }
};
ScalingAudit dimension_scaling_audit(const Dyadic& s, const Dyadic& t, std::size_t horizon = 64);

// Approximate-counting transform ---------------------------------------------

// d(w) = f(w) / 2^{log_g(w)} with f integer valued.
struct CountingRepresentation {
    std::size_t n = 0;  // level at which the transform freezes
    std::function<mpz_class(const BitString&)> f;
    std::function<std::uint64_t(const BitString&)> log_g;
};

// Representation of a level-n martingale built by `leveled_martingale`.
CountingRepresentation leveled_representation(std::size_t n, std::function<mpz_class(const BitString&)> ext_sum);

using Approximator = std::function<mpq_class(const BitString&)>;

inline constexpr unsigned kSupermartingaleFloorBits = 32;

// d_n(v) = h(v)/g(v) * ((n-1)/(n+1))^{|v|} for |v| <= n, frozen past n. The
// values are exact rationals; the approximate evaluator floors them onto the
// 2^-max(r,32) grid. h must satisfy (1-1/n) f <= h <= (1+1/n) f wherever queried.
Martingale approx_supermartingale(const CountingRepresentation& rep, Approximator h);

// ((n-1)/(n+1))^n
mpq_class shrink_factor(std::size_t n);
// (1 - 1/n) ((n-1)/(n+1))^n
mpq_class gamma_factor(std::size_t n);
// A rational strictly below e^-2 (0.135335283...).
mpq_class e_minus_two_lower_bound();

}  // namespace cmlab
