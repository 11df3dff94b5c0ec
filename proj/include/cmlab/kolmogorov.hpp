#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "cmlab/cantor.hpp"
#include "cmlab/machine.hpp"
#include "cmlab/martingale.hpp"
#include "cmlab/oracle.hpp"

namespace cmlab {

inline constexpr std::size_t kDefaultKtLength = 14;

// Step budget t(n) = a * n^k + b.
struct Budget {
    std::uint64_t a = 1, k = 2, b = 16;
    std::uint64_t operator()(std::size_t n) const;
    std::string str() const;
    static Budget parse(const std::string& text);  // "a,k,b"
};

// Budget large enough for pair programs built from two t-programs.
Budget pairing_budget(const Budget& t);

// Shortest program of length <= |x| + c_lit printing x within t(|x|) steps;
// nullopt when even the literal does not fit the budget.
std::optional<std::size_t> kt(const BitString& x, const Budget& t, std::size_t max_length = kDefaultKtLength);

// K^t for every string of length <= L, built by one sweep over all programs.
class KtTable {
public:
    static KtTable build(std::size_t L, const Budget& t);
    static KtTable from_csv(const std::string& csv);

    std::size_t max_length() const { return L_; }
    const Budget& budget() const { return t_; }
    std::optional<std::size_t> at(const BitString& x) const;
    std::string to_csv() const;
    // Every entry present and <= |x| + c_lit.
    bool literal_bound_holds() const;

private:
    std::size_t L_ = 0;
    Budget t_;
    std::vector<int> entries_;  // by index_of(x); -1 = none
};

// Reads kt_<machine>_t<a>-<k>-<b>_L<L>.csv from cache_dir, or builds the table
// and writes it there. An empty cache_dir disables caching.
KtTable load_or_build_kt_table(std::size_t L, const Budget& t, const std::string& cache_dir);

// Programs of length < bound printing x within t(|x|) steps, as a witness
// relation. Witness y encodes the program after its first 1-bit.
WitnessRelation kolmogorov_relation(std::size_t bound, const Budget& t);

// d'(w) = g(0^n, w) / 2^{n - |w|} where g counts pairs (x, π) with w ⊑ x,
// |x| = n, |π| < n - f(n) and run(π, t(n)) = x.
Martingale kt_cover_martingale(std::size_t n, const std::function<long(std::size_t)>& f, const Budget& t);

struct KRate {
    std::vector<std::size_t> kt;  // kt[n-1] = K^t(S↾n)
    std::vector<mpq_class> ratio;
    mpq_class min, max;
};

KRate k_rate(const BitString& S, const Budget& t, std::size_t max_length = kDefaultKtLength);

}  // namespace cmlab
