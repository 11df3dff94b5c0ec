#include "cmlab/circuits.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "cmlab/machine.hpp"

namespace cmlab {

namespace {

std::uint32_t full_mask(unsigned n) {
    const unsigned rows = 1u << n;
    return rows == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << rows) - 1;
}

void check_inputs(unsigned n) {
    if (n == 0 || n > kMaxCircuitInputs)
        throw CapExceeded("circuit tools support 1 <= n <= " + std::to_string(kMaxCircuitInputs));
}

std::uint32_t apply(GateOp op, std::uint32_t a, std::uint32_t b, std::uint32_t all) {
    switch (op) {
        case GateOp::And: return a & b;
        case GateOp::Or: return a | b;
        case GateOp::Not: return ~a & all;
    }
    return 0;
}

// Row-major key: position 0 of the table string becomes the most significant bit.
std::uint32_t table_key(std::uint32_t bits, unsigned rows) {
    std::uint32_t key = 0;
    for (unsigned j = 0; j < rows; ++j) key = (key << 1) | ((bits >> j) & 1u);
    return key;
}

template <class T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
T get(std::istream& is) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw std::runtime_error("census cache truncated");
    return v;
}

constexpr char kMagic[8] = {'C', 'M', 'C', 'E', 'N', 'S', 'U', 'S'};
constexpr std::uint32_t kCacheVersion = 1;

}  // namespace

// --- TruthTable / Circuit -----------------------------------------------------

BitString TruthTable::str() const {
    std::string s(rows(), '0');
    for (std::uint32_t j = 0; j < rows(); ++j)
        if ((bits >> j) & 1u) s[j] = '1';
    return BitString(s);
}

TruthTable TruthTable::from_string(const BitString& s) {
    const std::size_t len = s.size();
    if (len == 0 || !std::has_single_bit(len) || len > 32)
        throw std::invalid_argument("truth table length must be 2^n with n <= 5");
    TruthTable t;
    t.n = static_cast<unsigned>(std::countr_zero(len));
    for (std::size_t j = 0; j < len; ++j)
        if (s[j]) t.bits |= std::uint32_t{1} << j;
    return t;
}

TruthTable TruthTable::projection(unsigned n, unsigned i) {
    if (i >= n) throw std::invalid_argument("projection index out of range");
    TruthTable t{n, 0};
    for (std::uint32_t r = 0; r < t.rows(); ++r)
        if ((r >> (n - 1 - i)) & 1u) t.bits |= std::uint32_t{1} << r;
    return t;
}

TruthTable TruthTable::constant(unsigned n, bool v) { return TruthTable{n, v ? full_mask(n) : 0}; }

TruthTable Circuit::evaluate() const {
    if (n > 5) throw CapExceeded("circuit evaluation limited to n <= 5");
    const std::uint32_t all = full_mask(n);
    std::vector<std::uint32_t> val;
    for (unsigned i = 0; i < n; ++i) val.push_back(TruthTable::projection(n, i).bits);
    val.push_back(0);
    val.push_back(all);
    for (const auto& g : gates) {
        if (g.a >= val.size() || (g.op != GateOp::Not && g.b >= val.size()))
            throw std::invalid_argument("gate operand refers forward");
        val.push_back(apply(g.op, val[g.a], g.op == GateOp::Not ? 0 : val[g.b], all));
    }
    if (output >= val.size()) throw std::invalid_argument("output node out of range");
    return TruthTable{n, val[output]};
}

// --- Census -------------------------------------------------------------------

CircuitCensus build_census(unsigned n, unsigned S, unsigned cap) {
    check_inputs(n);
    if (S > cap) throw CapExceeded("census size bound " + std::to_string(S) + " above cap " + std::to_string(cap));
    CircuitCensus c;
    c.n_ = n;
    c.S_ = S;
    const std::uint32_t all = full_mask(n);
    const std::size_t tables = std::size_t{1} << (1u << n);
    c.size_.assign(tables, -1);
    c.origin_.assign(tables, {});

    std::vector<std::vector<std::uint32_t>> bucket(S + 1);
    auto seed = [&](std::uint32_t t) {
        if (c.size_[t] < 0) {
            c.size_[t] = 0;
            bucket[0].push_back(t);
        }
    };
    seed(0);
    seed(all);
    for (unsigned i = 0; i < n; ++i) seed(TruthTable::projection(n, i).bits);
    std::sort(bucket[0].begin(), bucket[0].end());

    for (unsigned s = 1; s <= S; ++s) {
        auto reach = [&](std::uint32_t t, GateOp op, std::uint32_t a, std::uint32_t b) {
            if (c.size_[t] >= 0) return;
            c.size_[t] = static_cast<std::int8_t>(s);
            c.origin_[t] = {static_cast<std::uint8_t>(op), a, b};
            bucket[s].push_back(t);
        };
        for (std::uint32_t a : bucket[s - 1]) reach(~a & all, GateOp::Not, a, 0);
        for (unsigned i = 0; 2 * i <= s - 1; ++i) {
            const unsigned j = s - 1 - i;
            const auto& A = bucket[i];
            const auto& B = bucket[j];
            for (std::size_t x = 0; x < A.size(); ++x) {
                for (std::size_t y = (i == j ? x : 0); y < B.size(); ++y) {
                    reach(A[x] & B[y], GateOp::And, A[x], B[y]);
                    reach(A[x] | B[y], GateOp::Or, A[x], B[y]);
                }
            }
        }
        std::sort(bucket[s].begin(), bucket[s].end());
    }
    return c;
}

std::optional<unsigned> CircuitCensus::min_size(const TruthTable& tt) const {
    if (tt.n != n_) throw std::invalid_argument("truth table arity differs from the census");
    const auto v = size_[tt.bits];
    if (v < 0) return std::nullopt;
    return static_cast<unsigned>(v);
}

std::size_t CircuitCensus::reachable() const {
    return static_cast<std::size_t>(std::count_if(size_.begin(), size_.end(), [](auto v) { return v >= 0; }));
}

std::size_t CircuitCensus::count_at_most(unsigned s) const {
    if (s > S_) throw CensusIncomplete("census built to size " + std::to_string(S_) + ", asked about " + std::to_string(s));
    return static_cast<std::size_t>(
        std::count_if(size_.begin(), size_.end(), [s](auto v) { return v >= 0 && static_cast<unsigned>(v) <= s; }));
}

std::vector<std::uint32_t> CircuitCensus::tables_at_most(unsigned s) const {
    if (s > S_) throw CensusIncomplete("census built to size " + std::to_string(S_) + ", asked about " + std::to_string(s));
    std::vector<std::uint32_t> out;
    for (std::size_t t = 0; t < size_.size(); ++t)
        if (size_[t] >= 0 && static_cast<unsigned>(size_[t]) <= s) out.push_back(static_cast<std::uint32_t>(t));
    return out;
}

std::map<unsigned, std::size_t> CircuitCensus::histogram() const {
    std::map<unsigned, std::size_t> h;
    for (unsigned s = 0; s <= S_; ++s) h[s] = 0;
    for (auto v : size_)
        if (v >= 0) ++h[static_cast<unsigned>(v)];
    return h;
}

std::string CircuitCensus::histogram_csv() const {
    std::ostringstream os;
    os << "# n=" << n_ << " basis=" << basis_ << " S=" << S_ << " tables=" << size_.size() << "\n";
    os << "size,count,cumulative\n";
    std::size_t cum = 0;
    for (auto [s, k] : histogram()) {
        cum += k;
        os << s << ',' << k << ',' << cum << '\n';
    }
    os << "unreached," << size_.size() - cum << ',' << size_.size() << '\n';
    return os.str();
}

Circuit CircuitCensus::circuit_for(const TruthTable& tt) const {
    if (!min_size(tt)) throw CensusIncomplete("table " + tt.str().str() + " not reached within size " + std::to_string(S_));
    Circuit c;
    c.n = n_;
    std::unordered_map<std::uint32_t, unsigned> node;
    node[0] = n_;
    node[full_mask(n_)] = n_ + 1;
    for (unsigned i = 0; i < n_; ++i) node[TruthTable::projection(n_, i).bits] = i;
    std::function<unsigned(std::uint32_t)> build = [&](std::uint32_t t) -> unsigned {
        if (auto it = node.find(t); it != node.end()) return it->second;
        const Origin& o = origin_[t];
        const auto op = static_cast<GateOp>(o.op);
        Circuit::Gate g{op, build(o.a), op == GateOp::Not ? 0u : build(o.b)};
        c.gates.push_back(g);
        const unsigned id = n_ + 2 + static_cast<unsigned>(c.gates.size()) - 1;
        node[t] = id;
        return id;
    };
    c.output = build(tt.bits);
    return c;
}

std::string CircuitCensus::cache_file_name(unsigned n, unsigned S) {
    return "census_n" + std::to_string(n) + "_S" + std::to_string(S) + "_" + kBasisName + ".bin";
}

// Layout (little-endian): magic "CMCENSUS", u32 version, u32 n, u32 basis
// length, basis bytes, u32 S, u64 count, then count records
// (u32 table, u8 size, u8 op, u32 a, u32 b) sorted by table.
void CircuitCensus::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write census cache " + path);
    os.write(kMagic, sizeof kMagic);
    put<std::uint32_t>(os, kCacheVersion);
    put<std::uint32_t>(os, n_);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(basis_.size()));
    os.write(basis_.data(), static_cast<std::streamsize>(basis_.size()));
    put<std::uint32_t>(os, S_);
    put<std::uint64_t>(os, reachable());
    for (std::size_t t = 0; t < size_.size(); ++t) {
        if (size_[t] < 0) continue;
        put<std::uint32_t>(os, static_cast<std::uint32_t>(t));
        put<std::uint8_t>(os, static_cast<std::uint8_t>(size_[t]));
        put<std::uint8_t>(os, origin_[t].op);
        put<std::uint32_t>(os, origin_[t].a);
        put<std::uint32_t>(os, origin_[t].b);
    }
    if (!os) throw std::runtime_error("failed writing census cache " + path);
}

CircuitCensus CircuitCensus::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open census cache " + path);
    char magic[8];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw std::runtime_error(path + " is not a census cache");
    if (get<std::uint32_t>(is) != kCacheVersion) throw std::runtime_error(path + ": unsupported census cache version");
    CircuitCensus c;
    c.n_ = get<std::uint32_t>(is);
    check_inputs(c.n_);
    const auto blen = get<std::uint32_t>(is);
    if (blen > 64) throw std::runtime_error(path + ": corrupt basis name");
    c.basis_.assign(blen, '\0');
    if (!is.read(c.basis_.data(), blen)) throw std::runtime_error("census cache truncated");
    if (c.basis_ != kBasisName) throw std::runtime_error(path + ": census built for basis " + c.basis_);
    c.S_ = get<std::uint32_t>(is);
    const auto count = get<std::uint64_t>(is);
    const std::size_t tables = std::size_t{1} << (1u << c.n_);
    if (count > tables) throw std::runtime_error(path + ": corrupt record count");
    c.size_.assign(tables, -1);
    c.origin_.assign(tables, {});
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto t = get<std::uint32_t>(is);
        const auto s = get<std::uint8_t>(is);
        Origin o;
        o.op = get<std::uint8_t>(is);
        o.a = get<std::uint32_t>(is);
        o.b = get<std::uint32_t>(is);
        if (t >= tables || s > c.S_) throw std::runtime_error(path + ": corrupt record");
        c.size_[t] = static_cast<std::int8_t>(s);
        c.origin_[t] = o;
    }
    return c;
}

CircuitCensus load_or_build_census(unsigned n, unsigned S, const std::string& cache_dir) {
    if (cache_dir.empty()) return build_census(n, S);
    namespace fs = std::filesystem;
    const fs::path path = fs::path(cache_dir) / CircuitCensus::cache_file_name(n, S);
    if (fs::exists(path)) {
        auto c = CircuitCensus::load(path.string());
        if (c.n() == n && c.max_size() == S) return c;
    }
    auto c = build_census(n, S);
    fs::create_directories(cache_dir);
    c.save(path.string());
    return c;
}

// --- DAG oracle -------------------------------------------------------------

std::vector<int> dag_enumeration_minima(unsigned n, unsigned max_gates) {
    if (n == 0 || n > 3) throw CapExceeded("DAG enumeration limited to 1 <= n <= 3");
    const std::uint32_t all = full_mask(n);
    const std::size_t tables = std::size_t{1} << (1u << n);
    std::vector<int> best(tables, -1);
    std::vector<std::uint32_t> nodes;
    for (unsigned i = 0; i < n; ++i) nodes.push_back(TruthTable::projection(n, i).bits);
    nodes.push_back(0);
    nodes.push_back(all);
    for (auto t : nodes) best[t] = 0;

    // A minimal circuit never computes the same function at two nodes, so
    // gates duplicating an existing node are skipped.
    std::function<void(unsigned, unsigned)> dfs = [&](unsigned used, unsigned limit) {
        if (used == limit) return;
        const std::size_t k = nodes.size();
        auto extend = [&](std::uint32_t t) {
            if (std::find(nodes.begin(), nodes.end(), t) != nodes.end()) return;
            if (best[t] < 0 || best[t] > static_cast<int>(used + 1)) best[t] = static_cast<int>(used + 1);
            nodes.push_back(t);
            dfs(used + 1, limit);
            nodes.pop_back();
        };
        for (std::size_t a = 0; a < k; ++a) {
            extend(~nodes[a] & all);
            for (std::size_t b = a + 1; b < k; ++b) {
                extend(nodes[a] & nodes[b]);
                extend(nodes[a] | nodes[b]);
            }
        }
    };
    for (unsigned limit = 1; limit <= max_gates; ++limit) {
        if (std::none_of(best.begin(), best.end(), [](int v) { return v < 0; })) break;
        dfs(0, limit);
    }
    return best;
}

// --- MCSP ---------------------------------------------------------------------

bool mcsp(const CircuitCensus& census, const TruthTable& tt, unsigned s) {
    const auto m = census.min_size(tt);
    if (m && *m <= s) return true;
    if (s > census.max_size())
        throw CensusIncomplete("MCSP at s = " + std::to_string(s) + " needs a census to that size (have " +
                               std::to_string(census.max_size()) + ")");
    return false;
}

WitnessRelation mcsp_relation(unsigned n, unsigned s) {
    check_inputs(n);
    const unsigned nodes = n + 2 + s;
    const unsigned w = static_cast<unsigned>(std::bit_width(nodes - 1));
    const std::size_t len = static_cast<std::size_t>(s) * (2 + 2 * w) + w;
    WitnessRelation rel;
    rel.name = "mcsp(n = " + std::to_string(n) + ", s = " + std::to_string(s) + ")";
    rel.witness_length = [len](std::size_t) { return len; };
    rel.verify = [n, s, w](const BitString& x, const BitString& y) {
        if (x.size() != (std::size_t{1} << n)) return false;
        std::size_t pos = 0;
        auto bits = [&](unsigned k) {
            unsigned v = 0;
            for (unsigned i = 0; i < k; ++i) v = (v << 1) | static_cast<unsigned>(y[pos++]);
            return v;
        };
        Circuit c;
        c.n = n;
        for (unsigned g = 0; g < s; ++g) {
            const unsigned op = bits(2);
            const unsigned a = bits(w), b = bits(w);
            const unsigned self = n + 2 + g;
            if (op == 3 || a >= self || b >= self) return false;
            // NOT ignores its second operand; pin it to 0 so witnesses stay canonical.
            if (op == 2 && b != 0) return false;
            c.gates.push_back({static_cast<GateOp>(op), a, b});
        }
        c.output = bits(w);
        if (c.output >= n + 2 + s) return false;
        return c.evaluate() == TruthTable::from_string(x);
    };
    rel.emit = [](const BitString& x, const BitString&) { return x; };
    return rel;
}

// --- Size bound and the MNP report ---------------------------------------------

unsigned size_bound_floor(unsigned n, const Dyadic& alpha) {
    if (n <= 1) throw DegenerateParameter("s(n) needs n >= 2 (log2 1 = 0 makes the bound degenerate)");
    if (alpha.sign() < 0) throw std::invalid_argument("alpha must be nonnegative");
    const mpq_class a = alpha.to_rational();
    const mpz_class two_n = mpz_class(1) << n;
    // s(n) >= k  <=>  alpha log2 n >= n (k n / 2^n - 1) =: R
    auto at_least = [&](unsigned long k) {
        mpq_class R = mpq_class(mpz_class(k) * n * n, two_n) - n;
        R.canonicalize();
        if (R <= 0) return true;
        if (a == 0) return false;
        mpq_class c = R / a;
        c.canonicalize();
        // log2 n >= p/q  <=>  n^q >= 2^p
        if (!c.get_num().fits_ulong_p() || !c.get_den().fits_ulong_p() || c.get_num() > 100000)
            throw CapExceeded("size bound exponent too large");
        mpz_class lhs, rhs;
        mpz_ui_pow_ui(lhs.get_mpz_t(), n, c.get_den().get_ui());
        mpz_ui_pow_ui(rhs.get_mpz_t(), 2, c.get_num().get_ui());
        return lhs >= rhs;
    };
    unsigned long k = 0;
    while (at_least(k + 1)) {
        if (++k > (1ul << 20)) throw CapExceeded("size bound too large");
    }
    return static_cast<unsigned>(k);
}

double size_bound_real(unsigned n, const Dyadic& alpha) {
    const double dn = n;
    return std::ldexp(1.0, static_cast<int>(n)) / dn * (1.0 + alpha.to_double() * std::log2(dn) / dn);
}

MnpReport mnp_cover_check(unsigned n, const Dyadic& alpha, const CircuitCensus& census) {
    if (n <= 1) throw DegenerateParameter("MNP cover check needs n >= 2");
    if (census.n() != n) throw std::invalid_argument("census arity differs from n");
    MnpReport r;
    r.n = n;
    r.alpha = alpha;
    r.s_real = size_bound_real(n, alpha);
    r.s_floor = size_bound_floor(n, alpha);
    if (r.s_floor > census.max_size())
        throw CensusIncomplete("s(" + std::to_string(n) + ") = " + std::to_string(r.s_floor) +
                               " exceeds the census bound " + std::to_string(census.max_size()));
    const unsigned rows = 1u << n;
    r.N = (std::uint64_t{1} << (n + 1)) - 1;
    r.table_count = census.count_at_most(r.s_floor);
    r.cover_size = mpz_class(r.table_count) << static_cast<mp_bitcnt_t>(r.N - rows);
    r.log2_cover_size = static_cast<double>(r.N - rows) + std::log2(static_cast<double>(r.table_count));
    r.f_N = (1.0 - alpha.to_double() / 2) * rows / n * std::log2(static_cast<double>(n));

    // log2 |A| < N - f(N)  <=>  count * n^e < 2^{2^n} with e = (1 - alpha/2) 2^n / n.
    mpq_class e = (mpq_class(1) - alpha.to_rational() / 2) * mpq_class(rows, n);
    e.canonicalize();
    const mpz_class p = e.get_num(), q = e.get_den();
    if (!q.fits_ulong_p() || abs(p) > 100000) throw CapExceeded("entropy exponent too large for the exact check");
    mpz_class lhs, rhs, np;
    mpz_pow_ui(lhs.get_mpz_t(), mpz_class(r.table_count).get_mpz_t(), q.get_ui());
    mpz_ui_pow_ui(rhs.get_mpz_t(), 2, static_cast<unsigned long>(rows) * q.get_ui());
    mpz_ui_pow_ui(np.get_mpz_t(), n, mpz_class(abs(p)).get_ui());
    if (p >= 0) lhs *= np;
    else rhs *= np;
    r.entropy_gap_holds = lhs < rhs;

    const long double s = r.s_real;
    const long double bound = s * std::log2(48.0L * std::exp(1.0L) * s);
    r.counting_bound_log2 = static_cast<double>(bound);
    r.counting_bound_holds = std::log2(static_cast<long double>(r.table_count)) <= bound;
    return r;
}

std::string MnpReport::to_json() const {
    nlohmann::ordered_json j;
    j["n"] = n;
    j["alpha"] = alpha.fraction();
    j["s_real"] = s_real;
    j["s_floor"] = s_floor;
    j["N"] = N;
    j["table_count"] = table_count;
    j["cover_size"] = cover_size.get_str();
    j["log2_cover_size"] = log2_cover_size;
    j["f_N"] = f_N;
    j["entropy_gap_holds"] = entropy_gap_holds;
    j["counting_bound_log2"] = counting_bound_log2;
    j["counting_bound_holds"] = counting_bound_holds;
    return j.dump(2);
}

// --- MCSP cover -----------------------------------------------------------------

McspCover mcsp_cover(const CircuitCensus& census, unsigned s) {
    McspCover c;
    c.n = census.n();
    c.s = s;
    c.N = (std::size_t{1} << (c.n + 1)) - 1;
    const unsigned rows = 1u << c.n;
    for (auto t : census.tables_at_most(s)) c.keys.push_back(table_key(t, rows));
    std::sort(c.keys.begin(), c.keys.end());
    return c;
}

bool McspCover::member(const BitString& x) const {
    if (x.size() != N) throw std::invalid_argument("MCSP cover is defined at level N = " + std::to_string(N));
    const unsigned rows = 1u << n;
    const auto key = static_cast<std::uint32_t>(x.suffix_from(N - rows).to_uint());
    return std::binary_search(keys.begin(), keys.end(), key);
}

mpz_class McspCover::size() const { return mpz_class(keys.size()) << static_cast<mp_bitcnt_t>(N - (1u << n)); }

CoverSpec McspCover::spec() const {
    CoverSpec spec;
    spec.name = "mcsp-cover(n = " + std::to_string(n) + ", s = " + std::to_string(s) + ")";
    spec.n = N;
    spec.counting_class = "SpanP";
    auto self = std::make_shared<McspCover>(*this);
    spec.member = [self](const BitString& x) { return self->member(x); };
    const std::size_t head = N - (std::size_t{1} << n);
    const unsigned rows = 1u << n;
    spec.counter = ExtensionCounter{N, [self, head, rows](const BitString& w) -> mpz_class {
        if (w.size() <= head)
            return mpz_class(self->keys.size()) << static_cast<mp_bitcnt_t>(head - w.size());
        const std::size_t l = w.size() - head;
        const std::uint64_t u = w.suffix_from(head).to_uint();
        const std::uint64_t lo = u << (rows - l), hi = (u + 1) << (rows - l);
        auto a = std::lower_bound(self->keys.begin(), self->keys.end(), lo);
        auto b = std::lower_bound(self->keys.begin(), self->keys.end(), hi);
        return mpz_class(static_cast<unsigned long>(b - a));
    }};
    return spec;
}

// --- Encoding -----------------------------------------------------------------

BitString encode_circuit(const Circuit& c) {
    const std::size_t s = c.gates.size();
    const std::size_t nodes = c.n + 2 + s;
    const std::size_t w = static_cast<std::size_t>(std::bit_width(nodes - 1));
    BitString p = BitString("111") + machine::gamma(c.n) + machine::gamma(s + 1);
    for (const auto& g : c.gates) {
        switch (g.op) {
            case GateOp::And: p = p + BitString("00"); break;
            case GateOp::Or: p = p + BitString("01"); break;
            case GateOp::Not: p = p + BitString("10"); break;
        }
        p = p + BitString::from_uint(g.a, w);
        if (g.op != GateOp::Not) p = p + BitString::from_uint(g.b, w);
    }
    return p + BitString::from_uint(c.output, w);
}

std::size_t encoding_length_bound(unsigned n, std::size_t s) {
    const std::size_t m = n + s;
    const std::size_t lg = m <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(m - 1));
    return (s + 1) * (kEncodingConstant + lg);
}

}  // namespace cmlab
