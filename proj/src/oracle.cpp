#include "cmlab/oracle.hpp"

#include <memory>
#include <set>
#include <unordered_set>

namespace cmlab {

const char* to_string(CountMode m) {
    switch (m) {
        case CountMode::WitnessCount: return "witness";
        case CountMode::DistinctOutputCount: return "span";
        case CountMode::AcceptMinusReject: return "gap";
    }
    return "?";
}

CountMode parse_count_mode(const std::string& s) {
    if (s == "witness" || s == "sharp") return CountMode::WitnessCount;
    if (s == "span" || s == "distinct") return CountMode::DistinctOutputCount;
    if (s == "gap") return CountMode::AcceptMinusReject;
    throw std::invalid_argument("unknown count mode '" + s + "' (expected witness|span|gap)");
}

std::int64_t count(const WitnessRelation& rel, CountMode mode, const BitString& x, std::size_t cap) {
    const std::size_t k = rel.witness_length(x.size());
    if (k > cap)
        throw CapExceeded("relation '" + rel.name + "' needs " + std::to_string(k) + "-bit witnesses on |x| = " +
                          std::to_string(x.size()) + "; cap is " + std::to_string(cap));
    if (mode == CountMode::DistinctOutputCount && !rel.emit)
        throw std::invalid_argument("relation '" + rel.name + "' has no emit function; span mode unavailable");

    std::int64_t accepts = 0;
    std::unordered_set<BitString, BitStringHash> outputs;
    BitString y = BitString::zeros(k);
    do {
        if (rel.verify(x, y)) {
            ++accepts;
            if (mode == CountMode::DistinctOutputCount) outputs.insert(rel.emit(x, y));
        }
    } while (y.increment());

    switch (mode) {
        case CountMode::WitnessCount: return accepts;
        case CountMode::DistinctOutputCount: return static_cast<std::int64_t>(outputs.size());
        case CountMode::AcceptMinusReject: return 2 * accepts - (std::int64_t{1} << k);
    }
    return 0;
}

bool decide_unique(const WitnessRelation& rel, const BitString& x, std::size_t cap) {
    std::int64_t c = count(rel, CountMode::WitnessCount, x, cap);
    if (c > 1)
        throw UniquenessViolation("relation '" + rel.name + "' has " + std::to_string(c) + " witnesses on x = '" +
                                  x.str() + "'");
    return c == 1;
}

CountingFunction counting_function(WitnessRelation rel, CountMode mode, std::size_t cap) {
    auto r = std::make_shared<WitnessRelation>(std::move(rel));
    return [r, mode, cap](const BitString& x) { return count(*r, mode, x, cap); };
}

WitnessRelation ksat_relation(std::size_t vars) {
    if (vars == 0) throw std::invalid_argument("ksat relation needs at least one variable");
    WitnessRelation rel;
    rel.name = "ksat/" + std::to_string(vars);
    rel.witness_length = [vars](std::size_t) { return vars; };
    rel.verify = [vars](const BitString& x, const BitString& y) {
        const std::size_t width = 2 * vars;
        if (x.size() % width != 0) return false;
        for (std::size_t c = 0; c < x.size(); c += width) {
            bool sat = false;
            for (std::size_t v = 0; v < vars; ++v) {
                int pos = x[c + 2 * v], neg = x[c + 2 * v + 1];
                if (pos && neg) return false;
                if ((pos && y[v]) || (neg && !y[v])) sat = true;
            }
            if (!sat) return false;
        }
        return true;
    };
    rel.emit = [](const BitString&, const BitString& y) { return y; };
    return rel;
}

BitString encode_cnf(std::size_t vars, const std::vector<std::vector<int>>& clauses) {
    BitString out;
    for (const auto& clause : clauses) {
        std::string block(2 * vars, '0');
        for (int lit : clause) {
            std::size_t v = static_cast<std::size_t>(lit > 0 ? lit : -lit);
            if (v == 0 || v > vars) throw std::invalid_argument("literal out of range in CNF");
            block[2 * (v - 1) + (lit > 0 ? 0 : 1)] = '1';
        }
        out = out + BitString(block);
    }
    return out;
}

WitnessRelation finite_set_relation(const std::vector<BitString>& members, std::string name) {
    auto set = std::make_shared<std::set<BitString>>(members.begin(), members.end());
    WitnessRelation rel;
    rel.name = std::move(name);
    rel.witness_length = [](std::size_t) { return std::size_t{0}; };
    rel.verify = [set](const BitString& x, const BitString&) { return set->count(x) > 0; };
    rel.emit = [](const BitString& x, const BitString&) { return x; };
    return rel;
}

}  // namespace cmlab
