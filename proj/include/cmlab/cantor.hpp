#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmlab {

// A finite binary string, stored as '0'/'1' characters.
class BitString {
public:
    BitString() = default;
    explicit BitString(std::string bits);  // validates the alphabet
    // The length-`len` string whose bits are the binary expansion of `value`
    // (most significant bit first).
    static BitString from_uint(std::uint64_t value, std::size_t len);
    static BitString zeros(std::size_t len) { return BitString(std::string(len, '0')); }
    static BitString ones(std::size_t len) { return BitString(std::string(len, '1')); }

    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    int operator[](std::size_t i) const { return bits_[i] == '1'; }

    BitString prefix(std::size_t n) const;
    BitString suffix_from(std::size_t start) const;
    BitString child(int bit) const;
    BitString operator+(const BitString& o) const { return BitString(bits_ + o.bits_, Trusted{}); }
    void push_back(int bit) { bits_.push_back(bit ? '1' : '0'); }
    // Binary increment in place; returns false (leaving all zeros) on wrap-around.
    bool increment();

    bool is_prefix_of(const BitString& o) const;
    std::size_t count_ones() const;
    // Bits read as an unsigned integer (requires size() <= 64).
    std::uint64_t to_uint() const;

    const std::string& str() const { return bits_; }
    // Like str() but renders the empty string as the lambda symbol.
    std::string display() const { return bits_.empty() ? "λ" : bits_; }

    friend bool operator==(const BitString&, const BitString&) = default;
    friend auto operator<=>(const BitString& a, const BitString& b) { return a.bits_ <=> b.bits_; }

private:
    struct Trusted {};
    BitString(std::string bits, Trusted) : bits_(std::move(bits)) {}
    std::string bits_;
};

struct BitStringHash {
    std::size_t operator()(const BitString& b) const { return std::hash<std::string>()(b.str()); }
};

// All strings of length n in lexicographic order.
std::vector<BitString> all_strings(std::size_t n);

// Standard enumeration: s_0 = λ, s_1 = 0, s_2 = 1, s_3 = 00, ...
BitString string_index(std::uint64_t i);
std::uint64_t index_of(const BitString& x);
// |s_i| = floor(log2(i + 1))
std::size_t length_of_index(std::uint64_t i);

class HorizonExceeded : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// A decidable language restricted to an explicit horizon: only strings s_i
// with i < horizon may be queried.
class LanguageView {
public:
    using Predicate = std::function<bool(const BitString&)>;

    LanguageView(std::string name, Predicate member, std::uint64_t horizon);

    static LanguageView from_members(const std::vector<BitString>& members, std::uint64_t horizon,
                                     std::string name = "explicit");
    static LanguageView from_indices(const std::vector<std::uint64_t>& indices, std::uint64_t horizon,
                                     std::string name = "explicit");
    static LanguageView everything(std::uint64_t horizon);
    static LanguageView nothing(std::uint64_t horizon);

    bool contains(const BitString& x) const;
    bool contains_index(std::uint64_t i) const;
    std::uint64_t horizon() const { return horizon_; }
    const std::string& name() const { return name_; }
    // Members among s_0 .. s_{horizon-1}, in enumeration order.
    std::vector<BitString> members() const;

private:
    std::string name_;
    Predicate member_;
    std::uint64_t horizon_;
};

// c_B(n) = |B ∩ {s_0, ..., s_{n-1}}|
std::uint64_t census(const LanguageView& B, std::uint64_t n);
// L(w) = { s_i : w[i] = 1 }, horizon |w|.
LanguageView language_of(const BitString& w);
// A↾n: bit i is 1 iff s_i ∈ A.
BitString char_prefix(const LanguageView& A, std::uint64_t n);

}  // namespace cmlab
