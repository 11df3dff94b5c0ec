#include "cmlab/machine.hpp"

#include <bit>
#include <stdexcept>
#include <vector>

namespace cmlab::machine {

namespace {

struct Diverge {
    std::string reason;
};

class Interpreter {
public:
    Interpreter(const BitString& prog, std::uint64_t budget) : prog_(prog), budget_(budget) {}

    std::uint64_t steps() const { return steps_; }

    // Runs prog[pos, end) and appends to out.
    void exec(std::size_t pos, std::size_t end, std::string& out) {
        if (pos >= end) throw Diverge{"empty program"};
        if (read(pos, end) == 0) {  // literal
            for (std::size_t i = pos; i < end; ++i) {
                tick(2);  // read the bit, print it
                out.push_back(prog_[i] ? '1' : '0');
            }
            return;
        }
        if (read(pos, end) == 0) {  // repeat
            std::uint64_t k = read_gamma(pos, end);
            std::uint64_t before = steps_;
            std::string body;
            exec(pos, end, body);
            std::uint64_t per = steps_ - before;
            // The remaining k - 1 iterations cost the same again.
            if (k > 1) {
                std::uint64_t room = budget_ - steps_;
                if (per != 0 && (k - 1) > room / per) throw Diverge{"budget exhausted"};
                steps_ += (k - 1) * per;
            }
            for (std::uint64_t i = 0; i < k; ++i) out += body;
            return;
        }
        if (read(pos, end) == 0) {  // pair
            std::uint64_t len = read_gamma(pos, end);
            if (len > end - pos) throw Diverge{"pair length beyond program"};
            exec(pos, pos + len, out);
            exec(pos + len, end, out);
            return;
        }
        circuit(pos, end, out);
    }

private:
    void tick(std::uint64_t k = 1) {
        if (budget_ - steps_ < k || steps_ > budget_) throw Diverge{"budget exhausted"};
        steps_ += k;
    }

    int read(std::size_t& pos, std::size_t end) {
        if (pos >= end) throw Diverge{"truncated program"};
        tick();
        return prog_[pos++];
    }

    std::uint64_t read_bits(std::size_t& pos, std::size_t end, unsigned width) {
        std::uint64_t v = 0;
        for (unsigned i = 0; i < width; ++i) v = (v << 1) | static_cast<std::uint64_t>(read(pos, end));
        return v;
    }

    std::uint64_t read_gamma(std::size_t& pos, std::size_t end) {
        unsigned zeros = 0;
        while (read(pos, end) == 0)
            if (++zeros > 40) throw Diverge{"gamma code too long"};
        return (std::uint64_t{1} << zeros) | read_bits(pos, end, zeros);
    }

    void circuit(std::size_t pos, std::size_t end, std::string& out) {
        const std::uint64_t n = read_gamma(pos, end);
        const std::uint64_t s = read_gamma(pos, end) - 1;
        if (n > 6 || s > 64) throw Diverge{"circuit too large for the toy machine"};
        const std::uint64_t nodes = n + 2 + s;
        const unsigned w = static_cast<unsigned>(std::bit_width(nodes - 1));
        const std::uint64_t rows = std::uint64_t{1} << n;
        // Node values as bit masks over the truth-table rows.
        std::vector<std::uint64_t> val(nodes, 0);
        const std::uint64_t all = rows == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << rows) - 1;
        for (std::uint64_t i = 0; i < n; ++i)
            for (std::uint64_t r = 0; r < rows; ++r)
                if ((r >> (n - 1 - i)) & 1u) val[i] |= std::uint64_t{1} << r;
        val[n + 1] = all;
        for (std::uint64_t g = 0; g < s; ++g) {
            const std::uint64_t self = n + 2 + g;
            int op = read(pos, end) << 1;
            op |= read(pos, end);
            if (op == 3) throw Diverge{"unknown gate opcode"};
            std::uint64_t a = read_bits(pos, end, w);
            if (a >= self) throw Diverge{"gate operand refers forward"};
            if (op == 2) {
                val[self] = ~val[a] & all;
            } else {
                std::uint64_t b = read_bits(pos, end, w);
                if (b >= self) throw Diverge{"gate operand refers forward"};
                val[self] = op == 0 ? (val[a] & val[b]) : (val[a] | val[b]);
            }
            tick(rows);
        }
        std::uint64_t o = read_bits(pos, end, w);
        if (o >= nodes) throw Diverge{"output node out of range"};
        if (pos != end) throw Diverge{"trailing bits after circuit"};
        for (std::uint64_t r = 0; r < rows; ++r) {
            tick();
            out.push_back(((val[o] >> r) & 1u) ? '1' : '0');
        }
    }

    const BitString& prog_;
    std::uint64_t budget_;
    std::uint64_t steps_ = 0;
};

}  // namespace

RunResult run(const BitString& program, std::uint64_t budget) {
    RunResult res;
    Interpreter it(program, budget);
    std::string out;
    try {
        it.exec(0, program.size(), out);
        res.halted = true;
        res.output = BitString(std::move(out));
    } catch (const Diverge& d) {
        res.reason = d.reason;
    }
    res.steps = it.steps();
    return res;
}

BitString gamma(std::uint64_t k) {
    if (k == 0) throw std::invalid_argument("gamma code needs k >= 1");
    std::size_t len = static_cast<std::size_t>(std::bit_width(k));
    return BitString::zeros(len - 1) + BitString::from_uint(k, len);
}

BitString literal(const BitString& x) { return BitString("0") + x; }

BitString repeat(std::uint64_t k, const BitString& body) { return BitString("10") + gamma(k) + body; }

BitString pair(const BitString& p1, const BitString& p2) {
    if (p1.empty()) throw std::invalid_argument("pair needs a nonempty first program");
    return BitString("110") + gamma(p1.size()) + p1 + p2;
}

std::string version_tag() { return "toy-v" + std::to_string(kVersion); }

}  // namespace cmlab::machine
