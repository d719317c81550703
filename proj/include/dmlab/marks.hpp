#pragma once
// Mark labels. Complex marks are 1..l. Real marks i+ and i- are encoded as
// 2i-1 and 2i, which gives the fixed order 1+ < 1- < 2+ < 2- < ...

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "dmlab/errors.hpp"

namespace dmlab {

using Mark = int;
using MarkMask = std::uint64_t;  // bit m set <=> mark m present

constexpr int kMaxMarkCode = 62;

inline MarkMask bit(Mark m) { return MarkMask(1) << m; }

inline int popcount(MarkMask m) { return std::popcount(m); }

inline std::vector<Mark> mask_to_marks(MarkMask m) {
    std::vector<Mark> out;
    while (m) {
        int b = std::countr_zero(m);
        out.push_back(b);
        m &= m - 1;
    }
    return out;
}

inline MarkMask marks_to_mask(const std::vector<Mark>& v) {
    MarkMask m = 0;
    for (Mark x : v) m |= bit(x);
    return m;
}

inline Mark plus(int i) { return 2 * i - 1; }
inline Mark minus(int i) { return 2 * i; }
inline Mark bar(Mark m) { return (m % 2 == 1) ? m + 1 : m - 1; }
inline int pair_index(Mark m) { return (m + 1) / 2; }
inline bool is_plus(Mark m) { return m % 2 == 1; }

inline MarkMask bar_mask(MarkMask m) {
    MarkMask minus_bits = m & 0x5555555555555555ULL;  // even codes
    MarkMask plus_bits = m & 0xAAAAAAAAAAAAAAAAULL;   // odd codes
    return (plus_bits << 1) | (minus_bits >> 1);
}

// Universe of marks: [l] or [l^+-].
struct MarkSpace {
    int ell = 0;
    bool real = false;

    int count() const { return real ? 2 * ell : ell; }
    MarkMask all() const {
        int n = count();
        return ((MarkMask(1) << (n + 1)) - 1) & ~MarkMask(1);
    }
    std::vector<Mark> marks() const { return mask_to_marks(all()); }

    std::string label(Mark m) const {
        if (!real) return std::to_string(m);
        return std::to_string(pair_index(m)) + (is_plus(m) ? "+" : "-");
    }
    Mark parse(const std::string& s) const {
        if (s.empty()) throw ParseError("empty mark label");
        if (real) {
            char sg = s.back();
            if (sg != '+' && sg != '-') throw ParseError("real mark needs sign: '" + s + "'");
            int i = std::stoi(s.substr(0, s.size() - 1));
            if (i < 1 || i > ell) throw ParseError("mark out of range: '" + s + "'");
            return sg == '+' ? plus(i) : minus(i);
        }
        int i = std::stoi(s);
        if (i < 1 || i > ell) throw ParseError("mark out of range: '" + s + "'");
        return i;
    }
    std::string label_set(MarkMask m) const {
        std::string s = "{";
        bool first = true;
        for (Mark x : mask_to_marks(m)) {
            if (!first) s += ",";
            s += label(x);
            first = false;
        }
        return s + "}";
    }
};

}  // namespace dmlab
