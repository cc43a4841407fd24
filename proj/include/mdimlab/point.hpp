#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace mdimlab {

struct Point;

// Scalar in [0,1].
struct RealPoint {
    double value = 0.0;
};

// Fraction of a full turn, normalized to [0,1).
struct AnglePoint {
    double value = 0.0;
};

// Infinite symbol sequence with an eventually-constant tail: an explicit
// prefix followed by `tail` repeated forever.  Stored normalized (no trailing
// prefix symbols equal to the tail) so representation equality coincides with
// equality of the infinite sequences.
struct WordPoint {
    std::vector<std::uint8_t> symbols;
    std::uint8_t tail = 0;
};

// Finite list of component points (product-space element truncated at the
// owning space's depth).
struct TuplePoint {
    std::vector<Point> components;
};

struct Point {
    std::variant<RealPoint, AnglePoint, WordPoint, TuplePoint> rep;

    static Point real(double v) { return Point{RealPoint{v}}; }

    static Point angle(double v) {
        double w = v - std::floor(v);
        if (w >= 1.0) w = 0.0; // floor rounding at the seam
        return Point{AnglePoint{w}};
    }

    static Point word(std::vector<std::uint8_t> symbols, std::uint8_t tail = 0) {
        while (!symbols.empty() && symbols.back() == tail) symbols.pop_back();
        return Point{WordPoint{std::move(symbols), tail}};
    }

    static Point tuple(std::vector<Point> components) {
        return Point{TuplePoint{std::move(components)}};
    }

    bool is_real() const { return std::holds_alternative<RealPoint>(rep); }
    bool is_angle() const { return std::holds_alternative<AnglePoint>(rep); }
    bool is_word() const { return std::holds_alternative<WordPoint>(rep); }
    bool is_tuple() const { return std::holds_alternative<TuplePoint>(rep); }

    double as_real() const {
        if (!is_real()) fail(errc::point_space_mismatch, "expected a real point");
        return std::get<RealPoint>(rep).value;
    }
    double as_angle() const {
        if (!is_angle()) fail(errc::point_space_mismatch, "expected an angle point");
        return std::get<AnglePoint>(rep).value;
    }
    const WordPoint& as_word() const {
        if (!is_word()) fail(errc::point_space_mismatch, "expected a word point");
        return std::get<WordPoint>(rep);
    }
    const std::vector<Point>& as_tuple() const {
        if (!is_tuple()) fail(errc::point_space_mismatch, "expected a tuple point");
        return std::get<TuplePoint>(rep).components;
    }

    friend bool operator==(const Point& a, const Point& b) {
        if (a.rep.index() != b.rep.index()) return false;
        if (a.is_real()) return a.as_real() == b.as_real();
        if (a.is_angle()) return a.as_angle() == b.as_angle();
        if (a.is_word()) {
            const auto& wa = a.as_word();
            const auto& wb = b.as_word();
            return wa.tail == wb.tail && wa.symbols == wb.symbols;
        }
        return a.as_tuple() == b.as_tuple();
    }
    friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }
};

// Symbol at 1-based position i of a word (the tail past the prefix).
inline std::uint8_t word_symbol(const WordPoint& w, std::size_t i) {
    if (i == 0) fail(errc::invalid_argument, "word positions are 1-based");
    return i <= w.symbols.size() ? w.symbols[i - 1] : w.tail;
}

inline std::string to_string(const Point& p) {
    std::ostringstream os;
    if (p.is_real()) {
        os << p.as_real();
    } else if (p.is_angle()) {
        os << p.as_angle() << " (mod 1)";
    } else if (p.is_word()) {
        const auto& w = p.as_word();
        os << '(';
        for (std::size_t i = 0; i < w.symbols.size(); ++i) os << int(w.symbols[i]) << ',';
        os << int(w.tail) << "...)";
    } else {
        os << '[';
        const auto& parts = p.as_tuple();
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i) os << ", ";
            os << to_string(parts[i]);
        }
        os << ']';
    }
    return os.str();
}

} // namespace mdimlab
