#include "kacm/terminal.hpp"

#include <cmath>
#include <sstream>

#include "kacm/errors.hpp"

namespace kacm {

TerminalFunction TerminalFunction::one() { return constant(1.0, 1.0); }

TerminalFunction TerminalFunction::constant(double value, double cemetery) {
    if (!std::isfinite(value) || !std::isfinite(cemetery) || cemetery < 0.0)
        throw ArgumentError("terminal values must be finite with f(Delta) >= 0");
    TerminalFunction f;
    f.kind_ = Kind::Constant;
    f.value_ = value;
    f.cemetery_ = cemetery;
    return f;
}

TerminalFunction TerminalFunction::indicator(double a, double b, double inside, double outside, double cemetery) {
    if (!(a < b)) throw ArgumentError("terminal indicator needs a < b");
    if (!std::isfinite(inside) || !std::isfinite(outside) || !std::isfinite(cemetery) || cemetery < 0.0)
        throw ArgumentError("terminal values must be finite with f(Delta) >= 0");
    TerminalFunction f;
    f.kind_ = Kind::Indicator;
    f.lower_ = a;
    f.upper_ = b;
    f.value_ = inside;
    f.outside_ = outside;
    f.cemetery_ = cemetery;
    return f;
}

TerminalFunction TerminalFunction::custom(std::function<double(double)> fn, double cemetery,
                                          std::vector<double> breakpoints, std::string label) {
    if (!fn) throw ArgumentError("custom terminal needs a callable");
    TerminalFunction f;
    f.kind_ = Kind::Custom;
    f.custom_ = std::move(fn);
    f.cemetery_ = cemetery;
    f.custom_breaks_ = std::move(breakpoints);
    f.label_ = std::move(label);
    return f;
}

double TerminalFunction::operator()(double z) const {
    switch (kind_) {
        case Kind::Constant: return value_;
        case Kind::Indicator: return (z >= lower_ && z <= upper_) ? value_ : outside_;
        case Kind::Custom: return custom_(z);
    }
    return 0.0;
}

std::vector<double> TerminalFunction::breakpoints() const {
    switch (kind_) {
        case Kind::Constant: return {};
        case Kind::Indicator: {
            std::vector<double> b;
            if (std::isfinite(lower_)) b.push_back(lower_);
            if (std::isfinite(upper_)) b.push_back(upper_);
            return b;
        }
        case Kind::Custom: return custom_breaks_;
    }
    return {};
}

std::optional<double> TerminalFunction::constant_outside(double a, double b) const {
    switch (kind_) {
        case Kind::Constant: return value_;
        case Kind::Indicator: {
            if (value_ == outside_) return value_;
            // exterior = (-inf, a] U [b, inf)
            const bool disjoint = upper_ < a || lower_ > b || (lower_ > a && upper_ < b);
            if (disjoint) return outside_;
            if (std::isinf(lower_) && std::isinf(upper_)) return value_;
            return std::nullopt;
        }
        case Kind::Custom: return std::nullopt;
    }
    return std::nullopt;
}

TerminalFunction TerminalFunction::for_part_process(double a, double b) const {
    const auto ext = constant_outside(a, b);
    if (!ext) throw ArgumentError("terminal function must be constant outside the killing domain");
    if (*ext < 0.0) throw ArgumentError("exterior terminal value must be >= 0");
    TerminalFunction f = *this;
    f.cemetery_ = *ext;
    return f;
}

std::string TerminalFunction::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case Kind::Constant: os << "const(" << value_ << ")"; break;
        case Kind::Indicator:
            os << "ind[" << lower_ << "," << upper_ << "](" << value_ << "," << outside_ << ")";
            break;
        case Kind::Custom: os << "custom(" << label_ << ")"; break;
    }
    os << ";cemetery=" << cemetery_;
    return os.str();
}

}  // namespace kacm
