#include "kacm/state_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kacm/errors.hpp"

namespace kacm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

const char* boundary_name(Boundary b) {
    switch (b) {
        case Boundary::None: return "none";
        case Boundary::Reflecting: return "reflecting";
        case Boundary::Killing: return "killing";
    }
    return "?";
}
}  // namespace

StateSpace::StateSpace(SpaceKind kind, double lower, double upper, Boundary lbc, Boundary ubc)
    : kind_(kind), lower_(lower), upper_(upper), lower_bc_(lbc), upper_bc_(ubc) {
    if (!(lower < upper)) throw ArgumentError("state space requires lower < upper");
    if (std::isinf(lower) && lbc != Boundary::None)
        throw ArgumentError("infinite endpoint cannot carry a boundary condition");
    if (std::isinf(upper) && ubc != Boundary::None)
        throw ArgumentError("infinite endpoint cannot carry a boundary condition");
    if (std::isfinite(lower) && lbc == Boundary::None)
        throw ArgumentError("finite endpoint needs a reflecting or killing boundary");
    if (std::isfinite(upper) && ubc == Boundary::None)
        throw ArgumentError("finite endpoint needs a reflecting or killing boundary");
}

StateSpace StateSpace::full_line() {
    return {SpaceKind::FullLine, -kInf, kInf, Boundary::None, Boundary::None};
}

StateSpace StateSpace::half_line(double lower, Boundary lower_bc) {
    if (!std::isfinite(lower)) throw ArgumentError("half-line needs a finite lower endpoint");
    return {SpaceKind::HalfLine, lower, kInf, lower_bc, Boundary::None};
}

StateSpace StateSpace::interval(double lower, double upper, Boundary lower_bc, Boundary upper_bc) {
    if (!std::isfinite(lower) || !std::isfinite(upper))
        throw ArgumentError("interval needs two finite endpoints");
    return {SpaceKind::Interval, lower, upper, lower_bc, upper_bc};
}

bool StateSpace::contains(double x) const {
    if (std::isnan(x)) return false;
    const bool lo_ok = lower_bc_ == Boundary::Killing ? x > lower_ : x >= lower_;
    const bool hi_ok = upper_bc_ == Boundary::Killing ? x < upper_ : x <= upper_;
    return lo_ok && hi_ok;
}

double StateSpace::clamp(double x) const { return std::clamp(x, lower_, upper_); }

std::string StateSpace::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case SpaceKind::FullLine: os << "R"; break;
        case SpaceKind::HalfLine:
            os << "[" << lower_ << ",inf) " << boundary_name(lower_bc_);
            break;
        case SpaceKind::Interval:
            os << "(" << lower_ << "," << upper_ << ") " << boundary_name(lower_bc_) << "/"
               << boundary_name(upper_bc_);
            break;
    }
    return os.str();
}

}  // namespace kacm
