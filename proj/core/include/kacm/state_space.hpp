#pragma once

#include <string>

namespace kacm {

enum class SpaceKind { FullLine, HalfLine, Interval };
enum class Boundary { None, Reflecting, Killing };

/// A closed, half-open or open subset of the real line. Killing endpoints
/// are excluded from the space, reflecting endpoints belong to it.
class StateSpace {
public:
    static StateSpace full_line();
    static StateSpace half_line(double lower, Boundary lower_bc);
    static StateSpace interval(double lower, double upper, Boundary lower_bc, Boundary upper_bc);

    SpaceKind kind() const { return kind_; }
    double lower() const { return lower_; }
    double upper() const { return upper_; }
    Boundary lower_boundary() const { return lower_bc_; }
    Boundary upper_boundary() const { return upper_bc_; }

    bool contains(double x) const;
    bool interior(double x) const { return x > lower_ && x < upper_; }
    bool bounded() const { return kind_ == SpaceKind::Interval; }
    /// Closest point of the space's closure.
    double clamp(double x) const;

    std::string describe() const;

    bool operator==(const StateSpace&) const = default;

private:
    StateSpace(SpaceKind kind, double lower, double upper, Boundary lbc, Boundary ubc);

    SpaceKind kind_;
    double lower_;
    double upper_;
    Boundary lower_bc_;
    Boundary upper_bc_;
};

}  // namespace kacm
