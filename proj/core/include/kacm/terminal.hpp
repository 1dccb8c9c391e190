#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace kacm {

/// Terminal function f on S extended by a cemetery value f(Delta).
class TerminalFunction {
public:
    enum class Kind { Constant, Indicator, Custom };

    /// f == 1 on S and at the cemetery.
    static TerminalFunction one();
    static TerminalFunction constant(double value, double cemetery);
    /// `inside` on [a, b], `outside` elsewhere on S.
    static TerminalFunction indicator(double a, double b, double inside, double outside, double cemetery);
    static TerminalFunction custom(std::function<double(double)> f, double cemetery,
                                   std::vector<double> breakpoints, std::string label);

    Kind kind() const { return kind_; }
    double operator()(double z) const;
    double cemetery() const { return cemetery_; }
    std::vector<double> breakpoints() const;

    /// Constant on S and at the cemetery with the same value.
    bool is_total_constant() const { return kind_ == Kind::Constant && value_ == cemetery_; }
    bool is_zero() const { return kind_ == Kind::Constant && value_ == 0.0 && cemetery_ == 0.0; }

    /// The constant value of f on the complement of (a, b), if f is
    /// structurally constant there (the cemetery is not consulted).
    std::optional<double> constant_outside(double a, double b) const;

    /// f on D = (a, b) with its exterior constant moved to the cemetery.
    /// Throws ArgumentError when f is not constant outside D.
    TerminalFunction for_part_process(double a, double b) const;

    std::string describe() const;

private:
    Kind kind_ = Kind::Constant;
    double value_ = 1.0;
    double outside_ = 0.0;
    double lower_ = 0.0;
    double upper_ = 0.0;
    double cemetery_ = 1.0;
    std::function<double(double)> custom_;
    std::vector<double> custom_breaks_;
    std::string label_;
};

}  // namespace kacm
