#pragma once

// Tabulated Kac recursion shared by every moment operation.

#include <span>
#include <vector>

#include "kacm/kernels.hpp"
#include "kacm/measures.hpp"
#include "kacm/quadrature.hpp"
#include "kacm/quadrature_spec.hpp"
#include "kacm/terminal.hpp"

namespace kacm::detail {

/// Piecewise Lobatto panels plus isolated nodes. Node order: panel nodes
/// (panel-major, endpoints duplicated between neighbours) then points.
class SpaceGrid {
public:
    SpaceGrid() = default;

    static SpaceGrid single_point(double x);
    /// Grid covering the support of `target` (clipped to the space, unbounded
    /// supports padded around `anchors`), graded towards `singular` points,
    /// with every atom of `target` as an isolated node.
    static SpaceGrid for_measure(const TransitionKernel& k, const RevuzMeasure& target,
                                 std::span<const double> singular, std::span<const double> anchors,
                                 double t, const QuadratureSpec& spec);

    int size() const { return static_cast<int>(nodes_.size()); }
    double node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<quad::LobattoPanel>& panels() const { return panels_; }

    /// Index of the isolated node at exactly z, or -1.
    int find_point(double z) const;
    /// Node index of the isolated node at exactly z, or -1.
    int point_node(double z) const;
    double interpolate(const double* slice, double z) const;
    /// Index of the panel containing z (the left one at a shared endpoint), or -1.
    int panel_of(double z) const;
    /// Chebyshev coefficients of every panel's interpolant, panel-major,
    /// `panels()[p].size()` entries per panel starting at coefficient_offset(p).
    void coefficients(const double* slice, std::vector<double>& out) const;
    int coefficient_offset(int p) const { return offsets_[static_cast<std::size_t>(p)]; }
    /// Panel endpoints strictly inside (a, b), appended unsorted.
    void boundaries_in(double a, double b, std::vector<double>& out) const;

private:
    void finish();

    std::vector<quad::LobattoPanel> panels_;
    std::vector<int> offsets_;
    std::vector<double> points_;
    int point_offset_ = 0;
    std::vector<double> nodes_;
};

/// G(y, s) on a SpaceGrid x Chebyshev(sqrt s) grid, stored scaled by exp(log_scale).
struct Table {
    SpaceGrid grid;
    quad::ChebyshevNodes times;
    std::vector<double> values;  // values[node * times.size() + m]
    double log_scale = 0.0;
    double rel_error = 0.0;  // relative to the table maximum

    /// Values at remaining time tau for every node (unscaled units).
    void slice(double tau, std::vector<double>& out, std::vector<double>& scratch) const;
};

struct LevelResult {
    std::vector<double> values;  // [node * n_times + m]
    std::vector<double> errors;
};

/// One application of the Kac step to a tabulated G over mu.
LevelResult apply_step(const TransitionKernel& k, const RevuzMeasure& mu, const Table& prev,
                       const SpaceGrid& out_grid, std::span<const double> out_times, const QuadratureSpec& spec);

/// G_0(y, s) = E_y[f(X_s)] tabulated on the given grid.
Table terminal_table(const TransitionKernel& k, const TerminalFunction& f, const SpaceGrid& grid, double t,
                     const QuadratureSpec& spec);

/// Normalises raw level values into a Table (max |value| = 1).
Table make_table(SpaceGrid grid, const quad::ChebyshevNodes& times, LevelResult level, double prev_log_scale,
                 double prev_rel_error);

double terminal_expectation_impl(const TransitionKernel& k, const TerminalFunction& f, double s, double y,
                                 const QuadratureSpec& spec);

}  // namespace kacm::detail
