#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace kacm::quad {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    bool converged = true;
};

/// One 15-point Kronrod panel with its embedded 7-point Gauss estimate.
/// `error` follows QUADPACK: resasc * min(1, (200 |K15 - G7| / resasc)^1.5),
/// with resasc = int |f - mean f| by the Kronrod rule.
struct PanelSum {
    double kronrod = 0.0;
    double gauss = 0.0;
    double resasc = 0.0;
    double error() const;
};

/// The QUADPACK scaling of a Kronrod/Gauss difference.
double kronrod_error(double diff, double resasc);

/// Kronrod abscissae on [-1, 1] (symmetric, 8 values from the edge to 0)
/// and the matching Kronrod and Gauss weights.
struct GaussKronrod15 {
    static constexpr int kPoints = 15;
    static const double abscissae[8];
    static const double kronrod_weights[8];
    static const double gauss_weights[4];

    /// Maps the 15 nodes onto [a, b] in a fixed order; nodes()[i] pairs
    /// with kronrod_weight(i) and gauss_weight(i) (zero for Kronrod-only nodes).
    static void nodes(double a, double b, double* out);
    static double kronrod_weight(int i);
    static double gauss_weight(int i);

    template <class F>
    static PanelSum apply(F&& f, double a, double b) {
        const double c = 0.5 * (a + b);
        const double h = 0.5 * (b - a);
        const double fc = f(c);
        double lo[7], hi[7];
        PanelSum s;
        s.kronrod = fc * kronrod_weights[7];
        s.gauss = fc * gauss_weights[3];
        for (int j = 0; j < 7; ++j) {
            const double dx = h * abscissae[j];
            lo[j] = f(c - dx);
            hi[j] = f(c + dx);
            const double fsum = lo[j] + hi[j];
            s.kronrod += kronrod_weights[j] * fsum;
            if (j % 2 == 1) s.gauss += gauss_weights[j / 2] * fsum;
        }
        const double mean = 0.5 * s.kronrod;
        double asc = kronrod_weights[7] * std::abs(fc - mean);
        for (int j = 0; j < 7; ++j) asc += kronrod_weights[j] * (std::abs(lo[j] - mean) + std::abs(hi[j] - mean));
        s.kronrod *= h;
        s.gauss *= h;
        s.resasc = std::abs(h) * asc;
        return s;
    }
};

/// Globally adaptive Gauss-Kronrod integration on a finite interval
/// (bisects the panel with the largest error until the total error meets
/// max(abs_tol, rel_tol * |I|) or the panel budget is exhausted).
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-10, double abs_tol = 1e-14, int max_panels = 2000);

/// As integrate(), but splits [a, b] at the given interior points first.
QuadResult integrate_split(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breaks, double rel_tol = 1e-10,
                           double abs_tol = 1e-14, int max_panels = 4000);

/// Integration over a possibly infinite interval; infinite ends are mapped
/// through x = c + s / (1 - s^2).
QuadResult integrate_line(const std::function<double(double)>& f, double a, double b,
                          std::span<const double> breaks = {}, double rel_tol = 1e-10,
                          double abs_tol = 1e-14);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Interpolant on Chebyshev points of the first kind mapped to [0, length]
/// (interior nodes only, so endpoint jumps never enter the data).
class ChebyshevNodes {
public:
    ChebyshevNodes() = default;
    ChebyshevNodes(int n, double length);

    int size() const { return static_cast<int>(nodes_.size()); }
    double length() const { return length_; }
    double node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    std::span<const double> nodes() const { return nodes_; }

    /// Barycentric weights of the interpolant through `values` at r.
    /// Writes size() coefficients into `coeffs` summing to one.
    void weights_at(double r, std::span<double> coeffs) const;
    double interpolate(std::span<const double> values, double r) const;

    /// Magnitude of the two highest Chebyshev coefficients of `values`.
    double tail_estimate(std::span<const double> values) const;

private:
    std::vector<double> nodes_;
    std::vector<double> bary_;
    double length_ = 0.0;
};

/// Chebyshev-Lobatto nodes on [a, b] (endpoints included) with barycentric
/// interpolation, used as one panel of a piecewise spatial grid.
class LobattoPanel {
public:
    LobattoPanel(double a, double b, int n);

    double lower() const { return a_; }
    double upper() const { return b_; }
    int size() const { return n_; }
    double node(int i) const;
    double interpolate(const double* values, double z) const;

    /// Chebyshev coefficients of the interpolant through `values`, in the
    /// panel variable xi = (2z - a - b) / (b - a).
    void chebyshev_coefficients(const double* values, double* coeffs) const;
    double to_reference(double z) const { return (2.0 * z - a_ - b_) / (b_ - a_); }
    /// Clenshaw evaluation of sum_j c_j T_j(xi).
    static double clenshaw(const double* coeffs, int n, double xi) {
        double b1 = 0.0, b2 = 0.0;
        const double x2 = 2.0 * xi;
        for (int j = n - 1; j >= 1; --j) {
            const double b0 = coeffs[j] + x2 * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        return coeffs[0] + xi * b1 - b2;
    }

private:
    double a_;
    double b_;
    int n_;
    const double* ref_;
    const double* to_cheb_;  // n x n, row j gives c_j
};

}  // namespace kacm::quad
