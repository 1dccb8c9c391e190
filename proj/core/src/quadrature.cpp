#include "kacm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>

namespace kacm::quad {

const double GaussKronrod15::abscissae[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

const double GaussKronrod15::kronrod_weights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

const double GaussKronrod15::gauss_weights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

double kronrod_error(double diff, double resasc) {
    diff = std::abs(diff);
    if (resasc == 0.0 || diff == 0.0) return diff;
    return resasc * std::min(1.0, std::pow(200.0 * diff / resasc, 1.5));
}

double PanelSum::error() const { return kronrod_error(kronrod - gauss, resasc); }

// Node order: index 0 is the centre, then pairs (c - dx_j, c + dx_j) for j = 0..6.
void GaussKronrod15::nodes(double a, double b, double* out) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    out[0] = c;
    for (int j = 0; j < 7; ++j) {
        out[1 + 2 * j] = c - h * abscissae[j];
        out[2 + 2 * j] = c + h * abscissae[j];
    }
}

double GaussKronrod15::kronrod_weight(int i) {
    return i == 0 ? kronrod_weights[7] : kronrod_weights[(i - 1) / 2];
}

double GaussKronrod15::gauss_weight(int i) {
    if (i == 0) return gauss_weights[3];
    const int j = (i - 1) / 2;
    return j % 2 == 1 ? gauss_weights[j / 2] : 0.0;
}

namespace {

struct Panel {
    double a;
    double b;
    PanelSum sum;
    bool operator<(const Panel& o) const { return sum.error() < o.sum.error(); }
};

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_tol, int max_panels) {
    QuadResult r;
    if (a == b) return r;
    std::priority_queue<Panel> heap;
    Panel first{a, b, GaussKronrod15::apply(f, a, b)};
    double total = first.sum.kronrod;
    double err = first.sum.error();
    heap.push(first);
    int panels = 1;
    while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (panels >= max_panels) {
            r.converged = false;
            break;
        }
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // cannot split any further in floating point
            r.converged = false;
            heap.push(worst);
            break;
        }
        Panel left{worst.a, mid, GaussKronrod15::apply(f, worst.a, mid)};
        Panel right{mid, worst.b, GaussKronrod15::apply(f, mid, worst.b)};
        total += left.sum.kronrod + right.sum.kronrod - worst.sum.kronrod;
        err += left.sum.error() + right.sum.error() - worst.sum.error();
        heap.push(left);
        heap.push(right);
        ++panels;
    }
    // re-sum from the panels to shed the drift of incremental updates
    total = 0.0;
    err = 0.0;
    while (!heap.empty()) {
        total += heap.top().sum.kronrod;
        err += heap.top().sum.error();
        heap.pop();
    }
    r.value = total;
    r.abs_error = err;
    return r;
}

QuadResult integrate_split(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breaks, double rel_tol, double abs_tol,
                           int max_panels) {
    std::vector<double> pts{a};
    for (double p : breaks)
        if (p > a && p < b) pts.push_back(p);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    QuadResult r;
    const int per = std::max(50, max_panels / static_cast<int>(pts.size()));
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto piece = integrate(f, pts[i], pts[i + 1], rel_tol, abs_tol, per);
        r.value += piece.value;
        r.abs_error += piece.abs_error;
        r.converged = r.converged && piece.converged;
    }
    return r;
}

QuadResult integrate_line(const std::function<double(double)>& f, double a, double b,
                          std::span<const double> breaks, double rel_tol, double abs_tol) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> finite;
    for (double p : breaks)
        if (p > a && p < b) finite.push_back(p);
    std::sort(finite.begin(), finite.end());
    QuadResult r;
    double lo = a;
    double hi = b;
    if (a == -inf) {
        const double c = finite.empty() ? (b == inf ? 0.0 : b) : finite.front();
        // x = c - s / (1 - s^2), s in [0, 1)
        auto g = [&](double s) {
            const double d = 1.0 - s * s;
            const double x = c - s / d;
            const double jac = (1.0 + s * s) / (d * d);
            const double v = f(x);
            return v == 0.0 ? 0.0 : v * jac;
        };
        auto piece = integrate(g, 0.0, 1.0, rel_tol, abs_tol);
        r.value += piece.value;
        r.abs_error += piece.abs_error;
        r.converged = r.converged && piece.converged;
        lo = c;
    }
    if (b == inf) {
        const double c = finite.empty() ? lo : finite.back();
        auto g = [&](double s) {
            const double d = 1.0 - s * s;
            const double x = c + s / d;
            const double jac = (1.0 + s * s) / (d * d);
            const double v = f(x);
            return v == 0.0 ? 0.0 : v * jac;
        };
        auto piece = integrate(g, 0.0, 1.0, rel_tol, abs_tol);
        r.value += piece.value;
        r.abs_error += piece.abs_error;
        r.converged = r.converged && piece.converged;
        hi = c;
    }
    if (hi > lo) {
        auto piece = integrate_split(f, lo, hi, finite, rel_tol, abs_tol);
        r.value += piece.value;
        r.abs_error += piece.abs_error;
        r.converged = r.converged && piece.converged;
    }
    return r;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        nodes[lo] = -x;
        nodes[hi] = x;
        weights[lo] = weights[hi] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

ChebyshevNodes::ChebyshevNodes(int n, double length) : length_(length) {
    nodes_.resize(static_cast<std::size_t>(n));
    bary_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double theta = std::numbers::pi * (2.0 * i + 1.0) / (2.0 * n);
        // ascending order in r
        nodes_[static_cast<std::size_t>(n - 1 - i)] = 0.5 * length * (1.0 + std::cos(theta));
        bary_[static_cast<std::size_t>(n - 1 - i)] = (i % 2 == 0 ? 1.0 : -1.0) * std::sin(theta);
    }
}

void ChebyshevNodes::weights_at(double r, std::span<double> coeffs) const {
    const std::size_t n = nodes_.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (r == nodes_[i]) {
            std::fill(coeffs.begin(), coeffs.end(), 0.0);
            coeffs[i] = 1.0;
            return;
        }
    }
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        coeffs[i] = bary_[i] / (r - nodes_[i]);
        denom += coeffs[i];
    }
    for (std::size_t i = 0; i < n; ++i) coeffs[i] /= denom;
}

double ChebyshevNodes::interpolate(std::span<const double> values, double r) const {
    double num = 0.0;
    double denom = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const double d = r - nodes_[i];
        if (d == 0.0) return values[i];
        const double w = bary_[i] / d;
        num += w * values[i];
        denom += w;
    }
    return num / denom;
}

double ChebyshevNodes::tail_estimate(std::span<const double> values) const {
    // nodes_ are stored in ascending r, i.e. reversed theta order
    const int n = size();
    if (n < 3) return 0.0;
    double tail = 0.0;
    for (int k = n - 2; k < n; ++k) {
        double c = 0.0;
        for (int i = 0; i < n; ++i) {
            const double theta = std::numbers::pi * (2.0 * i + 1.0) / (2.0 * n);
            c += values[static_cast<std::size_t>(n - 1 - i)] * std::cos(k * theta);
        }
        tail += std::abs(2.0 * c / n);
    }
    return tail;
}

namespace {

const std::vector<double>& lobatto_reference(int n) {
    static std::mutex mu;
    static std::map<int, std::vector<double>> cache;
    std::lock_guard lock(mu);
    auto& ref = cache[n];
    if (ref.empty()) {
        ref.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            ref[static_cast<std::size_t>(i)] = -std::cos(std::numbers::pi * i / (n - 1));
        ref.front() = -1.0;
        ref.back() = 1.0;
    }
    return ref;
}

// Discrete Chebyshev transform on the Lobatto points:
// c_j = (2 / (n - 1)) sum'' f_i T_j(x_i), first and last terms (in i and j) halved.
const std::vector<double>& lobatto_to_chebyshev(int n) {
    static std::mutex mu;
    static std::map<int, std::vector<double>> cache;
    std::lock_guard lock(mu);
    auto& mat = cache[n];
    if (mat.empty()) {
        mat.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double theta = std::numbers::pi * i / (n - 1);
                // x_i = -cos(theta_i), so T_j(x_i) = (-1)^j cos(j theta_i)
                double v = (j % 2 == 0 ? 1.0 : -1.0) * std::cos(j * theta) * 2.0 / (n - 1);
                if (i == 0 || i == n - 1) v *= 0.5;
                if (j == 0 || j == n - 1) v *= 0.5;
                mat[static_cast<std::size_t>(j) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)] = v;
            }
    }
    return mat;
}

}  // namespace

LobattoPanel::LobattoPanel(double a, double b, int n)
    : a_(a), b_(b), n_(n), ref_(lobatto_reference(n).data()), to_cheb_(lobatto_to_chebyshev(n).data()) {}

void LobattoPanel::chebyshev_coefficients(const double* values, double* coeffs) const {
    for (int j = 0; j < n_; ++j) {
        const double* row = to_cheb_ + static_cast<std::ptrdiff_t>(j) * n_;
        double c = 0.0;
        for (int i = 0; i < n_; ++i) c += row[i] * values[i];
        coeffs[j] = c;
    }
}

double LobattoPanel::node(int i) const {
    if (i == 0) return a_;
    if (i == n_ - 1) return b_;
    return 0.5 * (a_ + b_) + 0.5 * (b_ - a_) * ref_[i];
}

double LobattoPanel::interpolate(const double* values, double z) const {
    const double x = (2.0 * z - a_ - b_) / (b_ - a_);
    double num = 0.0;
    double denom = 0.0;
    for (int i = 0; i < n_; ++i) {
        const double d = x - ref_[i];
        if (d == 0.0) return values[i];
        double w = (i % 2 == 0 ? 1.0 : -1.0) / d;
        if (i == 0 || i == n_ - 1) w *= 0.5;
        num += w * values[i];
        denom += w;
    }
    return num / denom;
}

}  // namespace kacm::quad
