#include "atorsion/quadrature.hpp"

#include "atorsion/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

namespace atorsion::quadrature {

namespace {

// Kronrod nodes on [0, 1] (symmetric), Kronrod and embedded Gauss weights.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    Complex value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gauss_kronrod(const ComplexIntegrand& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const Complex fc = f(center);
    Complex kronrod = fc * kKronrod[7];
    Complex gauss = fc * kGauss[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kNodes[static_cast<std::size_t>(i)];
        const Complex pair = f(center - dx) + f(center + dx);
        kronrod += pair * kKronrod[static_cast<std::size_t>(i)];
        if (i % 2 == 1) gauss += pair * kGauss[static_cast<std::size_t>(i / 2)];
    }
    kronrod *= half;
    gauss *= half;
    double err = std::abs(kronrod - gauss);
    // Standard QUADPACK-style sharpening of the raw difference.
    if (err > 0.0) {
        err = std::min(err, 200.0 * err * std::sqrt(200.0 * err / std::max(std::abs(kronrod), 1e-300)));
    }
    if (!std::isfinite(std::abs(kronrod))) err = std::numeric_limits<double>::infinity();
    return {a, b, kronrod, err};
}

}  // namespace

Result integrate(const ComplexIntegrand& f, double a, double b, const Options& opts) {
    Result out;
    if (a == b) return out;
    if (!(a < b)) {
        Result r = integrate(f, b, a, opts);
        r.value = -r.value;
        return r;
    }
    std::priority_queue<Segment> heap;
    Segment first = gauss_kronrod(f, a, b);
    Complex total = first.value;
    double error = first.error;
    heap.push(first);
    std::size_t intervals = 1;
    while (intervals < opts.max_intervals) {
        if (error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) break;
        Segment worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted
        heap.pop();
        Segment left = gauss_kronrod(f, worst.a, mid);
        Segment right = gauss_kronrod(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++intervals;
    }
    // Recompute sums from the segments to shed accumulated rounding.
    total = 0.0;
    error = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    out.value = total;
    out.error = error;
    out.intervals = intervals;
    if (!std::isfinite(std::abs(total)) || error > std::max(opts.fail_abs, opts.fail_rel * std::abs(total))) {
        std::ostringstream msg;
        msg << "error estimate " << error << " on [" << a << ", " << b << "] after " << intervals
            << " intervals";
        throw Error(ErrorCode::QuadratureFailure, msg.str());
    }
    return out;
}

double integrate_real(const std::function<double(double)>& f, double a, double b, const Options& opts) {
    return integrate([&](double t) { return Complex(f(t), 0.0); }, a, b, opts).value.real();
}

}  // namespace atorsion::quadrature
