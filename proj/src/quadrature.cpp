#include "depstat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace depstat::num {

namespace {

// Gauss-Kronrod 15-point nodes/weights on [-1, 1] (K15 with embedded G7).
constexpr double kXgk[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,                0.207784955007898,
    0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
constexpr double kWk[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
constexpr double kWg[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment eval_segment(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double kres = 0.0, gres = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double fx = f(c + h * kXgk[i]);
        kres += kWk[i] * fx;
        if (i % 2 == 1) gres += kWg[i / 2] * fx;
    }
    kres *= h;
    gres *= h;
    return {a, b, kres, std::abs(kres - gres)};
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& q) {
    q.validate();
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    std::priority_queue<Segment> segs;
    Segment s0 = eval_segment(f, a, b);
    double total = s0.value;
    double err = s0.error;
    segs.push(s0);
    std::size_t n = 1;
    while (err > std::max(q.abs_tol, q.rel_tol * std::abs(total))) {
        if (n >= q.max_subdivisions)
            throw QuadratureError("adaptive quadrature did not converge", err);
        Segment worst = segs.top();
        segs.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Segment l = eval_segment(f, worst.a, mid);
        Segment r = eval_segment(f, mid, worst.b);
        total += l.value + r.value - worst.value;
        err += l.error + r.error - worst.error;
        segs.push(l);
        segs.push(r);
        ++n;
    }
    return sign * total;
}

}  // namespace depstat::num
