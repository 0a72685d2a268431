#include "hyperball/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "hyperball/errors.hpp"

namespace hyperball::geometry {

double conformal_factor(const HyperbolicPoint& x) {
    return 2.0 / (1.0 - squared_norm(x.coords()));
}

HyperbolicPoint mobius_add(const HyperbolicPoint& x, const HyperbolicPoint& y) {
    if (x.dim() != y.dim()) throw ShapeError("mobius_add: dimension mismatch");
    const double xy = dot(x.coords(), y.coords());
    const double xx = squared_norm(x.coords());
    const double yy = squared_norm(y.coords());
    const double den = 1.0 + 2.0 * xy + xx * yy;
    if (std::abs(den) < kDenominatorEps)
        throw NumericalDegeneracy("mobius_add: denominator below 1e-15");
    const double cx = (1.0 + 2.0 * xy + yy) / den;
    const double cy = (1.0 - xx) / den;
    Vec out(x.dim());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = cx * x[i] + cy * y[i];
    return project_to_ball(out);
}

double distance(const HyperbolicPoint& u, const HyperbolicPoint& v) {
    if (u.dim() != v.dim()) throw ShapeError("distance: dimension mismatch");
    double diff = 0.0;
    for (std::size_t i = 0; i < u.dim(); ++i) diff += (u[i] - v[i]) * (u[i] - v[i]);
    const double uu = squared_norm(u.coords());
    const double vv = squared_norm(v.coords());
    const double arg = 1.0 + 2.0 * diff / ((1.0 - uu) * (1.0 - vv));
    return std::acosh(std::max(arg, 1.0));
}

HyperbolicPoint exp0(const TangentVector& v) {
    const double n = norm(v.coords);
    if (n == 0.0) return project_to_ball(v.coords);
    const double scale = std::tanh(n) / n;
    Vec out(v.coords.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * v.coords[i];
    return project_to_ball(out);
}

TangentVector log0(const HyperbolicPoint& x) {
    const double n = x.norm();
    TangentVector out{Vec(x.coords().begin(), x.coords().end())};
    if (n == 0.0) return out;
    const double scale = std::atanh(n) / n;
    for (double& c : out.coords) c *= scale;
    return out;
}

HyperbolicPoint project_to_ball(std::span<const double> x) {
    if (!all_finite(x)) throw InvalidInput("project_to_ball: non-finite coordinate");
    Vec out(x.begin(), x.end());
    const double n = norm(x);
    if (n > kMaxNorm) {
        double scale = kMaxNorm / n;
        for (;;) {
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * scale;
            if (norm(out) <= kMaxNorm) break;
            // rounding pushed the result past the clamp
            scale = std::nextafter(scale, 0.0);
        }
    }
    return HyperbolicPoint(std::move(out));
}

HyperbolicPoint negate(const HyperbolicPoint& x) {
    Vec out(x.coords().begin(), x.coords().end());
    for (double& c : out) c = -c;
    return project_to_ball(out);
}

}  // namespace hyperball::geometry
