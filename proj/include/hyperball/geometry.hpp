#pragma once

#include <span>
#include <vector>

#include "hyperball/linalg.hpp"

// Poincare ball kernel, curvature -1.
namespace hyperball::geometry {

inline constexpr double kBallEps = 1e-5;       // max norm is 1 - kBallEps
inline constexpr double kDenominatorEps = 1e-15;
inline constexpr double kMaxNorm = 1.0 - kBallEps;

// A point of the open unit ball with ||x|| <= 1 - kBallEps and finite
// coordinates. Only project_to_ball and the kernel operations create one.
class HyperbolicPoint {
public:
    HyperbolicPoint() = default;
    // Origin of dimension n.
    explicit HyperbolicPoint(std::size_t n) : coords_(n, 0.0) {}

    std::size_t dim() const { return coords_.size(); }
    std::span<const double> coords() const { return coords_; }
    double operator[](std::size_t i) const { return coords_[i]; }
    double norm() const { return hyperball::norm(coords_); }

    bool operator==(const HyperbolicPoint&) const = default;

private:
    friend HyperbolicPoint project_to_ball(std::span<const double> x);
    explicit HyperbolicPoint(Vec coords) : coords_(std::move(coords)) {}

    Vec coords_;
};

// Vector in the tangent space at the origin.
struct TangentVector {
    Vec coords;
};

// lambda_x = 2 / (1 - ||x||^2)
double conformal_factor(const HyperbolicPoint& x);

// Möbius addition x (+) y. Throws NumericalDegeneracy if the denominator
// collapses below kDenominatorEps.
HyperbolicPoint mobius_add(const HyperbolicPoint& x, const HyperbolicPoint& y);

double distance(const HyperbolicPoint& u, const HyperbolicPoint& v);

HyperbolicPoint exp0(const TangentVector& v);
TangentVector log0(const HyperbolicPoint& x);

// Identity inside the clamped ball, radial rescale to 1 - kBallEps outside.
// Throws InvalidInput on non-finite coordinates.
HyperbolicPoint project_to_ball(std::span<const double> x);

HyperbolicPoint negate(const HyperbolicPoint& x);

}  // namespace hyperball::geometry
