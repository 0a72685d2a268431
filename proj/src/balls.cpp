#include "hyperball/balls.hpp"

#include <algorithm>
#include <cmath>

#include "hyperball/errors.hpp"

namespace hyperball::balls {

std::string_view to_string(RelationKind kind) {
    switch (kind) {
        case RelationKind::contains: return "contains";
        case RelationKind::contained_by: return "contained_by";
        case RelationKind::overlap: return "overlap";
        case RelationKind::disjoint: return "disjoint";
    }
    return "unknown";
}

LabelBall ball_from_embedding(const HyperbolicPoint& c) {
    LabelBall ball;
    double rho = c.norm();
    if (rho < kRhoEps) {
        Vec v(c.coords().begin(), c.coords().end());
        if (rho == 0.0) {
            v.assign(v.size(), 0.0);
            v[0] = kRhoEps;
        } else {
            for (double& x : v) x *= kRhoEps / rho;
        }
        ball.embedding = geometry::project_to_ball(v);
        rho = kRhoEps;
    } else {
        ball.embedding = c;
    }
    const double rho2 = rho * rho;
    ball.rho = rho;
    ball.radius = (1.0 - rho2) / (2.0 * rho);
    ball.alpha = 2.0 / (1.0 - rho2);
    const double stretch = 1.0 + ball.radius / rho;
    ball.center.resize(c.dim());
    for (std::size_t i = 0; i < c.dim(); ++i) ball.center[i] = ball.embedding[i] * stretch;
    return ball;
}

double membership(const HyperbolicPoint& x, const LabelBall& b) {
    if (x.dim() != b.center.size()) throw ShapeError("membership: dimension mismatch");
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.dim(); ++i) d2 += (b.center[i] - x[i]) * (b.center[i] - x[i]);
    return b.radius - std::sqrt(d2);
}

double score(const HyperbolicPoint& x, const LabelBall& b, double tau) {
    if (!(tau >= kTauMin)) throw InvalidTemperature("temperature below 1e-3");
    return b.alpha / tau * membership(x, b);
}

BallRelation ball_relation(const LabelBall& a, const LabelBall& b) {
    if (a.center.size() != b.center.size()) throw ShapeError("ball_relation: dimension mismatch");
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.center.size(); ++i)
        d2 += (a.center[i] - b.center[i]) * (a.center[i] - b.center[i]);
    const double d = std::sqrt(d2);

    // Each slack is >= 0 when its inequality holds.
    const double contains_slack = (a.radius - b.radius) - d;
    const double contained_slack = (b.radius - a.radius) - d;
    const double disjoint_slack = d - (a.radius + b.radius);

    if (contains_slack >= -kRelationTieTol)
        return {RelationKind::contains, std::max(contains_slack, 0.0)};
    if (contained_slack >= -kRelationTieTol)
        return {RelationKind::contained_by, std::max(contained_slack, 0.0)};
    if (disjoint_slack >= -kRelationTieTol)
        return {RelationKind::disjoint, std::max(disjoint_slack, 0.0)};
    // Overlap holds strictly; margin is the distance to the closest of the
    // three other verdicts.
    const double margin = std::min({-contains_slack, -contained_slack, -disjoint_slack});
    return {RelationKind::overlap, margin};
}

}  // namespace hyperball::balls
