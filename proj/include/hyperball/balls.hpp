#pragma once

#include <string_view>

#include "hyperball/geometry.hpp"

namespace hyperball::balls {

using geometry::HyperbolicPoint;

inline constexpr double kRhoEps = 1e-5;
inline constexpr double kTauMin = 1e-3;
inline constexpr double kRelationTieTol = 1e-12;

// Euclidean ball induced by a label embedding c with rho = ||c||:
//   r = (1 - rho^2) / (2 rho),  c* = c (1 + r / rho),  alpha = 2 / (1 - rho^2).
// The ball's boundary meets the unit sphere orthogonally and passes through c.
struct LabelBall {
    HyperbolicPoint embedding;
    double rho = 0.0;
    double radius = 0.0;
    Vec center;
    double alpha = 0.0;
};

enum class RelationKind { contains, contained_by, overlap, disjoint };

std::string_view to_string(RelationKind kind);

struct BallRelation {
    RelationKind kind = RelationKind::overlap;
    // Signed distance to the nearest classification boundary; >= 0 means the
    // verdict holds (0 only on ties).
    double margin = 0.0;
};

// Embeddings shorter than kRhoEps are pushed out to kRhoEps along their
// direction (axis 0 for the exact origin).
LabelBall ball_from_embedding(const HyperbolicPoint& c);

// r - ||c* - x||, positive strictly inside the ball.
double membership(const HyperbolicPoint& x, const LabelBall& b);

// (alpha / tau) * membership. Throws InvalidTemperature if tau < kTauMin.
double score(const HyperbolicPoint& x, const LabelBall& b, double tau);

BallRelation ball_relation(const LabelBall& a, const LabelBall& b);

}  // namespace hyperball::balls
