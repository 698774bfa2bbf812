#pragma once

/**
 * Static SVG renderings of the two artifacts worth looking at: sector
 * decompositions of planar cones with their linear functionals, and the
 * walk's distance-to-target trace on log-log axes.  Output is plain text,
 * deterministic for a given input.
 */

#include "bdiv/diophantine.hpp"
#include "bdiv/superlinear.hpp"

#include <string>
#include <vector>

namespace bdiv {

/** Sector fan of certified pieces in the plane, labeled by functional. */
std::string svg_pl_pieces(const std::vector<LinearPiece>& pieces);

/** Sampled chord rays whose local functionals are pairwise distinct. */
std::string svg_chord_evidence(const NonPLEvidence& evidence);

/** Checkpoint distances against step count, both axes logarithmic. */
std::string svg_walk_distance(const WalkReport& report);

}  // namespace bdiv
