#pragma once

#include <vector>

#include "hypsob/profile.hpp"

namespace hypsob {

/// Twenty named profiles independent of (n, p): tents, exponentials,
/// Gaussians, smooth bumps, steep power laws and two tabulated grids. All are
/// continuous with finite norms for every (n, p) the inequalities are stated
/// for; the compact ones also serve the support-dependent inequalities.
std::vector<RadialProfile> standard_corpus();

/// Truncated bubbles at lambda = 1, 1e-1, ..., 1e-4 with T = 1.
std::vector<RadialProfile> bubble_corpus(int n, double p);

}  // namespace hypsob
