#pragma once

#include <cstdint>
#include <vector>

#include "reachcert/geometry.hpp"
#include "reachcert/so3.hpp"

namespace reachcert {

struct RrtParams {
  int n_vertices = 400;
  double c_sample = 0.9;  // fraction of draws taken from the free space
  double alpha = 0.9;     // strip scale for safe regions, in [0,1)
  std::uint64_t seed = 0;
};

// Root-to-target waypoint chain with per-waypoint box radii. With N_s
// segments there are N_s+1 waypoints and N_s+1 radii; the last radius is
// the slab inside the (deflated) target set, all earlier ones come from
// the safe region around their waypoint.
struct SafeTube {
  std::vector<Vec3> waypoints;
  std::vector<Vec3> radii;

  int segments() const { return static_cast<int>(waypoints.size()) - 1; }
  Box3 box(int i) const {
    return Box3{waypoints[i] - radii[i], waypoints[i] + radii[i]};
  }
};

struct RrtTree {
  std::vector<Vec3> vertices;
  std::vector<int> parent;  // parent[0] = -1 for the root
  int target_index = -1;    // first vertex inside the deflated target, or -1
  long samples_drawn = 0;

  bool success() const { return target_index >= 0; }
};

RrtTree build_rrt(const InflatedScenario& inflated, const RrtParams& params);

// All four waypoint-chain conditions, checked in exact float arithmetic
// (closed box membership, exact disjointness): the chain starts at p0,
// each waypoint lies in its parent's box, every non-terminal box stays in
// the shrunk domain and clear of every grown obstacle, and the last box
// sits inside the shrunk target.
bool verify_tube(const SafeTube& tube, const InflatedScenario& inflated);

// Walks parents back from the tree's target vertex and assigns radii.
// The chain conditions are re-verified exactly before returning.
SafeTube extract_tube(const RrtTree& tree, const InflatedScenario& inflated,
                      const RrtParams& params);

}  // namespace reachcert
