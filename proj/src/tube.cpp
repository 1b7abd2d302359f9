#include "reachcert/tube.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reachcert/errors.hpp"
#include "reachcert/rng.hpp"

namespace reachcert {

namespace {

bool in_free_space(const Vec3& x, const InflatedScenario& inf) {
  if (!inf.X_o.contains(x)) {
    return false;
  }
  for (const Box3& u : inf.X_u) {
    if (u.contains(x)) {
      return false;
    }
  }
  return true;
}

Vec3 sample_box(SplitMix64& rng, const Box3& b) {
  // Component draws in a fixed order keep runs seed-reproducible.
  const double x = rng.uniform(b.lo(0), b.hi(0));
  const double y = rng.uniform(b.lo(1), b.hi(1));
  const double z = rng.uniform(b.lo(2), b.hi(2));
  return Vec3(x, y, z);
}

Vec3 sample_free(SplitMix64& rng, const InflatedScenario& inf, long* drawn) {
  for (int k = 0; k < 10'000; ++k) {
    const Vec3 x = sample_box(rng, inf.X_o);
    ++*drawn;
    if (in_free_space(x, inf)) {
      return x;
    }
  }
  throw Error(
      "build_rrt: free-space sampling rejected 10000 consecutive draws; "
      "obstacles dominate the domain");
}

}  // namespace

RrtTree build_rrt(const InflatedScenario& inflated, const RrtParams& params) {
  if (params.n_vertices < 1) {
    throw DomainError("build_rrt: vertex budget must be positive");
  }
  if (!(params.c_sample > 0.0 && params.c_sample <= 1.0)) {
    throw DomainError("build_rrt: c_sample must be in (0,1]");
  }
  if (!(params.alpha >= 0.0 && params.alpha < 1.0)) {
    throw DomainError("build_rrt: alpha must be in [0,1)");
  }
  if (!in_free_space(inflated.p0, inflated)) {
    throw DomainError("build_rrt: start position is not in the free space");
  }

  SplitMix64 rng(params.seed);
  RrtTree tree;
  tree.vertices.push_back(inflated.p0);
  tree.parent.push_back(-1);
  if (inflated.X_t.contains(inflated.p0)) {
    tree.target_index = 0;
    return tree;
  }

  const double bias_cut =
      params.c_sample * static_cast<double>(params.n_vertices);
  for (int i = 1; i <= params.n_vertices; ++i) {
    Vec3 xs;
    if (static_cast<double>(i) <= bias_cut) {
      xs = sample_free(rng, inflated, &tree.samples_drawn);
    } else {
      xs = sample_box(rng, inflated.X_t);
      ++tree.samples_drawn;
    }

    double best = std::numeric_limits<double>::infinity();
    int nearest = -1;
    Vec3 candidate = Vec3::Zero();
    for (std::size_t j = 0; j < tree.vertices.size(); ++j) {
      const Box3 region =
          safe_region(tree.vertices[j], inflated, params.alpha);
      const Vec3 cp = closest_point(xs, region);
      const double d = (xs - cp).lpNorm<Eigen::Infinity>();
      if (d < best) {
        best = d;
        nearest = static_cast<int>(j);
        candidate = cp;
      }
    }

    tree.vertices.push_back(candidate);
    tree.parent.push_back(nearest);
    if (inflated.X_t.contains(candidate)) {
      tree.target_index = static_cast<int>(tree.vertices.size()) - 1;
      break;
    }
  }
  return tree;
}

bool verify_tube(const SafeTube& tube, const InflatedScenario& inflated) {
  const int ns = tube.segments();
  if (ns < 0 || tube.radii.size() != tube.waypoints.size()) {
    return false;
  }
  if (tube.waypoints.empty() ||
      !(tube.waypoints.front().array() == inflated.p0.array()).all()) {
    return false;
  }
  for (int i = 0; i <= ns; ++i) {
    if (!(tube.radii[i].array() >= 0.0).all()) {
      return false;
    }
  }
  for (int i = 0; i + 1 <= ns; ++i) {
    if (!tube.box(i).contains(tube.waypoints[i + 1])) {
      return false;
    }
  }
  for (int i = 0; i < ns; ++i) {
    const Box3 b = tube.box(i);
    if (!inflated.X_o.contains(b)) {
      return false;
    }
    for (const Box3& u : inflated.X_u) {
      if (!b.disjoint(u)) {
        return false;
      }
    }
  }
  return inflated.X_t.contains(tube.box(ns));
}

SafeTube extract_tube(const RrtTree& tree, const InflatedScenario& inflated,
                      const RrtParams& params) {
  if (!tree.success()) {
    throw DomainError("extract_tube: the tree never reached the target");
  }
  std::vector<int> path;
  for (int v = tree.target_index; v >= 0; v = tree.parent[v]) {
    path.push_back(v);
  }
  std::reverse(path.begin(), path.end());

  SafeTube tube;
  tube.waypoints.reserve(path.size());
  tube.radii.reserve(path.size());
  for (const int v : path) {
    tube.waypoints.push_back(tree.vertices[v]);
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    tube.radii.push_back(
        safe_region_radius(tube.waypoints[i], inflated, params.alpha));
  }
  tube.radii.push_back(safe_box_radius(tube.waypoints.back(), inflated.X_t));

  if (!verify_tube(tube, inflated)) {
    throw Error("extract_tube: waypoint-chain conditions failed verification");
  }
  return tube;
}

}  // namespace reachcert
