// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "formtherm/mesh.hpp"

#include "formtherm/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace formtherm {

namespace {

using Vec3 = Eigen::Vector3d;

Vec3 row3(const Eigen::Ref<const Points>& p, Index i) { return p.row(i).transpose(); }

/// Radius of a regular n-gon whose area equals that of the circle of radius r.
double equal_area_radius(double r, Index n) {
  const double angle = 2.0 * std::numbers::pi / static_cast<double>(n);
  return r * std::sqrt(angle / std::sin(angle));
}

}  // namespace

Mesh make_mesh(Points reference, std::vector<std::array<Index, 3>> triangles, double thickness) {
  if (!(thickness > 0.0)) throw ValidationError("sheet thickness must be positive");
  const Index n = reference.rows();
  if (n == 0 || triangles.empty()) throw ValidationError("mesh has no nodes or no elements");
  if (!reference.allFinite()) throw ValidationError("mesh coordinates must be finite");

  std::map<std::pair<Index, Index>, int> edge_use;
  for (std::size_t e = 0; e < triangles.size(); ++e) {
    const auto& t = triangles[e];
    for (Index v : t) {
      if (v < 0 || v >= n)
        throw ValidationError("element " + std::to_string(e) + " references invalid node " +
                              std::to_string(v));
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw ValidationError("element " + std::to_string(e) + " repeats a node");
    for (int a = 0; a < 3; ++a) {
      Index i = t[a], j = t[(a + 1) % 3];
      ++edge_use[{std::min(i, j), std::max(i, j)}];
    }
  }

  Mesh mesh;
  mesh.reference = std::move(reference);
  mesh.triangles = std::move(triangles);
  mesh.thickness = thickness;
  for (const auto& [edge, count] : edge_use) {
    if (count == 1) mesh.boundary_edges.push_back({edge.first, edge.second});
  }

  MeshGeometry geo;
  try {
    geo = compute_geometry(mesh, mesh.reference);
  } catch (const DegenerateElementError& e) {
    throw ValidationError(std::string("invalid reference mesh: ") + e.what());
  }
  mesh.lumped_area = geo.lumped_area;
  mesh.lumped_volume = geo.lumped_volume;
  for (Index i = 0; i < n; ++i) {
    if (!(mesh.lumped_volume[i] > 0.0))
      throw ValidationError("node " + std::to_string(i) + " is not attached to any element");
  }
  return mesh;
}

MeshGeometry compute_geometry(const Mesh& mesh, const Eigen::Ref<const Points>& positions) {
  const Index n = mesh.node_count();
  if (positions.rows() != n) throw ValidationError("position array does not match mesh node count");

  MeshGeometry geo;
  geo.element_area.resize(mesh.element_count());
  geo.lumped_area = Eigen::VectorXd::Zero(n);
  geo.rim_area = Eigen::VectorXd::Zero(n);

  for (Index e = 0; e < mesh.element_count(); ++e) {
    const auto& t = mesh.triangles[e];
    const Vec3 ref_normal = (row3(mesh.reference, t[1]) - row3(mesh.reference, t[0]))
                                .cross(row3(mesh.reference, t[2]) - row3(mesh.reference, t[0]));
    const Vec3 cur = (row3(positions, t[1]) - row3(positions, t[0]))
                         .cross(row3(positions, t[2]) - row3(positions, t[0]));
    const double ref_norm = ref_normal.norm();
    const double signed_area = ref_norm > 0.0 ? 0.5 * cur.dot(ref_normal) / ref_norm : 0.0;
    if (!(signed_area > 0.0)) throw DegenerateElementError(e, signed_area);
    const double area = 0.5 * cur.norm();
    geo.element_area[e] = area;
    for (Index v : t) geo.lumped_area[v] += area / 3.0;
  }
  for (const auto& edge : mesh.boundary_edges) {
    const double len = (row3(positions, edge[1]) - row3(positions, edge[0])).norm();
    geo.rim_area[edge[0]] += 0.5 * len * mesh.thickness;
    geo.rim_area[edge[1]] += 0.5 * len * mesh.thickness;
  }
  geo.lumped_volume = geo.lumped_area * mesh.thickness;
  return geo;
}

Mesh build_sheet_mesh(const AnnulusGeometry& g, double edge_length) {
  if (!(g.hole_radius > 0.0)) throw ValidationError("hole radius must be positive");
  if (!(g.hole_radius < g.outer_radius))
    throw ValidationError("hole radius must be smaller than the outer radius");
  if (!(edge_length > 0.0)) throw ValidationError("mesh resolution must be positive");
  if (!(g.thickness > 0.0)) throw ValidationError("sheet thickness must be positive");

  constexpr double two_pi = 2.0 * std::numbers::pi;
  const Index rings = std::max<Index>(1, static_cast<Index>(std::ceil((g.outer_radius - g.hole_radius) / edge_length)));

  std::vector<Index> ring_start;
  std::vector<Index> ring_count;
  std::vector<std::array<double, 3>> coords;
  for (Index j = 0; j <= rings; ++j) {
    const double r = g.hole_radius + (g.outer_radius - g.hole_radius) * static_cast<double>(j) / static_cast<double>(rings);
    const Index count = std::max<Index>(8, std::lround(two_pi * r / edge_length));
    const double radius = (j == 0 || j == rings) ? equal_area_radius(r, count) : r;
    const double offset = (j % 2) ? std::numbers::pi / static_cast<double>(count) : 0.0;
    ring_start.push_back(static_cast<Index>(coords.size()));
    ring_count.push_back(count);
    for (Index i = 0; i < count; ++i) {
      const double phi = offset + two_pi * static_cast<double>(i) / static_cast<double>(count);
      coords.push_back({radius * std::cos(phi), radius * std::sin(phi), 0.0});
    }
  }

  Points points(static_cast<Index>(coords.size()), 3);
  for (std::size_t i = 0; i < coords.size(); ++i)
    points.row(static_cast<Index>(i)) << coords[i][0], coords[i][1], coords[i][2];

  auto angle_of = [&](Index ring, Index i) {
    const double offset = (ring % 2) ? std::numbers::pi / static_cast<double>(ring_count[ring]) : 0.0;
    return offset + two_pi * static_cast<double>(i) / static_cast<double>(ring_count[ring]);
  };

  std::vector<std::array<Index, 3>> triangles;
  auto emit = [&](Index a, Index b, Index c) {
    const Eigen::Vector2d pa = points.row(a).head<2>(), pb = points.row(b).head<2>(), pc = points.row(c).head<2>();
    const double cross = (pb - pa).x() * (pc - pa).y() - (pb - pa).y() * (pc - pa).x();
    if (cross > 0.0)
      triangles.push_back({a, b, c});
    else
      triangles.push_back({a, c, b});
  };

  // Zip neighbouring rings by advancing along whichever ring has the smaller next angle.
  for (Index j = 0; j < rings; ++j) {
    const Index na = ring_count[j], nb = ring_count[j + 1];
    auto inner = [&](Index i) { return ring_start[j] + (i % na); };
    auto outer = [&](Index i) { return ring_start[j + 1] + (i % nb); };
    Index ia = 0, ib = 0;
    while (ia < na || ib < nb) {
      const bool advance_inner =
          ib == nb || (ia < na && angle_of(j, ia + 1) < angle_of(j + 1, ib + 1));
      if (advance_inner) {
        emit(inner(ia), inner(ia + 1), outer(ib));
        ++ia;
      } else {
        emit(inner(ia), outer(ib + 1), outer(ib));
        ++ib;
      }
    }
  }
  return make_mesh(std::move(points), std::move(triangles), g.thickness);
}

Eigen::VectorXd reference_radius(const Mesh& mesh) {
  return mesh.reference.leftCols<2>().rowwise().norm();
}

}  // namespace formtherm
