// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <array>
#include <vector>

namespace formtherm {

using Index = Eigen::Index;
using Points = Eigen::Matrix<double, Eigen::Dynamic, 3>;

/// Annular sheet: a blank with a pre-punched concentric hole.
struct AnnulusGeometry {
  double outer_radius = 0.30;  // [m]
  double hole_radius = 0.05;   // [m]
  double thickness = 0.002;    // [m]
};

/// Linear-triangle mid-surface mesh of a thin sheet. Thickness is lumped: each
/// node carries a third of the area of its adjacent elements times the sheet
/// thickness.
struct Mesh {
  Points reference;  // undeformed node coordinates [m]
  std::vector<std::array<Index, 3>> triangles;
  std::vector<std::array<Index, 2>> boundary_edges;  // rim edges (hole and outer edge)
  double thickness = 0.0;                            // [m]
  Eigen::VectorXd lumped_area;                       // [m^2], reference configuration
  Eigen::VectorXd lumped_volume;                     // [m^3], reference configuration

  Index node_count() const { return reference.rows(); }
  Index element_count() const { return static_cast<Index>(triangles.size()); }
};

/// Per-configuration geometric quantities of a (possibly deformed) mesh.
struct MeshGeometry {
  Eigen::VectorXd element_area;   // [m^2]
  Eigen::VectorXd lumped_area;    // [m^2] per node, one face
  Eigen::VectorXd lumped_volume;  // [m^3] per node
  Eigen::VectorXd rim_area;       // [m^2] per node, lateral rim faces
};

/// Builds a mesh from raw points and triangles: checks connectivity, detects
/// the rim and computes reference lumped quantities. Throws ValidationError on
/// invalid indices or non-positive element areas.
Mesh make_mesh(Points reference, std::vector<std::array<Index, 3>> triangles, double thickness);

/// Deterministic ring-based triangulation of an annulus with roughly the given
/// edge length. The hole and outer boundary polygons are placed on equal-area
/// radii so that the meshed area equals the analytic annulus area.
Mesh build_sheet_mesh(const AnnulusGeometry& geometry, double edge_length);

/// Geometry of the mesh at the given node positions. Elements whose orientation
/// flips relative to the reference (or collapse) raise DegenerateElementError.
MeshGeometry compute_geometry(const Mesh& mesh, const Eigen::Ref<const Points>& positions);

/// Radial distance of each node from the sheet axis in the reference configuration.
Eigen::VectorXd reference_radius(const Mesh& mesh);

}  // namespace formtherm
