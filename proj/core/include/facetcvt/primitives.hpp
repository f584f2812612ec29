#pragma once

#include "facetcvt/mesh.hpp"

#include <string>

namespace facetcvt {

/// Icosahedron subdivided `level` times and pushed to the sphere
/// (20 * 4^level faces, counter-clockwise seen from outside).
TriangleMesh icosphere(int level, double radius = 1.0);

/// Latitude/longitude sphere: segments * rings + 2 vertices, 2 * segments * rings faces.
TriangleMesh uv_sphere(int segments, int rings, double radius = 1.0);

/// Cube [-h, h]^3 with sharp edges, each side split into res x res quads.
TriangleMesh cube(int res, double half = 1.0);

/// Cube [-h, h]^3 whose edges and corners are rounded with radius r, built
/// from a `res` x `res` grid per cube side.
TriangleMesh rounded_cube(int res, double half = 1.0, double radius = 0.25);

/// Torus around the z axis.
TriangleMesh torus(int nu, int nv, double major = 1.0, double minor = 0.35);

/// Unit square in the z = 0 plane split into 2 * nx * ny triangles.
TriangleMesh flat_grid(int nx, int ny);

/// Named primitive for the command line: icosphere, uvsphere, cube, rounded-cube,
/// fillet-cube, torus, grid. Throws InvalidArgument on an unknown name.
TriangleMesh make_primitive(const std::string& name, int resolution);

}  // namespace facetcvt
