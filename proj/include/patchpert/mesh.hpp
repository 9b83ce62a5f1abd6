#pragma once
#include "patchpert/geometry.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace patchpert {

enum class EdgeLabel { Dirichlet, Neumann, Patch, Outer, CrackPlus, CrackMinus };

struct BoundaryEdge {
    int a = 0, b = 0;
    EdgeLabel label = EdgeLabel::Neumann;
};

// Conforming P1 triangulation. All generators guarantee positively oriented
// triangles; generate-time validation throws MeshFailure otherwise.
struct Mesh {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> triangles;
    std::vector<BoundaryEdge> boundary_edges;

    // grading metadata
    double h_max = 0.0;
    double h_min = 0.0;

    // generator bookkeeping: nodes of the outermost ring (disk/annulus rims)
    // in angular order, with their angles
    std::vector<int> rim_nodes;
    std::vector<double> rim_angles;
    std::vector<int> outer_nodes; // annulus outer ring / rectangle border

    double min_signed_area() const;
    double total_area() const;
    int euler_characteristic() const;
};

// Graded coordinate axis on [a, b]: spacing h_max far from the feature points,
// shrinking like slope*distance down to the per-feature floor h_min. All
// feature points become nodes.
std::vector<double> graded_axis(double a, double b, const std::vector<double>& features,
                                double h_min, double h_max, double slope);

// Unit-disk mesh (radius spec.radius) with labeled boundary edges and
// geometric grading toward the patch endpoints. h is the far-field size.
Mesh generate_mesh(const DomainSpec& spec, const BoundaryPartition& partition, double h);

// Tensor-product triangle mesh of [xs] x [ys]; boundary edges labeled Outer.
Mesh rect_mesh(const std::vector<double>& xs, const std::vector<double>& ys);

// Log-polar annulus mesh between radius r0 and r0*exp(rho.back()), azimuthal
// nodes fixed by `angles` (angular order preserved). rim_nodes = inner ring,
// outer_nodes = outer ring (labeled Outer).
Mesh annulus_mesh(double r0, const std::vector<double>& angles,
                  const std::vector<double>& rho);

// Glue an annulus onto the disk rim (rings must carry identical angles).
// Rim nodes listed in `crack` (by rim index) are duplicated: the disk keeps
// its copy, the annulus gets a fresh one; matching CrackPlus (disk side) and
// CrackMinus (annulus side) edge lists are appended to boundary_edges.
Mesh glue_disk_annulus(const Mesh& disk, const Mesh& annulus,
                       const std::vector<int>& crack_rim_indices);

void write_mesh(const Mesh& m, std::ostream& out);
Mesh read_mesh(std::istream& in);
void write_mesh_file(const Mesh& m, const std::string& path);
Mesh read_mesh_file(const std::string& path);

} // namespace patchpert
