#pragma once

#include <string>
#include <vector>

#include "coanda/mesh.hpp"

namespace coanda {

// Parameters controlling a generated grid. Presets for the two cases come
// from gridPreset(); a custom spec may override any of them.
struct GridSpec {
    double targetYplus = 1.0;
    double expansionRatio = 1.1; // in [1.0, 1.5]
    double dx = 0.0;             // streamwise wall spacing, cylinder case (m)
    double farSpacingFactor = 120.0; // radial spacing cap = factor * dx
    // domain extents as multiples of the reference length
    double streamwiseExtent = 235.0; // flat plate: x / H_j
    double normalExtent = 470.0;     // flat plate: y / H_j
    double farExtent = 50.0;         // cylinder: r / R
    // optional explicit counts (0 = derive from spacings)
    int nx = 0, ny = 0;

    void validate() const; // throws std::invalid_argument
};

enum class GridLevel { coarse, medium, fine };

GridLevel gridLevelFromString(const std::string& s);

// Table-driven presets for the two verification cases.
GridSpec flatPlatePreset(GridLevel level);
GridSpec cylinderPreset(GridLevel level);

// First-cell-centre height for a target y+ from the turbulent flat-plate
// correlation C_f = 0.027 Re_x^(-1/7), u_tau = U_ref sqrt(C_f/2).
double estimateFirstCellHeight(double uRef, double nu, double lRef, double targetYplus);

// spacings[i] = first * ratio^i for i = 0..n-1.
std::vector<double> geometricSpacings(double first, double ratio, int n);

// Offset plane jet: domain [0, 235 H_j] x [0, 470 H_j], inlet slot of height
// H_j at x = 0 between y = H_s and H_s + H_j. Patches: inlet, backWall,
// wall (y = 0), outlet (top + right).
Mesh generateFlatPlateMesh(const GridSpec& spec, double hJet, double hStandoff,
                           double uJet, double nu);

// O-grid around a cylinder of radius R out to farExtent * R, cut along the
// ray theta = 0 (top of the cylinder). The cut carries the inlet slot over
// r in [R, R+b] (jet blowing tangentially, clockwise towards +x) backed by
// the nozzle wall patch; the remainder of the cut is interior. Patches:
// inlet, backWall, wall (cylinder surface), outlet (far boundary).
Mesh generateCylinderMesh(const GridSpec& spec, double radius, double slotHeight,
                          double uJet, double nu);

// Angle (degrees, 0 at the top, clockwise towards +x) of a point around the
// cylinder axis at the origin.
double cylinderTheta(const Vec2& p);

} // namespace coanda
