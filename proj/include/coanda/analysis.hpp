#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coanda/field.hpp"

namespace coanda {

enum class CaseKind { flatPlate, cylinder };

CaseKind caseKindFromString(const std::string& s);

// Ordered wall stations (x in m for the plate, theta in degrees for the
// cylinder) with wall pressure and signed streamwise shear.
struct WallProfile {
    std::vector<double> station;
    std::vector<double> wallP;
    std::vector<double> tauW;
    std::vector<double> cp;
    std::vector<double> cf;
    std::vector<double> area; // face area magnitudes, for averages
};

// The paper's printed normalisation divides by (1/2) rho U_jet; the
// conventional squared form is available behind `squaredConvention`.
double dynamicHead(double uJet, bool squaredConvention);

WallProfile wallProfile(const VectorField& u, const ScalarField& p, const Mesh& mesh,
                        CaseKind kind, double nu, double uJet, bool squaredConvention = false);

double averageCp(const WallProfile& w);

// Post-run y+: sqrt(|tau_w|) * first-cell-centre distance / nu, max over the
// wall patch.
double maxYPlus(const VectorField& u, const Mesh& mesh, double nu);

struct Crossing {
    double station = 0.0;
    int direction = 0; // +1 when the profile rises through zero
};

// Linear-interpolated zero crossings of (station, value) samples.
std::vector<Crossing> detectZeroCrossings(const std::vector<double>& station,
                                          const std::vector<double>& value);

// Case conventions: plate reattachment = first rising crossing downstream of
// the jet exit; cylinder separation = last falling (attached -> detached)
// crossing.
std::optional<double> reattachmentPoint(const WallProfile& w);
std::optional<double> separationStation(const WallProfile& w);

struct JetProfile {
    double station = 0.0;
    std::vector<double> dist; // wall-normal distance, ascending
    std::vector<double> ut;   // streamwise velocity
    double uMax = 0.0;
    double yOfUMax = 0.0;
    double yHalf = 0.0; // first distance beyond the peak where ut = uMax/2
    bool flagged = false;
};

// Peak and half-width from raw samples (ascending dist).
JetProfile jetProfileFromSamples(double station, std::vector<double> dist,
                                 std::vector<double> ut);

// Samples the streamwise velocity along the wall-normal line at `station`
// (vertical line at x for the plate; radial ray at theta degrees for the
// cylinder, with distance measured from the surface r = R).
JetProfile jetProfileExtract(const VectorField& u, const Mesh& mesh, CaseKind kind,
                             double station, double radius = 0.0);

struct DecaySpread {
    std::vector<double> station;
    std::vector<double> uMaxNorm; // U_max / U_jet
    std::vector<double> y2Norm;   // y2 / length scale
    double maxDevDecay = 0.0;     // vs reference, when supplied
    double maxDevSpread = 0.0;
};

struct ReferenceSeries {
    std::vector<double> station, decay, spread;
};

DecaySpread decayAndSpread(const std::vector<JetProfile>& profiles, double uJet,
                           double lengthNorm, const ReferenceSeries* reference = nullptr);

struct GciReport {
    double f1 = 0, f2 = 0, f3 = 0;
    double r = 0, fs = 0;
    double q = 0;
    double gci12 = 0, gci23 = 0; // percent
    double gciRatio = 0;         // GCI23 / (r^q GCI12)
    double richardson = 0;
    bool oscillatory = false;

    std::string table() const; // plain-text summary
};

// Roache grid-convergence index over fine (f1) / medium (f2) / coarse (f3)
// solutions with refinement ratio r and safety factor fs.
GciReport gciAnalyze(double f1, double f2, double f3, double r, double fs = 1.25);

} // namespace coanda
