#pragma once

#include <map>
#include <string>
#include <vector>

#include "coanda/field.hpp"
#include "coanda/turbulence.hpp"

namespace coanda {

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Legacy ASCII VTK (v3.0) of the quad mesh with cell data.
void writeVtkFields(const std::string& path, const Mesh& mesh, const VectorField& u,
                    const ScalarField& p, const TurbulenceState* turb);
void writeVtkMesh(const std::string& path, const Mesh& mesh);

// Flat CSV of cell centres and field values; readFieldsCsv round-trips it.
void writeFieldsCsv(const std::string& path, const Mesh& mesh, const VectorField& u,
                    const ScalarField& p, const TurbulenceState* turb);
struct CsvFields {
    std::vector<double> x, y, ux, uy, p, k, second, nut;
};
CsvFields readFieldsCsv(const std::string& path);

// Generic two-or-more-column CSV table (skips '#' comments and a header row).
std::vector<std::vector<double>> readCsvTable(const std::string& path);

// Versioned binary checkpoint of the full solver state.
struct Checkpoint {
    int outerIter = 0;
    double time = 0.0;
    std::vector<Vec2> u;
    std::vector<double> p;
    std::vector<double> phi;
    std::vector<double> k, second, nut;
};
void writeCheckpoint(const std::string& path, const Checkpoint& c);
Checkpoint readCheckpoint(const std::string& path);

// Residual log, one row per equation solve:
// iteration_or_time,eq_name,initial_residual,final_residual,linear_iters
class ResidualLog {
public:
    explicit ResidualLog(const std::string& path);
    ~ResidualLog();
    void append(double iterOrTime, const std::string& eq, double initial, double final_,
                int linearIters);

private:
    struct Impl;
    Impl* impl_;
};

} // namespace coanda
