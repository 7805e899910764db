#include "coanda/io.hpp"

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace coanda {

namespace {
void checkStream(const std::ostream& os, const std::string& path) {
    if (!os) throw IoError("cannot write " + path);
}
} // namespace

void writeVtkMesh(const std::string& path, const Mesh& mesh) {
    std::ofstream os(path);
    checkStream(os, path);
    os << "# vtk DataFile Version 3.0\n";
    os << "coanda mesh\n";
    os << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.points.size() << " double\n";
    char buf[128];
    for (const auto& p : mesh.points) {
        std::snprintf(buf, sizeof(buf), "%.12g %.12g 0\n", p.x, p.y);
        os << buf;
    }
    os << "CELLS " << mesh.nCells() << " " << mesh.nCells() * 5 << "\n";
    for (const auto& cp : mesh.cellPoints)
        os << "4 " << cp[0] << " " << cp[1] << " " << cp[2] << " " << cp[3] << "\n";
    os << "CELL_TYPES " << mesh.nCells() << "\n";
    for (int c = 0; c < mesh.nCells(); ++c) os << "9\n";
    checkStream(os, path);
}

void writeVtkFields(const std::string& path, const Mesh& mesh, const VectorField& u,
                    const ScalarField& p, const TurbulenceState* turb) {
    std::ofstream os(path);
    checkStream(os, path);
    os << "# vtk DataFile Version 3.0\n";
    os << "coanda fields\n";
    os << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.points.size() << " double\n";
    char buf[160];
    for (const auto& pt : mesh.points) {
        std::snprintf(buf, sizeof(buf), "%.12g %.12g 0\n", pt.x, pt.y);
        os << buf;
    }
    os << "CELLS " << mesh.nCells() << " " << mesh.nCells() * 5 << "\n";
    for (const auto& cp : mesh.cellPoints)
        os << "4 " << cp[0] << " " << cp[1] << " " << cp[2] << " " << cp[3] << "\n";
    os << "CELL_TYPES " << mesh.nCells() << "\n";
    for (int c = 0; c < mesh.nCells(); ++c) os << "9\n";

    os << "CELL_DATA " << mesh.nCells() << "\n";
    auto scalar = [&](const std::string& name, const std::vector<double>& v) {
        os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (double x : v) {
            std::snprintf(buf, sizeof(buf), "%.12g\n", x);
            os << buf;
        }
    };
    scalar("p", p.v);
    if (turb) {
        scalar("k", turb->k.v);
        scalar(isOmegaBased(turb->kind) ? "omega" : "epsilon", turb->omegaOrEpsilon.v);
        scalar("nut", turb->nut.v);
    }
    os << "VECTORS U double\n";
    for (const auto& v : u.v) {
        std::snprintf(buf, sizeof(buf), "%.12g %.12g 0\n", v.x, v.y);
        os << buf;
    }
    checkStream(os, path);
}

void writeFieldsCsv(const std::string& path, const Mesh& mesh, const VectorField& u,
                    const ScalarField& p, const TurbulenceState* turb) {
    std::ofstream os(path);
    checkStream(os, path);
    const bool omega = turb && isOmegaBased(turb->kind);
    os << "# units: x[m], y[m], u[m/s], v[m/s], p[m2/s2], k[m2/s2], "
       << (omega || !turb ? "omega[1/s]" : "epsilon[m2/s3]") << ", nut[m2/s]\n";
    os << "x,y,u,v,p,k," << (omega || !turb ? "omega" : "epsilon") << ",nut\n";
    char buf[320];
    for (int c = 0; c < mesh.nCells(); ++c) {
        double k = turb ? turb->k[c] : 0.0;
        double w = turb ? turb->omegaOrEpsilon[c] : 0.0;
        double nut = turb ? turb->nut[c] : 0.0;
        std::snprintf(buf, sizeof(buf),
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      mesh.cellCentre[c].x, mesh.cellCentre[c].y, u[c].x, u[c].y, p[c], k, w, nut);
        os << buf;
    }
    checkStream(os, path);
}

std::vector<std::vector<double>> readCsvTable(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot read " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                size_t pos = 0;
                double v = std::stod(cell, &pos);
                row.push_back(v);
            } catch (...) {
                numeric = false;
                break;
            }
        }
        if (numeric && !row.empty()) rows.push_back(row);
    }
    return rows;
}

CsvFields readFieldsCsv(const std::string& path) {
    CsvFields f;
    for (const auto& row : readCsvTable(path)) {
        if (row.size() < 8) throw IoError("fields csv: short row in " + path);
        f.x.push_back(row[0]);
        f.y.push_back(row[1]);
        f.ux.push_back(row[2]);
        f.uy.push_back(row[3]);
        f.p.push_back(row[4]);
        f.k.push_back(row[5]);
        f.second.push_back(row[6]);
        f.nut.push_back(row[7]);
    }
    return f;
}

namespace {
constexpr uint32_t kCkptMagic = 0x434b3244; // "CK2D"
constexpr uint32_t kCkptVersion = 1;

template <class T>
void wpod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
void rpod(std::istream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
}
template <class T>
void wvec(std::ostream& os, const std::vector<T>& v) {
    wpod(os, static_cast<uint64_t>(v.size()));
    os.write(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(T));
}
template <class T>
void rvec(std::istream& is, std::vector<T>& v) {
    uint64_t n = 0;
    rpod(is, n);
    v.resize(n);
    is.read(reinterpret_cast<char*>(v.data()), n * sizeof(T));
}
} // namespace

void writeCheckpoint(const std::string& path, const Checkpoint& c) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write checkpoint " + path);
    wpod(os, kCkptMagic);
    wpod(os, kCkptVersion);
    wpod(os, c.outerIter);
    wpod(os, c.time);
    wvec(os, c.u);
    wvec(os, c.p);
    wvec(os, c.phi);
    wvec(os, c.k);
    wvec(os, c.second);
    wvec(os, c.nut);
    if (!os) throw IoError("failed writing checkpoint " + path);
}

Checkpoint readCheckpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot read checkpoint " + path);
    uint32_t magic = 0, version = 0;
    rpod(is, magic);
    rpod(is, version);
    if (magic != kCkptMagic || version != kCkptVersion)
        throw IoError("checkpoint: bad magic/version in " + path);
    Checkpoint c;
    rpod(is, c.outerIter);
    rpod(is, c.time);
    rvec(is, c.u);
    rvec(is, c.p);
    rvec(is, c.phi);
    rvec(is, c.k);
    rvec(is, c.second);
    rvec(is, c.nut);
    if (!is) throw IoError("checkpoint: truncated file " + path);
    return c;
}

struct ResidualLog::Impl {
    std::ofstream os;
};

ResidualLog::ResidualLog(const std::string& path) : impl_(new Impl) {
    impl_->os.open(path);
    if (!impl_->os) {
        delete impl_;
        throw IoError("cannot write residual log " + path);
    }
    impl_->os << "iteration_or_time,eq_name,initial_residual,final_residual,linear_iters\n";
}

ResidualLog::~ResidualLog() { delete impl_; }

void ResidualLog::append(double iterOrTime, const std::string& eq, double initial, double final_,
                         int linearIters) {
    char buf[192];
    std::snprintf(buf, sizeof(buf), "%.10g,%s,%.10g,%.10g,%d\n", iterOrTime, eq.c_str(), initial,
                  final_, linearIters);
    impl_->os << buf;
    impl_->os.flush();
}

} // namespace coanda
