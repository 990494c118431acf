#ifndef BOHMFLOW_IO_HPP
#define BOHMFLOW_IO_HPP

#include <cstdio>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bohmflow/dynamics.hpp"
#include "bohmflow/nonrelativistic.hpp"
#include "bohmflow/stats.hpp"

namespace bohmflow {

inline constexpr const char* library_version = "0.1.0";

/// Floating point formatted with 17 significant digits (round-trip exact).
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Write via a temp file and rename so readers never see partial output.
inline void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed for " + path);
}

/// Relativistic trajectory CSV, one row per (step, particle):
/// sigma,particle,t,x[,y,z],v_t,v_x[,v_y,v_z],tau,tau_valid,q_over_m2c2,interval_class
inline std::string trajectory_csv(const TrajectoryRecord& rec, int dim, const Constants& c) {
    static const char* axis[3] = {"x", "y", "z"};
    std::string out = "sigma,particle,t";
    for (int j = 0; j < dim; ++j) out += std::string(",") + axis[j];
    out += ",v_t";
    for (int j = 0; j < dim; ++j) out += std::string(",v_") + axis[j];
    out += ",tau,tau_valid,q_over_m2c2,interval_class\n";
    for (const auto& p : rec.points) {
        for (std::size_t i = 0; i < p.positions.size(); ++i) {
            out += format_double(p.sigma) + "," + std::to_string(i);
            out += "," + format_double(p.positions[i].temporal() / c.c);
            for (int j = 0; j < dim; ++j) out += "," + format_double(p.positions[i].spatial(j));
            out += "," + format_double(p.velocities[i].temporal());
            for (int j = 0; j < dim; ++j) out += "," + format_double(p.velocities[i].spatial(j));
            out += "," + format_double(p.proper_times[i]);
            out += p.tau_valid[i] ? ",1" : ",0";
            out += "," + format_double(p.q_over_m2c2[i]);
            out += std::string(",") + to_string(p.interval_class[i]) + "\n";
        }
    }
    return out;
}

/// NR trajectory CSV: sigma,particle,x[,y,z],vx[,vy,vz]
inline std::string nr_trajectory_csv(const NRTrajectoryRecord& rec, int dim) {
    static const char* axis[3] = {"x", "y", "z"};
    std::string out = "sigma,particle";
    for (int j = 0; j < dim; ++j) out += std::string(",") + axis[j];
    for (int j = 0; j < dim; ++j) out += std::string(",v") + axis[j];
    out += "\n";
    for (const auto& p : rec.points) {
        for (std::size_t i = 0; i < p.positions.size(); ++i) {
            out += format_double(p.sigma) + "," + std::to_string(i);
            for (int j = 0; j < dim; ++j) out += "," + format_double(p.positions[i][j]);
            for (int j = 0; j < dim; ++j) out += "," + format_double(p.velocities[i][j]);
            out += "\n";
        }
    }
    return out;
}

/// Ensemble CSV: sample_id,particle,t,x[,y,z]
inline std::string ensemble_csv(const Ensemble& ens, std::size_t n_particles, int dim,
                                const Constants& c) {
    static const char* axis[3] = {"x", "y", "z"};
    std::string out = "sample_id,particle,t";
    for (int j = 0; j < dim; ++j) out += std::string(",") + axis[j];
    out += "\n";
    for (std::size_t s = 0; s < ens.samples.size(); ++s) {
        const Configuration q = coords_to_configuration(ens.samples[s], n_particles, dim);
        for (std::size_t i = 0; i < n_particles; ++i) {
            out += std::to_string(s) + "," + std::to_string(i);
            out += "," + format_double(q[i].temporal() / c.c);
            for (int j = 0; j < dim; ++j) out += "," + format_double(q[i].spatial(j));
            out += "\n";
        }
    }
    return out;
}

/// FNV-1a over bytes; used to fingerprint scenario files in run manifests.
inline std::uint64_t fnv1a_hash(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace bohmflow

#endif  // BOHMFLOW_IO_HPP
