#pragma once

#include <fstream>
#include <sstream>

#include "mrt/tensor_field.hpp"

namespace mrt {

// Runtime configuration shared by the CLI verbs. Every tolerance that shapes
// a result is explicit here so runs are reproducible from the config alone.
struct RunConfig {
    int m = 1;
    int grid_n = 129;
    int n_beta = 256;
    int n_theta = 256;
    int N = 64;

    double quad_step_factor = 0.5; // chord quadrature step = factor * grid spacing
    double standoff_factor = 2.0;  // Bukhgeim-Cauchy standoff in boundary spacings
    int boundary_oversample = 2;   // trig upsampling of boundary data in the sweep
    double error_radius = 0.85;
    int fac_n_theta = 512;
    double neg_mode_tol = 1e-4;

    std::string phantom_kind = "polynomial-bump";
    std::vector<Bump> phantom_bumps; // empty -> default family

    std::string atten_kind = "none"; // none | gaussian-bump | polynomial-bump
    Bump atten_bump{0.5, 0.0, 0.0, 0.7};

    std::string outdir = "out";

    double quad_step(double h) const { return quad_step_factor * h; }
    double standoff() const {
        return standoff_factor * 2.0 * pi / (n_beta * std::max(1, boundary_oversample));
    }

    void validate() const {
        if (m < 1 || m > 8) throw ConfigError("m must be in [1, 8]");
        if (grid_n < 16) throw ConfigError("grid_n must be >= 16");
        if (N < 2 * (m + 1) + 8)
            throw ConfigError("N must be >= 2(m+1)+8 = " + std::to_string(2 * (m + 1) + 8));
        if (n_theta < 2 * N + 2)
            throw ConfigError("n_theta must be >= 2N+2 = " + std::to_string(2 * N + 2));
        if (fac_n_theta < 2 * N + 2) throw ConfigError("fac_n_theta must be >= 2N+2");
        if (quad_step_factor <= 0.0 || quad_step_factor > 1.0)
            throw ConfigError("quad_step_factor must be in (0, 1]");
        if (standoff_factor < 0.0) throw ConfigError("standoff_factor must be >= 0");
        if (boundary_oversample < 1 || boundary_oversample > 16)
            throw ConfigError("boundary_oversample must be in [1, 16]");
        if (error_radius <= 0.0 || error_radius > 1.0 - phantom_support_margin)
            throw ConfigError("error_radius must lie in (0, 0.95]");
        // the sweep erodes one stencil ring per level from the standoff seam;
        // the error metric region must stay clear of it
        double h = 2.0 / (grid_n - 1);
        double seam = 1.0 - standoff() - (m + 2) * h;
        if (error_radius > seam)
            throw ConfigError("error_radius " + std::to_string(error_radius) +
                              " reaches the standoff/sweep erosion zone (limit " +
                              std::to_string(seam) + "); increase n_beta or grid_n");
    }
};

// Plain `key = value` text; '#' starts a comment. Unknown keys are rejected.
inline RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config " + path);
    RunConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
            return s;
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "m") c.m = std::stoi(val);
            else if (key == "grid_n") c.grid_n = std::stoi(val);
            else if (key == "n_beta") c.n_beta = std::stoi(val);
            else if (key == "n_theta") c.n_theta = std::stoi(val);
            else if (key == "N") c.N = std::stoi(val);
            else if (key == "quad_step_factor") c.quad_step_factor = std::stod(val);
            else if (key == "standoff_factor") c.standoff_factor = std::stod(val);
            else if (key == "boundary_oversample") c.boundary_oversample = std::stoi(val);
            else if (key == "error_radius") c.error_radius = std::stod(val);
            else if (key == "fac_n_theta") c.fac_n_theta = std::stoi(val);
            else if (key == "neg_mode_tol") c.neg_mode_tol = std::stod(val);
            else if (key == "phantom_kind") c.phantom_kind = val;
            else if (key == "atten_kind") c.atten_kind = val;
            else if (key == "atten_scale") c.atten_bump.scale = std::stod(val);
            else if (key == "atten_cx") c.atten_bump.cx = std::stod(val);
            else if (key == "atten_cy") c.atten_bump.cy = std::stod(val);
            else if (key == "atten_radius") c.atten_bump.radius = std::stod(val);
            else if (key == "outdir") c.outdir = val;
            else if (key == "phantom_bump") {
                // scale cx cy radius, one bump per line, cycled over components
                std::istringstream is(val);
                Bump b;
                if (!(is >> b.scale >> b.cx >> b.cy >> b.radius))
                    throw ConfigError("phantom_bump wants: scale cx cy radius");
                c.phantom_bumps.push_back(b);
            } else {
                throw ConfigError("unknown config key '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            throw ConfigError("bad value for '" + key + "' at " + path + ":" + std::to_string(lineno));
        }
    }
    return c;
}

} // namespace mrt
