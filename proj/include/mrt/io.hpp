#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "mrt/forward.hpp"
#include "mrt/mode_sequence.hpp"
#include "mrt/tensor_field.hpp"

namespace mrt {

// On-disk contract: raw little-endian 64-bit floats plus a sidecar text
// header carrying shape, provenance and an FNV-1a hash of the data bytes.

inline std::uint64_t fnv1a64(const void* data, std::size_t bytes) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

namespace detail {

using HeaderMap = std::map<std::string, std::string>;

inline void write_header(const std::string& path,
                         const std::vector<std::pair<std::string, std::string>>& kv) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write header " + path);
    for (const auto& [k, v] : kv) f << k << ": " << v << "\n";
}

inline HeaderMap read_header(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot read header " + path);
    HeaderMap kv;
    std::string line;
    while (std::getline(f, line)) {
        auto pos = line.find(':');
        if (pos == std::string::npos) continue;
        std::string key = line.substr(0, pos);
        std::string val = line.substr(pos + 1);
        while (!val.empty() && val.front() == ' ') val.erase(val.begin());
        kv[key] = val;
    }
    return kv;
}

inline std::string header_get(const HeaderMap& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw DataError("header missing key '" + key + "'");
    return it->second;
}

inline void write_raw(const std::string& path, const void* data, std::size_t bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path);
    f.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

inline std::vector<double> read_doubles(const std::string& path, std::size_t count,
                                        std::uint64_t expect_hash) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot read " + path);
    std::vector<double> v(count);
    f.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (static_cast<std::size_t>(f.gcount()) != count * sizeof(double))
        throw DataError("truncated data file " + path);
    if (fnv1a64(v.data(), count * sizeof(double)) != expect_hash)
        throw DataError("data hash mismatch for " + path);
    return v;
}

inline std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::uint64_t parse_hex64(const std::string& s) {
    return std::stoull(s, nullptr, 16);
}

} // namespace detail

// ---- tensor field files -------------------------------------------------

inline void save_tensor_field(const std::string& base, const SymmetricTensorField& f, int grid_n,
                              const std::string& provenance) {
    std::vector<double> flat;
    flat.reserve((f.m + 1) * f.comp[0].size());
    for (const Field& c : f.comp) flat.insert(flat.end(), c.begin(), c.end());
    std::uint64_t h = fnv1a64(flat.data(), flat.size() * sizeof(double));
    detail::write_raw(base + ".f64", flat.data(), flat.size() * sizeof(double));
    detail::write_header(base + ".hdr", {{"format", "mrt-field-v1"},
                                         {"nx", std::to_string(grid_n)},
                                         {"ny", std::to_string(grid_n)},
                                         {"m", std::to_string(f.m)},
                                         {"components", std::to_string(f.m + 1)},
                                         {"provenance", provenance},
                                         {"data_hash", detail::hex64(h)}});
}

inline SymmetricTensorField load_tensor_field(const std::string& base, int* grid_n_out = nullptr,
                                              std::string* provenance = nullptr) {
    auto kv = detail::read_header(base + ".hdr");
    if (detail::header_get(kv, "format") != "mrt-field-v1")
        throw DataError("unexpected format in " + base + ".hdr");
    int nx = std::stoi(detail::header_get(kv, "nx"));
    int ny = std::stoi(detail::header_get(kv, "ny"));
    int m = std::stoi(detail::header_get(kv, "m"));
    int nc = std::stoi(detail::header_get(kv, "components"));
    if (nc != m + 1) throw DataError("component count does not match tensor order");
    std::size_t nodes = static_cast<std::size_t>(nx) * ny;
    auto flat = detail::read_doubles(base + ".f64", nodes * nc,
                                     detail::parse_hex64(detail::header_get(kv, "data_hash")));
    SymmetricTensorField f;
    f.m = m;
    f.comp.assign(nc, Field(nodes));
    for (int k = 0; k < nc; ++k)
        std::copy(flat.begin() + k * nodes, flat.begin() + (k + 1) * nodes, f.comp[k].begin());
    if (grid_n_out) *grid_n_out = nx;
    if (provenance) *provenance = kv.count("provenance") ? kv["provenance"] : "";
    return f;
}

inline void save_scalar_field(const std::string& base, const Field& a, int grid_n,
                              const std::string& provenance) {
    std::uint64_t h = fnv1a64(a.data(), a.size() * sizeof(double));
    detail::write_raw(base + ".f64", a.data(), a.size() * sizeof(double));
    detail::write_header(base + ".hdr", {{"format", "mrt-field-v1"},
                                         {"nx", std::to_string(grid_n)},
                                         {"ny", std::to_string(grid_n)},
                                         {"m", "0"},
                                         {"components", "1"},
                                         {"provenance", provenance},
                                         {"data_hash", detail::hex64(h)}});
}

inline Field load_scalar_field(const std::string& base, int* grid_n_out = nullptr) {
    auto kv = detail::read_header(base + ".hdr");
    int nx = std::stoi(detail::header_get(kv, "nx"));
    int ny = std::stoi(detail::header_get(kv, "ny"));
    auto flat = detail::read_doubles(base + ".f64", static_cast<std::size_t>(nx) * ny,
                                     detail::parse_hex64(detail::header_get(kv, "data_hash")));
    if (grid_n_out) *grid_n_out = nx;
    return flat;
}

// ---- sinogram files ------------------------------------------------------

inline void save_sinogram(const std::string& base, const MomentaSinogram& s,
                          std::uint64_t grid_provenance) {
    std::vector<double> flat;
    flat.reserve((s.m + 1) * s.data[0].size());
    for (const Field& d : s.data) flat.insert(flat.end(), d.begin(), d.end());
    std::uint64_t h = fnv1a64(flat.data(), flat.size() * sizeof(double));
    detail::write_raw(base + ".f64", flat.data(), flat.size() * sizeof(double));
    detail::write_header(base + ".hdr", {{"format", "mrt-sinogram-v1"},
                                         {"m", std::to_string(s.m)},
                                         {"n_beta", std::to_string(s.n_beta)},
                                         {"n_theta", std::to_string(s.n_theta)},
                                         {"attenuated", s.attenuated ? "1" : "0"},
                                         {"grid_hash", detail::hex64(grid_provenance)},
                                         {"data_hash", detail::hex64(h)}});
}

inline MomentaSinogram load_sinogram(const std::string& base,
                                     std::uint64_t* grid_provenance = nullptr) {
    auto kv = detail::read_header(base + ".hdr");
    if (detail::header_get(kv, "format") != "mrt-sinogram-v1")
        throw DataError("unexpected format in " + base + ".hdr");
    MomentaSinogram s;
    s.m = std::stoi(detail::header_get(kv, "m"));
    s.n_beta = std::stoi(detail::header_get(kv, "n_beta"));
    s.n_theta = std::stoi(detail::header_get(kv, "n_theta"));
    s.attenuated = detail::header_get(kv, "attenuated") == "1";
    std::size_t plane = static_cast<std::size_t>(s.n_beta) * s.n_theta;
    auto flat = detail::read_doubles(base + ".f64", plane * (s.m + 1),
                                     detail::parse_hex64(detail::header_get(kv, "data_hash")));
    s.data.assign(s.m + 1, Field(plane));
    for (int k = 0; k <= s.m; ++k)
        std::copy(flat.begin() + k * plane, flat.begin() + (k + 1) * plane, s.data[k].begin());
    if (grid_provenance) *grid_provenance = detail::parse_hex64(detail::header_get(kv, "grid_hash"));
    return s;
}

inline void export_sinogram_csv(const std::string& path, const MomentaSinogram& s) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write " + path);
    f << "k,beta_index,theta_index,value\n";
    for (int k = 0; k <= s.m; ++k)
        for (int j = 0; j < s.n_beta; ++j)
            for (int l = 0; l < s.n_theta; ++l) {
                std::ostringstream os;
                os.precision(17);
                os << s.at(k, j, l);
                f << k << ',' << j << ',' << l << ',' << os.str() << '\n';
            }
}

// ---- mode sequence files ---------------------------------------------------

inline void save_mode_sequence(const std::string& base, const ModeSequenceField& u,
                               const std::string& grid_id) {
    std::vector<double> flat;
    flat.reserve(2 * (u.N + 1) * u.nodes);
    for (const CField& p : u.mode)
        for (const cplx& v : p) {
            flat.push_back(v.real());
            flat.push_back(v.imag());
        }
    std::uint64_t h = fnv1a64(flat.data(), flat.size() * sizeof(double));
    detail::write_raw(base + ".f64", flat.data(), flat.size() * sizeof(double));
    detail::write_header(base + ".hdr", {{"format", "mrt-modes-v1"},
                                         {"N", std::to_string(u.N)},
                                         {"nodes", std::to_string(u.nodes)},
                                         {"boundary", u.on_boundary ? "1" : "0"},
                                         {"grid_id", grid_id},
                                         {"data_hash", detail::hex64(h)}});
}

inline ModeSequenceField load_mode_sequence(const std::string& base,
                                            std::string* grid_id = nullptr) {
    auto kv = detail::read_header(base + ".hdr");
    if (detail::header_get(kv, "format") != "mrt-modes-v1")
        throw DataError("unexpected format in " + base + ".hdr");
    ModeSequenceField u;
    u.N = std::stoi(detail::header_get(kv, "N"));
    u.nodes = std::stoul(detail::header_get(kv, "nodes"));
    u.on_boundary = detail::header_get(kv, "boundary") == "1";
    auto flat = detail::read_doubles(base + ".f64", 2 * (u.N + 1) * u.nodes,
                                     detail::parse_hex64(detail::header_get(kv, "data_hash")));
    u.mode.assign(u.N + 1, CField(u.nodes));
    std::size_t q = 0;
    for (CField& p : u.mode)
        for (cplx& v : p) {
            v = cplx(flat[q], flat[q + 1]);
            q += 2;
        }
    if (grid_id) *grid_id = kv.count("grid_id") ? kv["grid_id"] : "";
    return u;
}

// 8-bit PGM dump of a scalar field, normalized to its own range.
inline void export_pgm(const std::string& path, const Field& f, int n) {
    double lo = 0.0, hi = 0.0;
    for (double v : f) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double span = (hi > lo) ? hi - lo : 1.0;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << "P5\n" << n << " " << n << "\n255\n";
    for (int iy = n - 1; iy >= 0; --iy)
        for (int ix = 0; ix < n; ++ix) {
            unsigned char b =
                static_cast<unsigned char>(255.0 * (f[static_cast<std::size_t>(iy) * n + ix] - lo) / span);
            out.put(static_cast<char>(b));
        }
}

} // namespace mrt
