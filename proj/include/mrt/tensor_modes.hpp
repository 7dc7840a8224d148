#pragma once

#include <map>
#include <mutex>

#include "mrt/mode_sequence.hpp"
#include "mrt/tensor_field.hpp"

namespace mrt {

// Angular Fourier modes of the tensor action: <f(z), theta^m> = sum_n f_n(z) e^{-i n theta},
// stored for n = 0..m (negative modes follow from f_{-n} = conj f_n).
struct TensorModeVector {
    int m = 0;
    std::vector<CField> mode; // m+1 planes

    CField& operator[](int n) { return mode[n]; }
    const CField& operator[](int n) const { return mode[n]; }
};

namespace detail {

// Exact expansion of binom(m,k) cos^{m-k} sin^k into e^{-i n theta} coefficients.
// All entries are dyadic rationals times powers of i, hence exact in doubles.
struct ModeConversion {
    int m = 0;
    std::vector<std::vector<cplx>> fwd;   // [n][k], n,k = 0..m
    std::vector<std::vector<double>> inv; // dof -> components
};

inline int dof_count(int m) { return m + 1; }

// dof layout: even m: (f0, Re f2, Im f2, ..., Re fm, Im fm);
//             odd  m: (Re f1, Im f1, ..., Re fm, Im fm).
inline void modes_to_dof(int m, const cplx* f, double* d) {
    if (m % 2 == 0) {
        d[0] = f[0].real();
        for (int j = 1; 2 * j <= m; ++j) {
            d[2 * j - 1] = f[2 * j].real();
            d[2 * j] = f[2 * j].imag();
        }
    } else {
        for (int j = 0; 2 * j + 1 <= m; ++j) {
            d[2 * j] = f[2 * j + 1].real();
            d[2 * j + 1] = f[2 * j + 1].imag();
        }
    }
}

inline const ModeConversion& mode_conversion(int m) {
    static std::map<int, ModeConversion> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;

    ModeConversion mc;
    mc.m = m;
    mc.fwd.assign(m + 1, std::vector<cplx>(m + 1, cplx(0, 0)));
    const cplx mi(0.0, -1.0); // i^{-1}
    const double scale = std::pow(2.0, -m);
    for (int k = 0; k <= m; ++k) {
        cplx ik = std::pow(mi, k);
        for (int n = 0; n <= m; ++n) {
            if ((m - n) % 2 != 0) continue;
            int s = (m - n) / 2; // p + q
            long long acc = 0;
            for (int q = 0; q <= k; ++q) {
                int p = s - q;
                if (p < 0 || p > m - k) continue;
                long long term = binomial(m - k, p) * binomial(k, q);
                acc += ((k - q) % 2 == 0) ? term : -term;
            }
            mc.fwd[n][k] = static_cast<double>(binomial(m, k)) * ik * scale * static_cast<double>(acc);
        }
    }

    // Real (m+1)x(m+1) system dof = R * components, inverted once.
    int d = dof_count(m);
    std::vector<std::vector<double>> R(d, std::vector<double>(d, 0.0));
    for (int k = 0; k <= m; ++k) {
        std::vector<cplx> col(m + 1);
        for (int n = 0; n <= m; ++n) col[n] = mc.fwd[n][k];
        std::vector<double> dv(d, 0.0);
        modes_to_dof(m, col.data(), dv.data());
        for (int r = 0; r < d; ++r) R[r][k] = dv[r];
    }
    // Gauss-Jordan with partial pivoting.
    std::vector<std::vector<double>> A = R;
    mc.inv.assign(d, std::vector<double>(d, 0.0));
    for (int r = 0; r < d; ++r) mc.inv[r][r] = 1.0;
    for (int c = 0; c < d; ++c) {
        int piv = c;
        for (int r = c + 1; r < d; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        std::swap(A[c], A[piv]);
        std::swap(mc.inv[c], mc.inv[piv]);
        double diag = A[c][c];
        for (int cc = 0; cc < d; ++cc) {
            A[c][cc] /= diag;
            mc.inv[c][cc] /= diag;
        }
        for (int r = 0; r < d; ++r) {
            if (r == c) continue;
            double f = A[r][c];
            if (f == 0.0) continue;
            for (int cc = 0; cc < d; ++cc) {
                A[r][cc] -= f * A[c][cc];
                mc.inv[r][cc] -= f * mc.inv[c][cc];
            }
        }
    }
    return cache.emplace(m, std::move(mc)).first->second;
}

} // namespace detail

inline TensorModeVector components_to_modes(const SymmetricTensorField& f) {
    const auto& mc = detail::mode_conversion(f.m);
    std::size_t nodes = f.comp[0].size();
    TensorModeVector tv;
    tv.m = f.m;
    tv.mode.assign(f.m + 1, CField(nodes, cplx(0, 0)));
    for (int n = 0; n <= f.m; ++n) {
        if ((f.m - n) % 2 != 0) continue;
        for (int k = 0; k <= f.m; ++k) {
            cplx w = mc.fwd[n][k];
            if (w == cplx(0, 0)) continue;
            const Field& src = f.comp[k];
            CField& dst = tv.mode[n];
            for (std::size_t i = 0; i < nodes; ++i) dst[i] += w * src[i];
        }
    }
    return tv;
}

// Exact inverse of components_to_modes. Off-parity or non-real-f0 content
// above `tol` (relative to the field scale) is rejected.
inline SymmetricTensorField modes_to_components(const TensorModeVector& tv, double tol = 1e-8) {
    const auto& mc = detail::mode_conversion(tv.m);
    int m = tv.m;
    std::size_t nodes = tv.mode[0].size();

    double scale = 0.0;
    for (const auto& pl : tv.mode)
        for (const cplx& v : pl) scale = std::max(scale, std::abs(v));
    double bad = 0.0;
    for (int n = 0; n <= m; ++n) {
        if ((m - n) % 2 == 0) continue;
        for (const cplx& v : tv.mode[n]) bad = std::max(bad, std::abs(v));
    }
    if (m % 2 == 0)
        for (const cplx& v : tv.mode[0]) bad = std::max(bad, std::abs(v.imag()));
    if (scale > 0.0 && bad > tol * scale)
        throw DataError("modes_to_components: parity/reality violation " + std::to_string(bad / scale));

    SymmetricTensorField f;
    f.m = m;
    f.comp.assign(m + 1, Field(nodes, 0.0));
    int d = detail::dof_count(m);
    std::vector<cplx> fm(m + 1);
    std::vector<double> dv(d), comp(d);
    for (std::size_t i = 0; i < nodes; ++i) {
        for (int n = 0; n <= m; ++n) fm[n] = tv.mode[n][i];
        detail::modes_to_dof(m, fm.data(), dv.data());
        for (int r = 0; r < d; ++r) {
            double acc = 0.0;
            for (int c = 0; c < d; ++c) acc += mc.inv[r][c] * dv[c];
            comp[r] = acc;
        }
        for (int k = 0; k <= m; ++k) f.comp[k][i] = comp[k];
    }
    return f;
}

// Pointwise <f(z), theta^m> with binomial multiplicities.
inline Field tensor_action(const SymmetricTensorField& f, double theta) {
    std::size_t nodes = f.comp[0].size();
    Field out(nodes, 0.0);
    double c = std::cos(theta), s = std::sin(theta);
    for (int k = 0; k <= f.m; ++k) {
        double w = static_cast<double>(binomial(f.m, k)) * std::pow(c, f.m - k) * std::pow(s, k);
        if (w == 0.0) continue;
        const Field& src = f.comp[k];
        for (std::size_t i = 0; i < nodes; ++i) out[i] += w * src[i];
    }
    return out;
}

// Mode synthesis of the action at one node; test/oracle helper.
inline double action_from_modes(const TensorModeVector& tv, std::size_t node, double theta) {
    double acc = (tv.m % 2 == 0) ? tv.mode[0][node].real() : 0.0;
    for (int n = 1; n <= tv.m; ++n) {
        cplx e = std::exp(cplx(0.0, -n * theta));
        acc += 2.0 * (tv.mode[n][node] * e).real();
    }
    return acc;
}

// Sequence-valued source F: plane p holds f_p for p <= m (parity of m), 0 beyond.
// By construction L^{m+1} F = 0.
inline ModeSequenceField source_sequence(const TensorModeVector& tv, const DiscGrid& g, int N) {
    ModeSequenceField F = make_interior_modes(g, N);
    for (int p = 0; p <= std::min(tv.m, N); ++p) {
        if ((tv.m - p) % 2 != 0) continue;
        F.mode[p] = tv.mode[p];
    }
    return F;
}

} // namespace mrt
