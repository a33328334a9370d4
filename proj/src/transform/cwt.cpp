#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "czw/parallel.hpp"
#include "czw/transform.hpp"

namespace czw {
namespace {

// Radial profile of a d = 2 wavelet: the transform along one axis equals the
// 1D transform of the projection onto that axis.
SampledFunction projection(const SampledFunction& phi) {
    const Grid& g = phi.grid;
    SampledFunction p(Grid(1, g.L, g.N));
    for (int i = 0; i < g.N; ++i) {
        cplx s = 0;
        for (int j = 0; j < g.N; ++j) s += phi.at(i, j);
        p.values[i] = s * g.h();
    }
    return p;
}

std::vector<cplx> radial_symbol(const SampledFunction& phi, double t, const Grid& g) {
    SampledFunction p = projection(phi);
    double limit = kPi / phi.grid.h();
    int N = g.N;
    auto signed_index = [N](int k) { return k < N / 2 ? k : k - N; };
    std::map<long, cplx> cache;
    std::vector<cplx> out(std::size_t(N) * N);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            long ka = signed_index(a), kb = signed_index(b);
            long n = ka * ka + kb * kb;
            auto it = cache.find(n);
            if (it == cache.end()) {
                double u = t * (kPi / g.L) * std::sqrt(double(n));
                it = cache.emplace(n, u <= limit ? dtft_at(p, u) : cplx(0.0)).first;
            }
            out[std::size_t(a) * N + b] = it->second;
        }
    return out;
}

void check_scales(const AffineGrid& ag, const Grid& g) {
    if (ag.grid != g) throw Error("cwt: affine grid is built over a different spatial grid");
    if (ag.t_min < 2 * g.h() * (1 - 1e-12)) throw Error("cwt: scale below resolution (t < 2h)");
}

template <class T>
void put(std::ostream& os, T v) {
    static_assert(std::endian::native == std::endian::little, "little-endian host expected");
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    T v;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw Error("read_cwt_binary: truncated file");
    return v;
}

}  // namespace

std::vector<cplx> wavelet_symbol(const MotherWavelet& phi, double t, const Grid& g) {
    if (phi.grid().d != g.d) throw Error("wavelet_symbol: wavelet and grid dimension differ");
    if (g.d == 1) return phi.scaled_spectrum(t, g);
    return radial_symbol(phi.base, t, g);
}

CwtCoefficients cwt(const SampledFunction& f, const MotherWavelet& phi, const AffineGrid& ag) {
    const Grid& g = f.grid;
    check_scales(ag, g);
    CwtCoefficients c;
    c.affine_grid = ag;
    c.wavelet_id = "mother-D" + std::to_string(phi.D) + "-d" + std::to_string(g.d);
    std::size_t S = ag.spatial_count();
    c.values.assign(S * std::size_t(ag.M), 0.0);
    auto F = to_spectrum(f);
    int K = ag.K(), stride = ag.stride;
    parallel_for(std::size_t(ag.M), [&](std::size_t j) {
        auto sym = wavelet_symbol(phi, ag.scale(int(j)), g);
        std::vector<cplx> spec(F.size());
        for (std::size_t k = 0; k < F.size(); ++k) spec[k] = F[k] * std::conj(sym[k]);
        SampledFunction full = from_spectrum(g, std::move(spec));
        cplx* dst = c.values.data() + j * S;
        if (g.d == 1) {
            for (int i = 0; i < K; ++i) dst[i] = full.values[std::size_t(i) * stride];
        } else {
            for (int a = 0; a < K; ++a)
                for (int b = 0; b < K; ++b) dst[std::size_t(a) * K + b] = full.at(a * stride, b * stride);
        }
    });
    for (const auto& v : c.values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw Error("cwt: non-finite coefficient");
    return c;
}

Reconstruction calderon_reconstruct(const CwtCoefficients& c, const MotherWavelet& phi, double r_min) {
    const AffineGrid& ag = c.affine_grid;
    const Grid& g = ag.grid;
    std::size_t S = ag.spatial_count();
    if (c.values.size() != S * std::size_t(ag.M)) throw Error("calderon_reconstruct: coefficient count mismatch");
    int K = ag.K(), stride = ag.stride;
    double fill = std::pow(double(stride), g.d);
    std::vector<std::vector<cplx>> parts(std::size_t(ag.M));
    parallel_for(std::size_t(ag.M), [&](std::size_t j) {
        double t = ag.scale(int(j));
        if (t < r_min * (1 - 1e-12)) return;
        // Zero-stuffed coefficients; the factor stride^d restores the lattice cell size.
        SampledFunction stuffed(g);
        const cplx* src = c.values.data() + j * S;
        if (g.d == 1) {
            for (int i = 0; i < K; ++i) stuffed.values[std::size_t(i) * stride] = src[i] * fill;
        } else {
            for (int a = 0; a < K; ++a)
                for (int b = 0; b < K; ++b) stuffed.at(a * stride, b * stride) = src[std::size_t(a) * K + b] * fill;
        }
        auto spec = to_spectrum(stuffed);
        auto sym = wavelet_symbol(phi, t, g);
        for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= sym[k];
        parts[j] = std::move(spec);
    });
    std::vector<cplx> total(g.size(), 0.0);
    for (const auto& p : parts)
        for (std::size_t k = 0; k < p.size(); ++k) total[k] += p[k];
    for (auto& v : total) v *= ag.log_rho();
    return {from_spectrum(g, std::move(total)), -1};
}

Reconstruction calderon_reconstruct(const CwtCoefficients& c, const MotherWavelet& phi, const SampledFunction& analyzed,
                                    double r_min) {
    Reconstruction r = calderon_reconstruct(c, phi, r_min);
    r.residual = relative_l2(r.f, analyzed);
    return r;
}

double coefficient_energy(const CwtCoefficients& c) {
    std::vector<double> sq(c.values.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = std::norm(c.values[i]);
    return mu_integrate(c.affine_grid, sq);
}

double relative_l2(const SampledFunction& approx, const SampledFunction& exact) {
    if (approx.grid != exact.grid) throw Error("relative_l2: grids differ");
    double ref = l2_norm(exact);
    double diff = l2_norm(approx - exact);
    return ref > 0 ? diff / ref : diff;
}

// Layout: "CZWC", u32 d, u32 N, f64 L, u32 stride, f64 t_min, f64 rho, u32 M,
// u32 id length, id bytes, then the (re, im) f64 pairs.
void write_binary(const CwtCoefficients& c, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("write_binary: cannot open " + path);
    const AffineGrid& ag = c.affine_grid;
    os.write("CZWC", 4);
    put<std::uint32_t>(os, std::uint32_t(ag.grid.d));
    put<std::uint32_t>(os, std::uint32_t(ag.grid.N));
    put<double>(os, ag.grid.L);
    put<std::uint32_t>(os, std::uint32_t(ag.stride));
    put<double>(os, ag.t_min);
    put<double>(os, ag.rho);
    put<std::uint32_t>(os, std::uint32_t(ag.M));
    put<std::uint32_t>(os, std::uint32_t(c.wavelet_id.size()));
    os.write(c.wavelet_id.data(), std::streamsize(c.wavelet_id.size()));
    for (const auto& v : c.values) {
        put<double>(os, v.real());
        put<double>(os, v.imag());
    }
}

CwtCoefficients read_cwt_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("read_cwt_binary: cannot open " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "CZWC", 4) != 0) throw Error("read_cwt_binary: bad magic");
    int d = int(get<std::uint32_t>(is));
    int N = int(get<std::uint32_t>(is));
    double L = get<double>(is);
    int stride = int(get<std::uint32_t>(is));
    double t_min = get<double>(is);
    double rho = get<double>(is);
    int M = int(get<std::uint32_t>(is));
    CwtCoefficients c;
    c.affine_grid = AffineGrid(Grid(d, L, N), stride, t_min, rho, M);
    c.wavelet_id.resize(get<std::uint32_t>(is));
    if (!is.read(c.wavelet_id.data(), std::streamsize(c.wavelet_id.size()))) throw Error("read_cwt_binary: truncated file");
    c.values.resize(c.affine_grid.cell_count());
    for (auto& v : c.values) {
        double re = get<double>(is);
        double im = get<double>(is);
        v = {re, im};
    }
    return c;
}

}  // namespace czw
