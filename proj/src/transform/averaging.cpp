#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "czw/parallel.hpp"
#include "czw/transform.hpp"

namespace czw {
namespace {

// s^-1 f(n h / s) for n = -(N-1) .. N-1, read from the interpolant of f and
// zero outside its domain. Entry n + N - 1 holds offset n.
std::vector<cplx> dilated_offsets(const SampledFunction& f, double s, const Grid& g) {
    int N = g.N;
    std::size_t count = std::size_t(2 * N - 1);
    double y0 = -(N - 1) * g.h() / s, dy = g.h() / s;
    auto v = interpolate(f, y0, dy, count);
    double lo = -f.grid.L, hi = f.grid.L - f.grid.h();
    for (std::size_t n = 0; n < count; ++n) {
        double y = y0 + dy * double(n);
        v[n] = (y < lo || y > hi) ? cplx(0.0) : v[n] / s;
    }
    return v;
}

bool is_real(const SampledFunction& f) {
    for (const auto& v : f.values)
        if (v.imag() != 0) return false;
    return true;
}

}  // namespace

AveragingSymbol hypothesis_bound(double delta) {
    return [delta](double u, double v, double w, double s, double t) {
        double r = std::max({s, std::abs(u - w), std::abs(v - w)});
        return std::pow(t, delta) / std::pow(r, 2 + delta);
    };
}

SampledFunction2D averaged_wavelet(const AveragingSymbol& H, const SampledFunction& psi, const SampledFunction& phi,
                                   const AffinePoint& z, const AffineGrid& ag, const AveragingOptions& opt,
                                   std::vector<std::string>* warnings) {
    const Grid& g = ag.grid;
    if (g.d != 1 || psi.grid.d != 1 || phi.grid.d != 1) throw Error("averaged_wavelet: d = 1 only");
    double w = z.w[0], t = z.t;
    if (!(t > 0)) throw Error("averaged_wavelet: scale must be positive");
    int N = g.N, K = ag.K(), stride = ag.stride;
    double du = stride * g.h(), lr = ag.log_rho();

    std::vector<double> scales;
    if (opt.region == AveragingRegion::Upper) {
        for (int j = 0;; ++j) {
            double s = t * std::pow(ag.rho, j + 0.5);
            if (s > t * opt.scale_span) break;
            scales.push_back(s);
        }
    } else {
        for (int j = 0;; ++j) {
            double s = 3 * t * std::pow(ag.rho, -(j + 0.5));
            if (s < 2 * g.h()) break;
            scales.push_back(s);
        }
    }

    if (scales.empty()) return SampledFunction2D(g);

    std::vector<double> pos(K);
    for (int k = 0; k < K; ++k) pos[k] = ag.position(k);
    bool local = opt.region == AveragingRegion::Local;
    AveragingSymbol bound = opt.delta_check > 0 ? hypothesis_bound(opt.delta_check) : AveragingSymbol();
    bool real_input = is_real(psi) && is_real(phi);

    // Scales are split into fixed chunks summed in chunk order, so the result
    // does not depend on the worker count.
    std::size_t chunks = std::min<std::size_t>(scales.size(), 8);
    std::vector<Eigen::MatrixXcd> partial(chunks);
    std::vector<double> ratio(chunks, 0.0);
    parallel_for(chunks, [&](std::size_t c) {
        Eigen::MatrixXd Hs(K, K), Pr(N, K), Qr(N, K), acc_r = Eigen::MatrixXd::Zero(N, N);
        Eigen::MatrixXcd Pc(N, K), Qc(N, K), acc_c;
        if (!real_input) acc_c = Eigen::MatrixXcd::Zero(N, N);
        for (std::size_t idx = c; idx < scales.size(); idx += chunks) {
            double s = scales[idx];
            for (int a = 0; a < K; ++a)
                for (int b = 0; b < K; ++b) {
                    double u = pos[a], v = pos[b];
                    bool inside = !local || (std::abs(u - w) <= 9 * t && std::abs(v - w) <= 9 * t);
                    double val = inside ? H(u, v, w, s, t) : 0.0;
                    if (!std::isfinite(val)) throw Error("averaged_wavelet: symbol is not finite");
                    Hs(a, b) = val;
                    if (bound && inside) ratio[c] = std::max(ratio[c], std::abs(val) / bound(u, v, w, s, t));
                }
            auto ps = dilated_offsets(psi, s, g), qs = dilated_offsets(phi, s, g);
            for (int i = 0; i < N; ++i)
                for (int k = 0; k < K; ++k) {
                    int n = i - k * stride + N - 1;
                    if (real_input) {
                        Pr(i, k) = ps[n].real();
                        Qr(i, k) = qs[n].real();
                    } else {
                        Pc(i, k) = ps[n];
                        Qc(i, k) = qs[n];
                    }
                }
            if (real_input)
                acc_r.noalias() += (Pr * Hs) * Qr.transpose();
            else
                acc_c.noalias() += (Pc * Hs.cast<cplx>()) * Qc.transpose();
        }
        partial[c] = real_input ? Eigen::MatrixXcd(acc_r.cast<cplx>()) : acc_c;
    });
    Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(N, N);
    for (const auto& p : partial) total += p;
    total *= du * du * lr;
    double worst_ratio = *std::max_element(ratio.begin(), ratio.end());

    if (warnings && bound && worst_ratio > 1 + 1e-12) {
        std::ostringstream os;
        os << "averaged_wavelet: |H| exceeds the hypothesis bound by a factor " << worst_ratio << " on sampled points";
        warnings->push_back(os.str());
    }
    SampledFunction2D nu(g);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) nu.at(i, j) = total(i, j);
    return nu;
}

SampledFunction2D partial_antiderivative_y(const SampledFunction2D& nu, int kappa, double t) {
    if (kappa < 0) throw Error("partial_antiderivative_y: kappa must be nonnegative");
    if (kappa == 0) return nu;
    const Grid& g = nu.grid;
    int N = g.N;
    SampledFunction2D out(g);
    double scale = std::pow(t, -kappa);
    SampledFunction row(g);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) row.values[j] = nu.at(i, j);
        auto spec = to_spectrum(row);
        for (int k = 0; k < N; ++k) {
            double xi = g.freq(k);
            spec[k] = (k == 0 || k == N / 2) ? cplx(0.0) : spec[k] * std::pow(xi, -kappa);
        }
        auto back = from_spectrum(g, std::move(spec));
        for (int j = 0; j < N; ++j) out.at(i, j) = back.values[j] * scale;
    }
    return out;
}

}  // namespace czw
