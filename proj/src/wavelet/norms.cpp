#include <cmath>
#include <limits>
#include <sstream>

#include "czw/wavelet.hpp"

namespace czw {
namespace {

constexpr double kMomentTolerance = 1e-8;

// Offsets h, 2h, 4h, ... up to length 1, in grid steps.
std::vector<int> dyadic_steps(const Grid& g, double max_len) {
    std::vector<int> steps;
    for (int s = 1; s * g.h() <= max_len * (1 + 1e-12) && s < g.N; s *= 2) steps.push_back(s);
    return steps;
}

template <class Weight>
double weighted_norm_2d(const SampledFunction2D& f, double delta, Weight&& weight) {
    const Grid& g = f.grid;
    int N = g.N;
    std::vector<double> wt(std::size_t(N) * N);
    double size = 0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            double w = weight(g.node(i), g.node(j));
            wt[std::size_t(i) * N + j] = w;
            size = std::max(size, w * std::abs(f.at(i, j)));
        }
    static const int dirs[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
    double holder = 0;
    for (int s : dyadic_steps(g, 1.0)) {
        for (const auto& dv : dirs) {
            double len = s * g.h() * std::hypot(double(dv[0]), double(dv[1]));
            if (len > 1.0 + 1e-12) continue;
            double inv = 1.0 / std::pow(len, delta);
            int di = dv[0] * s, dj = dv[1] * s;
            for (int i = std::max(0, -di); i < std::min(N, N - di); ++i)
                for (int j = std::max(0, -dj); j < std::min(N, N - dj); ++j) {
                    double diff = std::abs(f.at(i + di, j + dj) - f.at(i, j));
                    holder = std::max(holder, wt[std::size_t(i) * N + j] * diff * inv);
                }
        }
    }
    return size + holder;
}

bool moments_vanish_1d(const SampledFunction& f, const AffinePoint& z, int k) {
    double mass = l1_norm(f);
    if (mass == 0) return true;
    for (int a = 0; a <= k; ++a)
        if (std::abs(moment(f, a, z.w[0], z.t)) > kMomentTolerance * mass) return false;
    return true;
}

// Moments along one slot of a 2D function, for every value of the other variable.
bool moments_vanish_2d(const SampledFunction2D& f, const AffinePoint& z, int k, int slot) {
    const Grid& g = f.grid;
    int N = g.N;
    double worst_mass = 0;
    for (int o = 0; o < N; ++o) {
        double m = 0;
        for (int i = 0; i < N; ++i) m += std::abs(slot == 0 ? f.at(i, o) : f.at(o, i));
        worst_mass = std::max(worst_mass, m * g.h());
    }
    if (worst_mass == 0) return true;
    for (int a = 0; a <= k; ++a)
        for (int o = 0; o < N; ++o) {
            cplx s = 0;
            for (int i = 0; i < N; ++i) {
                cplx v = slot == 0 ? f.at(i, o) : f.at(o, i);
                s += v * std::pow((g.node(i) - z.w[0]) / z.t, a);
            }
            if (std::abs(s * g.h()) > kMomentTolerance * worst_mass) return false;
        }
    return true;
}

}  // namespace

double star_norm(const SampledFunction& f, double eta, double delta) {
    if (f.grid.d == 2) return star_norm(SampledFunction2D::from_plane(f), eta, delta);
    return star_norm_parts(f, eta, delta).total();
}

NormParts star_norm_parts(const SampledFunction& f, double eta, double delta) {
    const Grid& g = f.grid;
    if (g.d != 1) throw Error("star_norm_parts: one-dimensional input required");
    int N = g.N;
    std::vector<double> wt(N);
    double size = 0;
    for (int i = 0; i < N; ++i) {
        double x = g.node(i);
        wt[i] = std::pow(1 + x * x, (1 + eta) / 2);
        size = std::max(size, wt[i] * std::abs(f.values[i]));
    }
    double holder = 0;
    for (int s : dyadic_steps(g, 1.0)) {
        double inv = 1.0 / std::pow(s * g.h(), delta);
        for (int i = 0; i < N; ++i) {
            for (int j : {i + s, i - s}) {
                if (j < 0 || j >= N) continue;
                holder = std::max(holder, wt[i] * std::abs(f.values[j] - f.values[i]) * inv);
            }
        }
    }
    return {size, holder};
}

double star_norm(const SampledFunction2D& f, double eta, double delta) {
    return weighted_norm_2d(f, delta, [eta](double x, double y) { return std::pow(1 + x * x + y * y, (2 + eta) / 2); });
}

double sigma_norm(const SampledFunction2D& f, double sigma, double eta, double delta) {
    if (sigma < 0) throw Error("sigma_norm: sigma must be nonnegative");
    if (sigma > 1 + eta) return star_norm(f, eta, delta);
    return weighted_norm_2d(f, delta, [sigma, eta](double x, double y) {
        return std::pow(1 + x * x + y * y, (1 + sigma) / 2) * std::pow(1 + std::abs(y), 1 + eta - sigma);
    });
}

void WaveletClassSpec::validate() const {
    if (!(delta > 0 && delta <= 1)) throw Error("wavelet class: delta must lie in (0, 1]");
    if (k < 0) throw Error("wavelet class: k must be nonnegative");
    if (slots() < 1 || slots() > 2) throw Error("wavelet class: one or two tensor slots required");
    if (sigma && *sigma < 0) throw Error("wavelet class: sigma must be nonnegative");
    if (kind == ClassKind::Standard && !(eta > 0 && eta < delta))
        throw Error("wavelet class: need 0 < eta < delta");
    if (kind == ClassKind::Sigma && (!sigma || slots() != 2))
        throw Error("wavelet class: the sigma class needs sigma and two slots");
    if (kind == ClassKind::RapidDecay && slots() != 1) throw Error("wavelet class: the S_0 class has one slot");
}

std::string WaveletClassSpec::describe() const {
    std::ostringstream os;
    const char* kinds[] = {"standard", "rapid-decay", "sigma"};
    os << kinds[int(kind)] << " k=" << k << " delta=" << delta << " eta=" << eta;
    if (sigma) os << " sigma=" << *sigma;
    os << " iota=";
    for (bool c : cancellative) os << (c ? '0' : '1');
    return os.str();
}

WaveletClassSpec WaveletClassSpec::noncancellative(double delta, double eta) {
    WaveletClassSpec s;
    s.delta = delta;
    s.eta = eta;
    s.cancellative = {false};
    return s;
}

WaveletClassSpec WaveletClassSpec::rapid_decay(double delta) {
    WaveletClassSpec s;
    s.delta = delta;
    s.eta = 3.0;  // 2d + 1 with d = 1
    s.cancellative = {true};
    s.kind = ClassKind::RapidDecay;
    return s;
}

WaveletClassSpec WaveletClassSpec::tensor(bool cancel_x, bool cancel_y, double delta, double eta) {
    WaveletClassSpec s;
    s.delta = delta;
    s.eta = eta;
    s.cancellative = {cancel_x, cancel_y};
    return s;
}

WaveletClassSpec WaveletClassSpec::sigma_class(double sigma, int k, double delta) {
    WaveletClassSpec s;
    s.delta = delta;
    s.k = k;
    s.eta = k + delta;
    s.sigma = sigma;
    s.cancellative = {false, true};
    s.kind = ClassKind::Sigma;
    return s;
}

double class_membership(const SampledFunction& f, const AffinePoint& z, const WaveletClassSpec& spec) {
    if (f.grid.d != 1) throw Error("class_membership: use the 2D overload for tensor functions");
    if (spec.slots() != 1) throw Error("class_membership: one-slot class expected");
    if (spec.cancellative[0] && !moments_vanish_1d(f, z, spec.k)) return std::numeric_limits<double>::infinity();
    double best = 0;
    for (int gamma = 0; gamma <= spec.k; ++gamma) {
        SampledFunction d = derivative(f, gamma);
        SampledFunction u = sy_inverse(z, d);
        u *= cplx(std::pow(z.t, gamma));
        double surplus = spec.kind == ClassKind::RapidDecay ? spec.eta : spec.eta + gamma;
        best = std::max(best, star_norm(u, surplus, spec.delta));
    }
    return best;
}

double class_membership(const SampledFunction2D& f, const AffinePoint& z, const WaveletClassSpec& spec) {
    if (spec.slots() != 2) throw Error("class_membership: two-slot class expected");
    for (int slot = 0; slot < 2; ++slot)
        if (spec.cancellative[slot] && !moments_vanish_2d(f, z, spec.k, slot))
            return std::numeric_limits<double>::infinity();
    if (spec.kind == ClassKind::Sigma) {
        auto u = sy_inverse(z, f);
        return sigma_norm(u, *spec.sigma, spec.eta, spec.delta);
    }
    double best = 0;
    SampledFunction plane = f.as_plane();
    for (int g1 = 0; g1 <= spec.k; ++g1)
        for (int g2 = 0; g1 + g2 <= spec.k; ++g2) {
            SampledFunction d = derivative(derivative(plane, g1, 0), g2, 1);
            auto u = sy_inverse(z, SampledFunction2D::from_plane(d));
            double scale = std::pow(z.t, g1 + g2);
            for (auto& v : u.values) v *= scale;
            best = std::max(best, star_norm(u, spec.eta + g1 + g2, spec.delta));
        }
    return best;
}

}  // namespace czw
