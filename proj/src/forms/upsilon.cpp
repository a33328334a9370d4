#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include "czw/forms.hpp"
#include "czw/parallel.hpp"

namespace czw {
namespace {

double support_radius(const SampledFunction& f) {
    double r = 0;
    for (int i = 0; i < f.grid.N; ++i)
        if (f.values[i] != cplx(0.0)) r = std::max(r, std::abs(f.grid.node(i)));
    return r;
}

// sum_{gamma <= k} c_gamma ((x - w)/t)^gamma, cut off smoothly inside the domain.
SampledFunction taylor_polynomial(const std::vector<cplx>& c, int k, double w, double t, const Grid& g) {
    SampledFunction p(g);
    if (k < 0) return p;
    double room = g.L - std::abs(w);
    for (int i = 0; i < g.N; ++i) {
        double x = g.node(i), y = (x - w) / t;
        cplx s = 0, pw = 1;
        for (int gam = 0; gam <= k; ++gam, pw *= y) s += c[gam] * pw;
        p.values[i] = s * smooth_window(x - w, 0.5 * room, 0.9 * room);
    }
    return p;
}

bool is_zero(const SampledFunction& f) {
    return std::all_of(f.values.begin(), f.values.end(), [](cplx v) { return v == cplx(0.0); });
}

}  // namespace

const char* region_name(UpsilonRegion r) {
    switch (r) {
        case UpsilonRegion::Far: return "F";
        case UpsilonRegion::Near: return "S";
        default: return "A";
    }
}

UpsilonRegion classify_region(double u, double v, double w, double s, double t) {
    double m = std::max(std::abs(u - w), std::abs(v - w));
    if (m >= 3 * s) return UpsilonRegion::Far;
    return s <= 3 * t ? UpsilonRegion::Near : UpsilonRegion::HighLow;
}

cplx upsilon(const UpsilonInputs& in, double u, double v, double w, double s, double t) {
    if (!(t > 0)) throw Error("upsilon: t must be positive");
    if (s < t * (1 - 1e-12)) throw Error("upsilon: requires s >= t");
    if (in.k1 < 0 || in.k2 < 0) throw Error("upsilon: orders must be nonnegative");
    const Grid& g = in.grid;
    SampledFunction psi = sy(AffinePoint(u, s), in.psi, g);
    SampledFunction phi = sy(AffinePoint(v, s), in.phi, g);
    SampledFunction third = sy(AffinePoint(w, t), in.mother.base, g);
    cplx value = in.lambda(psi, phi, third);

    bool in_a = std::max(std::abs(u - w), std::abs(v - w)) <= 3 * s && s >= 3 * t;
    if (!in_a) return value;

    int kmax = std::max(in.k1, in.k2);
    if (int(in.fams.size()) <= kmax) throw Error("upsilon: gamma families up to max(k1, k2) required");
    std::vector<cplx> a(kmax + 1), b(kmax + 1);
    for (int gam = 0; gam <= kmax; ++gam) {
        if (in.fams[gam].gamma != gam) throw Error("upsilon: fams[g] must be the gamma = g family");
        SampledFunction theta = sy(AffinePoint(w, t), in.fams[gam].base, g);
        a[gam] = inner(psi, theta);
        b[gam] = inner(phi, theta);
    }
    SampledFunction P = taylor_polynomial(a, in.k1, w, t, g);
    SampledFunction Pm = taylor_polynomial(a, in.k1 - 1, w, t, g);
    SampledFunction Q = taylor_polynomial(b, in.k2, w, t, g);
    SampledFunction Qm = taylor_polynomial(b, in.k2 - 1, w, t, g);

    cplx correction = in.lambda(P, Q, third);
    if (!is_zero(Pm)) correction += in.lambda(Pm, phi - Q, third);
    if (!is_zero(Qm)) correction -= in.lambda(psi - P, Qm, third);
    return value - correction;
}

UpsilonField sample_upsilon(const UpsilonInputs& in, double w, double t, const UpsilonSampling& opt) {
    if (opt.count < 1) throw Error("sample_upsilon: count must be positive");
    if (!(opt.ratio_max > 1 && opt.offset_min > 0 && opt.offset_max > opt.offset_min))
        throw Error("sample_upsilon: need ratio_max > 1 and 0 < offset_min < offset_max");
    double reach = std::abs(w) + t * (opt.offset_max + opt.ratio_max * std::max(support_radius(in.psi), support_radius(in.phi)));
    if (reach > in.grid.L) throw Error("sample_upsilon: sampled supports leave the domain; enlarge L or shrink t");

    UpsilonField field;
    field.k1 = in.k1;
    field.k2 = in.k2;
    field.w = w;
    field.t = t;
    field.seed = opt.seed;

    int n = opt.count;
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<int>> perm(3, std::vector<int>(n));
    for (auto& p : perm) {
        std::iota(p.begin(), p.end(), 0);
        std::shuffle(p.begin(), p.end(), rng);
    }
    double lr = std::log(opt.ratio_max), lo = std::log(opt.offset_min), span = std::log(opt.offset_max / opt.offset_min);
    double rpsi = support_radius(in.psi), rphi = support_radius(in.phi), rmother = support_radius(in.mother.base);
    field.samples.resize(n);
    for (int i = 0; i < n; ++i) {
        double q0 = (perm[0][i] + unit(rng)) / n, q1 = (perm[1][i] + unit(rng)) / n, q2 = (perm[2][i] + unit(rng)) / n;
        double su = unit(rng) < 0.5 ? -1.0 : 1.0, sv = unit(rng) < 0.5 ? -1.0 : 1.0;
        UpsilonSample& smp = field.samples[i];
        smp.w = w;
        smp.t = t;
        smp.s = t * std::exp(lr * q0);
        smp.u = w + su * t * std::exp(lo + span * q1);
        smp.v = w + sv * t * std::exp(lo + span * q2);
        smp.region = classify_region(smp.u, smp.v, w, smp.s, t);
        double left = std::max({smp.u - rpsi * smp.s, smp.v - rphi * smp.s, w - rmother * t});
        double right = std::min({smp.u + rpsi * smp.s, smp.v + rphi * smp.s, w + rmother * t});
        smp.disjoint = left > right;
    }
    parallel_for(field.samples.size(), [&](std::size_t i) {
        auto& smp = field.samples[i];
        smp.value = upsilon(in, smp.u, smp.v, smp.w, smp.s, smp.t);
    });
    return field;
}

DecayCertificate upsilon_decay_certificate(const UpsilonField& field, double eta, double relative_floor) {
    if (!(eta > 0)) throw Error("upsilon_decay_certificate: eta must be positive");
    DecayCertificate c;
    c.eta = eta;
    c.seed = field.seed;
    int k = field.k1 + field.k2;
    c.target = -(2.0 + k + eta);
    for (const auto& s : field.samples) {
        if (!std::isfinite(s.value.real()) || !std::isfinite(s.value.imag()))
            throw Error("upsilon_decay_certificate: non-finite sample");
        switch (s.region) {
            case UpsilonRegion::Far: ++c.far; break;
            case UpsilonRegion::Near: ++c.near; break;
            case UpsilonRegion::HighLow: ++c.highlow; break;
        }
    }
    if (c.far < 8 || c.near < 8 || c.highlow < 8)
        throw Error("upsilon_decay_certificate: fewer than 8 samples in a region (F " + std::to_string(c.far) +
                    ", S " + std::to_string(c.near) + ", A " + std::to_string(c.highlow) + ")");

    double peak = 0;
    for (const auto& s : field.samples) peak = std::max(peak, std::abs(s.value));
    c.floor = relative_floor * peak;
    std::vector<double> xs, ys;
    for (const auto& s : field.samples) {
        double r = std::max({s.s, std::abs(s.u - s.w), std::abs(s.v - s.w)});
        double mag = std::abs(s.value);
        c.constant = std::max(c.constant, mag * std::pow(r, 2.0 + k + eta) / std::pow(s.t, k + eta));
        if (s.disjoint && s.region != UpsilonRegion::HighLow) {
            ++c.disjoint;
            if (mag > 0) ++c.disjoint_nonzero;
        }
        if (mag > 0 && mag <= c.floor) ++c.below_floor;
        if (mag > c.floor) {
            xs.push_back(std::log(r));
            ys.push_back(std::log(mag));
        }
    }
    c.nonzero = int(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
    if (!xs.empty()) mx /= double(xs.size()), my /= double(xs.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (xs.size() < 2 || !(sxx > 0)) {
        c.degenerate = true;
        c.slope = c.intercept = 0;
        return c;
    }
    c.slope = sxy / sxx;
    c.intercept = my - c.slope * mx;
    return c;
}

void write_csv(const UpsilonField& field, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("write_csv: cannot open " + path);
    os << "u,v,w,s,t,re,im\n";
    char buf[256];
    for (const auto& s : field.samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.u, s.v, s.w, s.s, s.t,
                      s.value.real(), s.value.imag());
        os << buf;
    }
}

}  // namespace czw
