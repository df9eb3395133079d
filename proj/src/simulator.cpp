#include "sarms/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <fftw3.h>

#include "sarms/constants.hpp"
#include "sarms/error.hpp"

namespace sarms {

void FrequencyGrid::validate() const
{
    if (n_freq < 1) throw std::invalid_argument("frequency grid needs at least one sample");
    if (!(bandwidth_hz >= 0.0)) throw std::invalid_argument("bandwidth must be non-negative");
    if (n_freq > 1 && !(bandwidth_hz > 0.0)) throw std::invalid_argument("several frequencies need a positive bandwidth");
    if (!(center_hz - 0.5 * bandwidth_hz > 0.0)) throw std::invalid_argument("all frequencies must be positive");
}

double FrequencyGrid::step() const
{
    return n_freq > 1 ? bandwidth_hz / static_cast<double>(n_freq - 1) : 0.0;
}

double FrequencyGrid::at(std::size_t k) const
{
    if (n_freq == 1) return center_hz;
    return center_hz - 0.5 * bandwidth_hz + static_cast<double>(k) * step();
}

std::vector<double> FrequencyGrid::values() const
{
    std::vector<double> f(n_freq);
    for (std::size_t k = 0; k < n_freq; ++k) f[k] = at(k);
    return f;
}

PhaseHistory phase_history(const Scene& scene, const AcquisitionGeometry& g, const FrequencyGrid& freqs,
                           const ProgressCallback& progress)
{
    g.validate();
    freqs.validate();
    PhaseHistory ph(g, freqs);
    const auto f = freqs.values();
    const std::size_t npairs = g.n_tx * g.n_rx;
    const double kfac = -2.0 * kPi / kSpeedOfLight;

    std::size_t done = 0;
    const long long total = static_cast<long long>(npairs);
#pragma omp parallel for schedule(dynamic, 4)
    for (long long p = 0; p < total; ++p) {
        const std::size_t j = static_cast<std::size_t>(p) / g.n_rx;
        const std::size_t k = static_cast<std::size_t>(p) % g.n_rx;
        const Vec3 tx = transmitter_position(g, g.s_at(j));
        const Vec3 rx = receiver_position(g, g.r_at(k));
        for (const auto& sc : scene.scatterers) {
            const double path = distance(tx, sc.position) + distance(sc.position, rx);
            for (std::size_t m = 0; m < f.size(); ++m)
                ph.at(m, j, k) += sc.amplitude * std::polar(1.0, kfac * f[m] * path);
        }
        if (progress) {
#pragma omp critical(sarms_progress)
            {
                ++done;
                progress(static_cast<double>(done) / static_cast<double>(npairs));
            }
        }
    }
    return ph;
}

Scene default_scene()
{
    Scene s;
    const double h = 2.0;  // half of the 4 m square
    const Vec3 pts[] = {{-h, -h, 0.0}, {h, -h, 0.0}, {-h, h, 0.0}, {h, h, 0.0},
                        {0.0, h, 0.0}, {h, 0.0, 0.0}, {0.0, 0.0, 2.0}};
    for (const auto& p : pts) s.scatterers.push_back({p, {1.0, 0.0}});
    s.center = {0.0, 0.0, 0.0};
    return s;
}

Scene default_scene(const Vec3& center)
{
    return translate(default_scene(), center);
}

Scene translate(const Scene& scene, const Vec3& offset)
{
    Scene out = scene;
    for (auto& sc : out.scatterers) sc.position += offset;
    out.center += offset;
    return out;
}

Scene mirror_scene(const Scene& scene, double z0)
{
    Scene out = scene;
    for (auto& sc : out.scatterers) sc.position = mirror(sc.position, z0);
    out.center = mirror(out.center, z0);
    return out;
}

namespace {

struct FftwBuffer {
    fftw_complex* ptr;
    explicit FftwBuffer(std::size_t n) : ptr(fftw_alloc_complex(n))
    {
        if (!ptr) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(ptr); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

}  // namespace

PhaseHistory gate_phase_history(const PhaseHistory& ph, const GatingReport& report, const GateOptions& opt)
{
    const auto& g = ph.geometry;
    if (report.n_tx != g.n_tx || report.n_rx != g.n_rx || report.entries.size() != g.n_tx * g.n_rx)
        throw ShapeMismatch("gating report covers " + std::to_string(report.n_tx) + "x" + std::to_string(report.n_rx) +
                            " pairs but the data has " + std::to_string(g.n_tx) + "x" + std::to_string(g.n_rx));
    if (ph.data.size() != ph.freqs.n_freq * g.n_tx * g.n_rx)
        throw ShapeMismatch("phase history payload does not match its dimensions");
    if (opt.oversample < 1) throw std::invalid_argument("gate oversample must be positive");
    if (!(opt.guard_cells >= 0.0)) throw std::invalid_argument("gate guard must be non-negative");

    PhaseHistory out = ph;
    const std::size_t nf = ph.freqs.n_freq;
    const std::size_t stride = ph.pair_stride();
    const std::size_t npairs = g.n_tx * g.n_rx;

    // Slow-time gate.
    for (std::size_t p = 0; p < npairs; ++p) {
        if (report.entries[p].roi_compliant) continue;
        for (std::size_t m = 0; m < nf; ++m) out.data[m * stride + p] = 0.0;
    }
    if (nf < 2) return out;

    // Fast-time gate. Bin n of the zero-padded inverse transform holds delays
    // with frac(df * tau) = n / N. No echo arrives earlier than the direct
    // transmitter-to-receiver time 2D/c0, so every bin is placed in the window
    // [2D/c0 - guard, 2D/c0 - guard + 1/df); the guard keeps the delay
    // response of an echo just after 2D/c0 from wrapping to the window's end.
    const std::size_t N = nf * opt.oversample;
    const double df = ph.freqs.step();
    const double guard = std::min(opt.guard_cells / ph.freqs.bandwidth_hz, 0.25 / df);

    fftw_plan inv, fwd;
    {
        FftwBuffer a(N);
        inv = fftw_plan_dft_1d(static_cast<int>(N), a.ptr, a.ptr, FFTW_BACKWARD, FFTW_ESTIMATE);
        fwd = fftw_plan_dft_1d(static_cast<int>(N), a.ptr, a.ptr, FFTW_FORWARD, FFTW_ESTIMATE);
    }

    const long long total = static_cast<long long>(npairs);
#pragma omp parallel
    {
        FftwBuffer buf(N);
#pragma omp for schedule(static)
        for (long long pp = 0; pp < total; ++pp) {
            const std::size_t p = static_cast<std::size_t>(pp);
            const GatingEntry& e = report.entries[p];
            if (!e.roi_compliant) continue;
            const double tau_lo = 2.0 * e.D / kSpeedOfLight;
            if (!(e.t_min > tau_lo)) continue;

            for (std::size_t n = 0; n < N; ++n) buf.ptr[n][0] = buf.ptr[n][1] = 0.0;
            for (std::size_t m = 0; m < nf; ++m) {
                buf.ptr[m][0] = out.data[m * stride + p].real();
                buf.ptr[m][1] = out.data[m * stride + p].imag();
            }
            fftw_execute_dft(inv, buf.ptr, buf.ptr);
            const double start = tau_lo - guard;
            for (std::size_t n = 0; n < N; ++n) {
                const double u = static_cast<double>(n) / static_cast<double>(N) - df * start;
                const double tau = start + (u - std::floor(u)) / df;
                if (tau <= e.t_min) buf.ptr[n][0] = buf.ptr[n][1] = 0.0;
            }
            fftw_execute_dft(fwd, buf.ptr, buf.ptr);
            const double scale = 1.0 / static_cast<double>(N);
            for (std::size_t m = 0; m < nf; ++m)
                out.data[m * stride + p] = cplx(buf.ptr[m][0], buf.ptr[m][1]) * scale;
        }
    }
    fftw_destroy_plan(inv);
    fftw_destroy_plan(fwd);
    return out;
}

}  // namespace sarms
