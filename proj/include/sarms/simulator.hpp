#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "sarms/geometry.hpp"
#include "sarms/microlocal.hpp"
#include "sarms/vec3.hpp"

namespace sarms {

using cplx = std::complex<double>;

struct Scatterer {
    Vec3 position;
    cplx amplitude{1.0, 0.0};
};

struct Scene {
    std::vector<Scatterer> scatterers;
    Vec3 center;
};

/// Stepped-frequency sweep with inclusive endpoints:
/// f_k = fc - B/2 + k B / (n - 1); a single frequency sits at fc.
struct FrequencyGrid {
    double center_hz = 10e9;
    double bandwidth_hz = 1e9;
    std::size_t n_freq = 1;

    void validate() const;
    double at(std::size_t k) const;
    double step() const;  // 0 for a single frequency
    std::vector<double> values() const;
};

/// P(f, s, r) stored frequency-major: index (f * n_tx + j) * n_rx + k.
struct PhaseHistory {
    AcquisitionGeometry geometry;
    FrequencyGrid freqs;
    std::vector<cplx> data;

    PhaseHistory() = default;
    PhaseHistory(const AcquisitionGeometry& g, const FrequencyGrid& f)
        : geometry(g), freqs(f), data(f.n_freq * g.n_tx * g.n_rx)
    {
    }

    std::size_t index(std::size_t f, std::size_t j, std::size_t k) const
    {
        return (f * geometry.n_tx + j) * geometry.n_rx + k;
    }
    cplx& at(std::size_t f, std::size_t j, std::size_t k) { return data[index(f, j, k)]; }
    const cplx& at(std::size_t f, std::size_t j, std::size_t k) const { return data[index(f, j, k)]; }
    std::size_t pair_stride() const { return geometry.n_tx * geometry.n_rx; }
};

using ProgressCallback = std::function<void(double fraction_done)>;

PhaseHistory phase_history(const Scene& scene, const AcquisitionGeometry& g, const FrequencyGrid& freqs,
                           const ProgressCallback& progress = {});

/// Seven unit scatterers: four corners and two edge midpoints of a 4 m square
/// on z = 0, plus one point 2 m above the square's centre. The layout is
/// centred on the origin; pass a centre to translate it.
Scene default_scene();
Scene default_scene(const Vec3& center);

Scene translate(const Scene& scene, const Vec3& offset);
Scene mirror_scene(const Scene& scene, double z0);

struct GateOptions {
    std::size_t oversample = 4;  // zero-padding factor of the delay profile
    // The delay window starts this many range cells (1/B) before the direct
    // path time, so the mainlobe of an echo just after it does not wrap
    // around to the far end of the window. Capped at a quarter window.
    double guard_cells = 4.0;
};

/// Slow-time gate (zero non-compliant pairs) followed by the fast-time gate
/// (range-compress each pair, zero delays at or below t_min, transform back).
/// Throws ShapeMismatch if the report does not match the data.
PhaseHistory gate_phase_history(const PhaseHistory& ph, const GatingReport& report, const GateOptions& opt = {});

}  // namespace sarms
