#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "sarms/geometry.hpp"
#include "sarms/simulator.hpp"
#include "sarms/vec3.hpp"

namespace sarms {

struct VoxelGrid {
    Vec3 origin;
    double spacing = 1.0;
    std::size_t nx = 1, ny = 1, nz = 1;

    void validate() const;
    std::size_t size() const { return nx * ny * nz; }
    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return (i * ny + j) * nz + k; }
    Vec3 world(std::size_t i, std::size_t j, std::size_t k) const
    {
        return origin + Vec3{static_cast<double>(i), static_cast<double>(j), static_cast<double>(k)} * spacing;
    }
    Vec3 world(std::size_t flat) const { return world(flat / (ny * nz), (flat / nz) % ny, flat % nz); }
    /// Grid of n^3 voxels whose centre voxel (n/2, n/2, n/2) sits exactly at c.
    static VoxelGrid centered_cube(const Vec3& c, double spacing, std::size_t n);
};

struct ImageVolume {
    VoxelGrid grid;
    std::vector<cplx> values;

    ImageVolume() = default;
    explicit ImageVolume(const VoxelGrid& g) : grid(g), values(g.size()) {}
    cplx& at(std::size_t i, std::size_t j, std::size_t k) { return values[grid.index(i, j, k)]; }
    const cplx& at(std::size_t i, std::size_t j, std::size_t k) const { return values[grid.index(i, j, k)]; }
};

enum class Window { rect, hann };

/// Window taps of length n. Hann uses the symmetric form without zero end
/// taps: w_m = sin^2(pi (m + 1) / (n + 1)).
std::vector<double> window_taps(Window w, std::size_t n);

struct ImagingOptions {
    Window window = Window::rect;           // taper over frequency
    Window aperture_window = Window::rect;  // separable taper over transmitter and receiver samples
};

/// I(v) = 1/(Nf Ntx Nrx) sum_{j,k,f} w P(f, s_j, r_k) exp(+2 pi i f (|v - gamma1| + |v - gamma2|) / c0).
ImageVolume backproject(const PhaseHistory& ph, const VoxelGrid& grid, const ImagingOptions& opt = {});
inline ImageVolume backproject(const PhaseHistory& ph, const VoxelGrid& grid, Window window)
{
    return backproject(ph, grid, ImagingOptions{window, Window::rect});
}

/// Range-compressed backprojection: one inverse FFT per pair onto an
/// oversampled delay axis, linear interpolation, carrier re-modulation.
ImageVolume fast_backproject(const PhaseHistory& ph, const VoxelGrid& grid, const ImagingOptions& opt = {},
                             std::size_t oversample = 8);

struct BemAperture {
    std::size_t n_tx = 0, n_rx = 0;
    std::vector<Vec3> points;  // index j * n_rx + k
    Vec3 scene_center;
};

BemAperture bem_aperture(const AcquisitionGeometry& g, const Vec3& scene_center, double range_factor = 1.0);

enum class Axis { x, y, z };

/// Two-dimensional real image; element (a, b) at a * n1 + b where a and b run
/// over the remaining axes in (x, y, z) order.
struct Image2D {
    std::size_t n0 = 0, n1 = 0;
    std::vector<double> values;

    double& at(std::size_t a, std::size_t b) { return values[a * n1 + b]; }
    double at(std::size_t a, std::size_t b) const { return values[a * n1 + b]; }
};

Image2D mip(const ImageVolume& vol, Axis axis);

/// clamp(1 + 20 log10(v / max) / range, 0, 1). Throws AllZeroImage.
Image2D db_normalize(const Image2D& img, double dynamic_range_db = 20.0);

struct PixelPeak {
    std::size_t a = 0, b = 0;
    double value_db = 0.0;  // relative to the image maximum
};

/// 8-neighbour local maxima of a 2D image above threshold_db, strongest first.
std::vector<PixelPeak> image_peaks(const Image2D& img, double threshold_db);

struct Peak {
    Vec3 position;
    std::size_t i = 0, j = 0, k = 0;
    double magnitude = 0.0;
    double magnitude_db = 0.0;  // relative to the global maximum
};

/// 26-neighbour local maxima above threshold_db (relative to the global max),
/// strongest first, with weaker peaks closer than min_separation suppressed.
std::vector<Peak> extract_peaks(const ImageVolume& vol, double min_separation, double threshold_db);

/// Principal axes and widths (2 pi / k-extent) of the point-spread function
/// at a target, derived from the spatial-frequency support of the data.
struct ResolutionCell {
    std::array<Vec3, 3> axes;
    std::array<double, 3> widths{};

    /// True when p lies within the ellipsoid of `cells` widths around centre.
    bool contains(const Vec3& centre, const Vec3& p, double cells) const;
};

ResolutionCell resolution_cell(const AcquisitionGeometry& g, const FrequencyGrid& freqs, const Vec3& target);

}  // namespace sarms
