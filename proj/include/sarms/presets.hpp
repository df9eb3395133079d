#pragma once

#include <string>

#include "sarms/persistence.hpp"

namespace sarms {

enum class Scale { desk, paper };

Scale parse_scale(const std::string& name);  // throws std::invalid_argument

// Named run set-ups for the four line angles. The default seven-point scene is
// centred on the bisector of the two aperture lines, `standoff` metres from
// the origin (snapped to the voxel lattice), and both apertures start near the
// common origin of the lines.
//
// desk:  16 x 16 positions along 0.4 m of each line, 64 frequencies over
//        0.5 GHz at 10 GHz, 48^3 voxels at 0.4 m, Hann taper over frequency
//        and aperture. Small enough for the direct backprojector in seconds.
// paper: 128 x 128 positions along 2 m of each line, 512 frequencies over
//        1 GHz, 200^3 voxels at 0.2 m (a 40 m cube), rectangular windows.
//        Long-running; the fast backprojector is recommended.
struct PresetParameters {
    double standoff = 11.0;         // scene centre distance from the origin [m]
    double aperture_start = 0.1;    // distance of the first antenna position from the origin [m]
    double aperture_length = 0.4;   // physical length of each aperture [m]
    std::size_t n_positions = 16;
    double z0 = 4.0;
    double fc = 10e9;
    double bw = 0.5e9;
    std::size_t n_freq = 64;
    double spacing = 0.4;
    std::size_t n_voxels = 48;
    Window window = Window::hann;
    Window aperture_window = Window::hann;
};

PresetParameters preset_parameters(Scale scale);

/// Scene centre on the bisector of the two lines, snapped to the lattice.
Vec3 bisector_scene_center(double beta, double standoff, double spacing);

RunConfig preset_config(Scale scale, double beta_deg);
RunConfig preset_config(const PresetParameters& p, double beta_deg);

/// Box around the default scene (its 4 m footprint and 2 m height, padded by `pad`).
Box default_scene_roi(const RunConfig& cfg, double pad = 0.5);

}  // namespace sarms
