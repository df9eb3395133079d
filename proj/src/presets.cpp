#include "sarms/presets.hpp"

#include <cmath>
#include <stdexcept>

#include "sarms/constants.hpp"

namespace sarms {

Scale parse_scale(const std::string& name)
{
    if (name == "desk") return Scale::desk;
    if (name == "paper") return Scale::paper;
    throw std::invalid_argument("unknown scale '" + name + "' (expected desk or paper)");
}

PresetParameters preset_parameters(Scale scale)
{
    PresetParameters p;
    if (scale == Scale::paper) {
        p.standoff = 12.0;
        p.aperture_length = 2.0;
        p.n_positions = 128;
        p.bw = 1e9;
        p.n_freq = 512;
        p.spacing = 0.2;
        p.n_voxels = 200;
        p.window = Window::rect;
        p.aperture_window = Window::rect;
    }
    return p;
}

Vec3 bisector_scene_center(double beta, double standoff, double spacing)
{
    const Vec3 c{standoff * std::cos(0.5 * beta), standoff * std::sin(0.5 * beta), 0.0};
    return {std::round(c.x / spacing) * spacing, std::round(c.y / spacing) * spacing, 0.0};
}

RunConfig preset_config(const PresetParameters& p, double beta_deg)
{
    RunConfig cfg;
    const double beta = beta_deg * kPi / 180.0;
    auto& g = cfg.geometry;
    g.beta = beta;
    g.z0 = p.z0;
    // A transmitter at parameter s sits 2 s / sin(beta) from the origin and a
    // receiver at parameter r sits 2 r from it.
    const double sb = std::sin(beta);
    g.s_min = 0.5 * sb * p.aperture_start;
    g.s_max = 0.5 * sb * (p.aperture_start + p.aperture_length);
    g.r_min = 0.5 * p.aperture_start;
    g.r_max = 0.5 * (p.aperture_start + p.aperture_length);
    g.n_tx = g.n_rx = p.n_positions;

    cfg.freqs = {p.fc, p.bw, p.n_freq};

    const Vec3 c = bisector_scene_center(beta, p.standoff, p.spacing);
    cfg.scene = "default";
    cfg.scene_center = c;
    cfg.grid = VoxelGrid::centered_cube({c.x, c.y, p.z0}, p.spacing, p.n_voxels);
    cfg.imaging = {p.window, p.aperture_window};
    cfg.rho_auto = true;
    cfg.roi = default_scene_roi(cfg);
    return cfg;
}

RunConfig preset_config(Scale scale, double beta_deg)
{
    return preset_config(preset_parameters(scale), beta_deg);
}

Box default_scene_roi(const RunConfig& cfg, double pad)
{
    const Vec3 c = cfg.scene_center.value_or(Vec3{});
    return Box{{c.x - 2.0 - pad, c.y - 2.0 - pad, c.z - pad}, {c.x + 2.0 + pad, c.y + 2.0 + pad, c.z + 2.0 + pad}};
}

}  // namespace sarms
