#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sarms/geometry.hpp"
#include "sarms/imager.hpp"
#include "sarms/microlocal.hpp"
#include "sarms/oracle.hpp"
#include "sarms/simulator.hpp"

namespace sarms {

// Binary container: a fixed 256-byte little-endian header followed by the
// complex payload as interleaved (re, im) f64 pairs.
//
//   offset  size  field
//        0     8  magic "SARMS3D\0"
//        8     4  u32 version (1)
//       12     4  u32 kind (0 = phase history, 1 = image volume)
//       16    24  u64 dims[3]  (n_freq, n_tx, n_rx) or (nx, ny, nz)
//       40    48  f64 beta, z0, s_min, s_max, r_min, r_max
//       88    16  u64 n_tx, n_rx
//      104    16  f64 centre frequency, bandwidth
//      120     8  u64 n_freq
//      128    32  f64 grid origin x, y, z, spacing
//      160    96  zero
inline constexpr std::size_t kHeaderSize = 256;
inline constexpr char kMagic[8] = {'S', 'A', 'R', 'M', 'S', '3', 'D', '\0'};
inline constexpr std::uint32_t kFormatVersion = 1;

enum class PayloadKind : std::uint32_t { phase_history = 0, volume = 1 };

struct FileHeader {
    std::uint32_t version = kFormatVersion;
    PayloadKind kind = PayloadKind::phase_history;
    std::uint64_t dims[3] = {0, 0, 0};
    AcquisitionGeometry geometry;
    FrequencyGrid freqs;
    Vec3 origin;
    double spacing = 0.0;
};

std::vector<unsigned char> encode_header(const FileHeader& h);
FileHeader decode_header(const unsigned char* bytes, std::size_t n);

void write_phase_history(const std::string& path, const PhaseHistory& ph);
PhaseHistory read_phase_history(const std::string& path);

void write_volume(const std::string& path, const ImageVolume& vol);
ImageVolume read_volume(const std::string& path);
FileHeader read_header(const std::string& path);

/// Binary PGM (P5, maxval 255). Rows follow the image's first index, columns
/// its second; each value in [0, 1] maps to nearbyint(255 v) (ties to even).
void write_pgm(const std::string& path, const Image2D& img);
std::vector<unsigned char> encode_pgm(const Image2D& img);

void write_gating_csv(const std::string& path, const GatingReport& rep);
std::string gating_csv(const GatingReport& rep);
GatingReport read_gating_csv(const std::string& path, double rho_min, std::size_t n_tx, std::size_t n_rx);

std::string solutions_csv(const std::vector<ArtefactSolution>& sols);
std::string bem_csv(const BemAperture& bem);
std::string peaks_csv(const std::vector<Peak>& peaks);
std::string delta_sweep_csv(const std::vector<DeltaSweepRow>& rows);
std::string scan_csv(const std::vector<ScanRow>& rows);
void write_text(const std::string& path, const std::string& text);

/// Scene text file: one scatterer per line "x y z [re im]", an optional
/// "center x y z" line, '#' starts a comment.
Scene read_scene(const std::string& path);
Scene parse_scene(const std::string& text);
std::string scene_text(const Scene& scene);

struct RunConfig {
    AcquisitionGeometry geometry;
    FrequencyGrid freqs;
    VoxelGrid grid;
    std::string scene = "default";           // "default" or a scene file path
    std::optional<Vec3> scene_center;        // translates the default layout
    bool rho_auto = true;
    double rho_value = 0.0;
    ImagingOptions imaging;
    std::optional<Box> roi;

    Scene load_scene() const;
    /// rho_min selected by the gating keys for this geometry.
    double resolved_rho_min() const;
};

/// key = value lines; '#' comments. Every problem is reported with its line
/// number in a single ConfigError.
RunConfig parse_run_config(const std::string& text);
RunConfig read_run_config(const std::string& path);
std::string run_config_text(const RunConfig& cfg);

}  // namespace sarms
