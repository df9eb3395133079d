#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "sarms/constants.hpp"
#include "sarms/error.hpp"
#include "sarms/imager.hpp"
#include "sarms/microlocal.hpp"
#include "sarms/oracle.hpp"
#include "sarms/parallel.hpp"
#include "sarms/persistence.hpp"
#include "sarms/presets.hpp"
#include "sarms/simulator.hpp"

namespace sarms::cli {

namespace {

struct Source {
    std::string config;
    std::string scale = "desk";
    double beta_deg = 90.0;
    CLI::Option* config_opt = nullptr;
};

void add_source(CLI::App* sub, Source& src)
{
    src.config_opt = sub->add_option("--config", src.config, "Run configuration file (key = value)")
                         ->check(CLI::ExistingFile);
    auto* sc = sub->add_option("--scale", src.scale, "Named preset used when no --config is given")
                   ->check(CLI::IsMember({"desk", "paper"}));
    auto* b = sub->add_option("--beta", src.beta_deg, "Angle between the aperture lines for the preset [deg]")
                  ->check(CLI::Range(0.0, 180.0));
    src.config_opt->excludes(sc);
    src.config_opt->excludes(b);
}

RunConfig resolve(const Source& src)
{
    if (!src.config.empty()) return read_run_config(src.config);
    const double b = src.beta_deg;
    if (!(b > 0.0 && b < 180.0)) throw std::invalid_argument("--beta must lie strictly between 0 and 180 degrees");
    return preset_config(parse_scale(src.scale), b);
}

std::string human_bytes(double b)
{
    const char* units[] = {"B", "KiB", "MiB", "GiB", "TiB"};
    int u = 0;
    while (b >= 1024.0 && u < 4) {
        b /= 1024.0;
        ++u;
    }
    std::ostringstream os;
    os << std::fixed << std::setprecision(1) << b << " " << units[u];
    return os.str();
}

Window parse_window_name(const std::string& s) { return s == "hann" ? Window::hann : Window::rect; }

void print_geometry(std::ostream& out, const RunConfig& cfg)
{
    const auto& g = cfg.geometry;
    out << "  geometry: beta=" << g.beta * 180.0 / kPi << " deg, z0=" << g.z0 << " m, s=[" << g.s_min << ", "
        << g.s_max << "] x " << g.n_tx << ", r=[" << g.r_min << ", " << g.r_max << "] x " << g.n_rx << "\n";
    out << "  frequencies: " << cfg.freqs.n_freq << " over " << cfg.freqs.bandwidth_hz / 1e9 << " GHz at "
        << cfg.freqs.center_hz / 1e9 << " GHz\n";
}

void print_grid(std::ostream& out, const VoxelGrid& grid)
{
    out << "  grid: " << grid.nx << " x " << grid.ny << " x " << grid.nz << " voxels at " << grid.spacing
        << " m, origin (" << grid.origin.x << ", " << grid.origin.y << ", " << grid.origin.z << ")\n";
}

double ph_bytes(const RunConfig& c) { return 16.0 * c.freqs.n_freq * c.geometry.n_tx * c.geometry.n_rx; }
double vol_bytes(const VoxelGrid& g) { return 16.0 * static_cast<double>(g.size()); }

void print_imaging_plan(std::ostream& out, const RunConfig& cfg, bool fast, std::size_t oversample)
{
    const double pairs = static_cast<double>(cfg.geometry.n_tx * cfg.geometry.n_rx);
    const double vox = static_cast<double>(cfg.grid.size());
    if (fast)
        out << "  fast backprojection: " << pairs << " FFTs of length " << cfg.freqs.n_freq * oversample << ", "
            << vox * pairs << " interpolations\n";
    else
        out << "  direct backprojection: " << vox * pairs * static_cast<double>(cfg.freqs.n_freq)
            << " complex multiply-adds\n";
}

void write_mips(const ImageVolume& vol, const std::string& prefix, double range_db, std::ostream& out)
{
    for (auto [axis, name] : {std::pair{Axis::x, "x"}, std::pair{Axis::y, "y"}, std::pair{Axis::z, "z"}}) {
        const std::string path = prefix + "_" + name + ".pgm";
        write_pgm(path, db_normalize(mip(vol, axis), range_db));
        out << "wrote " << path << "\n";
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"sarms3d - multistatic line-aperture SAR simulation, imaging and artefact analysis"};
    app.require_subcommand(1, 1);
    bool dry_run = false;
    app.add_flag("--dry-run", dry_run, "Print the resolved plan without computing");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Synthesise a phase history for a scene");
    Source sim_src;
    add_source(sim, sim_src);
    std::string sim_scene, sim_out = "phase_history.bin";
    bool sim_progress = false;
    sim->add_option("--scene", sim_scene, "Scene file overriding the configured scene")->check(CLI::ExistingFile);
    sim->add_option("-o,--output", sim_out, "Phase-history file");
    sim->add_flag("--progress", sim_progress, "Report progress on stderr");

    // image
    auto* img = app.add_subcommand("image", "Backproject a phase history onto the configured voxel grid");
    Source img_src;
    add_source(img, img_src);
    std::string img_in, img_out = "volume.bin", img_window, img_ap_window, img_gated, img_peaks;
    bool img_fast = false;
    std::size_t img_over = 8;
    img->add_option("-i,--input", img_in, "Phase-history file")->required()->check(CLI::ExistingFile);
    img->add_option("-o,--output", img_out, "Image volume file");
    img->add_flag("--fast", img_fast, "Use range-compressed (FFT) backprojection");
    img->add_option("--oversample", img_over, "Delay-axis oversampling for --fast")->check(CLI::Range(4, 1 << 16));
    img->add_option("--window", img_window, "Frequency window")->check(CLI::IsMember({"rect", "hann"}));
    img->add_option("--aperture-window", img_ap_window, "Aperture taper")->check(CLI::IsMember({"rect", "hann"}));
    img->add_option("--gated", img_gated, "Apply a gating report (CSV) before imaging")->check(CLI::ExistingFile);
    img->add_option("--peaks", img_peaks, "Also write the -15 dB peak list to this CSV");

    // mip
    auto* mp = app.add_subcommand("mip", "Render x/y/z maximum intensity projections as PGM");
    std::string mip_in, mip_prefix = "mip";
    double mip_range = 20.0;
    mp->add_option("-i,--input", mip_in, "Image volume file")->required()->check(CLI::ExistingFile);
    mp->add_option("--prefix", mip_prefix, "Output prefix; writes <prefix>_{x,y,z}.pgm");
    mp->add_option("--dynamic-range-db", mip_range, "Displayed dynamic range [dB]")->check(CLI::PositiveNumber);

    // gate
    auto* gt = app.add_subcommand("gate", "Compute the time-gating report for a region of interest");
    Source gt_src;
    add_source(gt, gt_src);
    std::vector<double> gt_roi;
    std::string gt_rho, gt_out = "gating.csv";
    std::size_t gt_per_face = 32;
    gt->add_option("--roi", gt_roi, "ROI box: xlo ylo zlo xhi yhi zhi")->expected(6);
    gt->add_option("--rho", gt_rho, "auto, or an explicit rho_min");
    gt->add_option("--per-face", gt_per_face, "Boundary samples per face edge")->check(CLI::Range(2, 4096));
    gt->add_option("-o,--output", gt_out, "Report CSV");

    // oracle
    auto* orc = app.add_subcommand("oracle", "Find every point sharing data singularities with a point");
    Source or_src;
    add_source(orc, or_src);
    std::vector<double> or_point, or_box, or_scan;
    double or_s = std::nan(""), or_r = std::nan(""), or_tol = 1e-8, or_phi = 1.0, or_theta = 4.0;
    std::size_t or_grid = 48;
    std::string or_out = "oracle.csv";
    orc->add_option("--point", or_point, "Reference point x y z")->expected(3);
    orc->add_option("--s", or_s, "Transmitter parameter (default: mid-aperture)");
    orc->add_option("--r", or_r, "Receiver parameter (default: mid-aperture)");
    orc->add_option("--grid-n", or_grid, "Lattice points per axis")->check(CLI::Range(16, 1024));
    orc->add_option("--tol", or_tol, "Residual tolerance")->check(CLI::PositiveNumber);
    orc->add_option("--box", or_box, "Search box xlo ylo zlo xhi yhi zhi")->expected(6);
    orc->add_option("--scan-rho", or_scan, "Instead of --point, scan these prolate radii");
    orc->add_option("--phi", or_phi, "Prolate phi for --scan-rho")->check(CLI::Range(0.0, kPi));
    orc->add_option("--theta", or_theta, "Prolate theta for --scan-rho")->check(CLI::Range(0.0, 2.0 * kPi));
    orc->add_option("-o,--output", or_out, "Output CSV");

    // bem
    auto* bm = app.add_subcommand("bem", "Bistatic-equivalent monostatic aperture points");
    Source bm_src;
    add_source(bm, bm_src);
    double bm_factor = 1.0;
    std::vector<double> bm_center;
    std::string bm_out = "bem.csv";
    bm->add_option("--range-factor", bm_factor, "BEM range as a multiple of the bistatic range sum")
        ->check(CLI::PositiveNumber);
    bm->add_option("--center", bm_center, "Scene centre x y z (default: configured scene centre)")->expected(3);
    bm->add_option("-o,--output", bm_out, "Output CSV");

    // check-delta
    auto* cd = app.add_subcommand("check-delta", "Sample the determinant at a fixed rho and report positivity");
    double cd_delta = 0.0;
    std::string cd_rho = "auto", cd_out;
    std::size_t cd_samples = 100000;
    unsigned cd_seed = 12345;
    cd->add_option("--delta", cd_delta, "cot(beta)")->required();
    cd->add_option("--rho", cd_rho, "ln6, auto (ln(5 + 8|delta|) + 1e-6) or a number");
    cd->add_option("--samples", cd_samples, "Random (alpha, phi', theta') samples")->check(CLI::Range(1, 100000000));
    cd->add_option("--seed", cd_seed, "Random seed");
    cd->add_option("-o,--output", cd_out, "Optional CSV");

    // pipeline
    auto* pl = app.add_subcommand("pipeline", "simulate + gate + image + mip for one of the four line angles");
    std::string pl_beta, pl_scale = "desk", pl_dir = "pipeline_out";
    bool pl_fast = false, pl_no_gate = false;
    std::size_t pl_over = 8;
    double pl_range = 20.0;
    pl->add_option("--beta", pl_beta, "Line angle in degrees")->required()->check(CLI::IsMember({"30", "60", "90", "120"}));
    pl->add_option("--scale", pl_scale, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
    pl->add_option("--out-dir", pl_dir, "Output directory");
    pl->add_flag("--fast", pl_fast, "Use range-compressed (FFT) backprojection");
    pl->add_option("--oversample", pl_over, "Delay-axis oversampling for --fast")->check(CLI::Range(4, 1 << 16));
    pl->add_flag("--no-gate", pl_no_gate, "Skip time gating");
    pl->add_option("--dynamic-range-db", pl_range, "Displayed dynamic range [dB]")->check(CLI::PositiveNumber);

    // Every subcommand accepts --dry-run after its name too.
    for (auto* sub : {sim, img, mp, gt, orc, bm, cd, pl}) sub->add_flag("--dry-run", dry_run, "Print the plan only");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return 2;
    }

    try {
        configure_threads_from_env();
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*sim) {
            RunConfig cfg = resolve(sim_src);
            if (dry_run) {
                out << "plan: simulate\n";
                print_geometry(out, cfg);
                out << "  scene: " << (sim_scene.empty() ? cfg.scene : sim_scene) << "\n";
                out << "  output: " << sim_out << " (" << human_bytes(ph_bytes(cfg) + kHeaderSize) << ")\n";
                return 0;
            }
            const Scene scene = sim_scene.empty() ? cfg.load_scene() : read_scene(sim_scene);
            ProgressCallback cb;
            int last = -1;
            if (sim_progress)
                cb = [&](double f) {
                    const int pct = static_cast<int>(f * 100.0);
                    if (pct / 10 != last / 10) err << "simulate: " << pct << "%\n";
                    last = pct;
                };
            const PhaseHistory ph = phase_history(scene, cfg.geometry, cfg.freqs, cb);
            write_phase_history(sim_out, ph);
            out << "wrote " << sim_out << " (" << scene.scatterers.size() << " scatterers)\n";
            return 0;
        }

        if (*img) {
            RunConfig cfg = resolve(img_src);
            if (!img_window.empty()) cfg.imaging.window = parse_window_name(img_window);
            if (!img_ap_window.empty()) cfg.imaging.aperture_window = parse_window_name(img_ap_window);
            const FileHeader h = read_header(img_in);
            if (h.kind != PayloadKind::phase_history) throw IoError("'" + img_in + "' is not a phase-history file");
            RunConfig data_cfg = cfg;
            data_cfg.geometry = h.geometry;
            data_cfg.freqs = h.freqs;
            if (dry_run) {
                out << "plan: image" << (img_gated.empty() ? "" : " (gated)") << "\n";
                print_geometry(out, data_cfg);
                print_grid(out, cfg.grid);
                print_imaging_plan(out, data_cfg, img_fast, img_over);
                out << "  memory: " << human_bytes(ph_bytes(data_cfg) + vol_bytes(cfg.grid)) << "\n";
                return 0;
            }
            PhaseHistory ph = read_phase_history(img_in);
            if (!img_gated.empty()) {
                const double rho = rho_min(ph.geometry.delta());
                const GatingReport rep = read_gating_csv(img_gated, rho, ph.geometry.n_tx, ph.geometry.n_rx);
                ph = gate_phase_history(ph, rep);
            }
            const ImageVolume vol = img_fast ? fast_backproject(ph, cfg.grid, cfg.imaging, img_over)
                                             : backproject(ph, cfg.grid, cfg.imaging);
            write_volume(img_out, vol);
            out << "wrote " << img_out << "\n";
            if (!img_peaks.empty()) {
                write_text(img_peaks, peaks_csv(extract_peaks(vol, 0.0, -15.0)));
                out << "wrote " << img_peaks << "\n";
            }
            return 0;
        }

        if (*mp) {
            if (dry_run) {
                const FileHeader h = read_header(mip_in);
                out << "plan: mip\n  volume: " << h.dims[0] << " x " << h.dims[1] << " x " << h.dims[2]
                    << "\n  outputs: " << mip_prefix << "_{x,y,z}.pgm, dynamic range " << mip_range << " dB\n";
                return 0;
            }
            write_mips(read_volume(mip_in), mip_prefix, mip_range, out);
            return 0;
        }

        if (*gt) {
            RunConfig cfg = resolve(gt_src);
            Box roi;
            if (!gt_roi.empty())
                roi = Box{{gt_roi[0], gt_roi[1], gt_roi[2]}, {gt_roi[3], gt_roi[4], gt_roi[5]}};
            else if (cfg.roi)
                roi = *cfg.roi;
            else
                throw ConfigError("no ROI: pass --roi or set roi_lo/roi_hi in the configuration");
            double rho = cfg.resolved_rho_min();
            if (!gt_rho.empty() && gt_rho != "auto") {
                char* end = nullptr;
                rho = std::strtod(gt_rho.c_str(), &end);
                if (*end != '\0' || !(rho >= 0.0)) {
                    err << "error: --rho must be 'auto' or a non-negative number\n";
                    return 2;
                }
            } else if (gt_rho == "auto") {
                rho = rho_min(cfg.geometry.delta());
            }
            if (dry_run) {
                out << "plan: gate\n";
                print_geometry(out, cfg);
                out << "  roi: (" << roi.lo.x << ", " << roi.lo.y << ", " << roi.lo.z << ") - (" << roi.hi.x << ", "
                    << roi.hi.y << ", " << roi.hi.z << ")\n  rho_min: " << rho << "\n  boundary samples per pair: "
                    << 6 * gt_per_face * gt_per_face << "\n";
                return 0;
            }
            const GatingReport rep = roi_gating_report(cfg.geometry, roi, rho, {gt_per_face});
            write_gating_csv(gt_out, rep);
            out << "wrote " << gt_out << ": " << rep.n_compliant() << "/" << rep.entries.size()
                << " pairs compliant, rho_min=" << rho << ", min rho over ROI=" << rep.global_min_rho_over_roi << "\n";
            if (rep.plane_warning) err << "warning: ROI reaches the transceiver plane z0=" << cfg.geometry.z0 << "\n";
            return 0;
        }

        if (*orc) {
            RunConfig cfg = resolve(or_src);
            const auto& g = cfg.geometry;
            const double s = std::isnan(or_s) ? 0.5 * (g.s_min + g.s_max) : or_s;
            const double r = std::isnan(or_r) ? 0.5 * (g.r_min + g.r_max) : or_r;
            OracleOptions opt;
            opt.grid_n = or_grid;
            opt.tol = or_tol;
            if (or_scan.empty() && or_point.empty()) {
                err << "error: oracle needs --point or --scan-rho\n";
                return 2;
            }
            if (!or_scan.empty()) {
                std::sort(or_scan.begin(), or_scan.end());
                if (dry_run) {
                    out << "plan: oracle scan over " << or_scan.size() << " radii, " << or_grid << "^3 lattice each\n";
                    return 0;
                }
                const auto rows = artefact_scan(g, s, r, or_scan, or_phi, or_theta, opt);
                write_text(or_out, scan_csv(rows));
                out << "wrote " << or_out << "\n";
                return 0;
            }
            const Vec3 x{or_point[0], or_point[1], or_point[2]};
            const Box box = or_box.empty() ? ellipsoid_search_box(x, s, r, g)
                                           : Box{{or_box[0], or_box[1], or_box[2]}, {or_box[3], or_box[4], or_box[5]}};
            if (dry_run) {
                out << "plan: oracle\n  s=" << s << " r=" << r << "\n  lattice: " << or_grid << "^3 = "
                    << or_grid * or_grid * or_grid << " residual evaluations\n";
                return 0;
            }
            const OracleResult res = find_artifacts(x, s, r, g, box, opt);
            write_text(or_out, solutions_csv(res.solutions));
            out << "wrote " << or_out << ": " << res.solutions.size() << " solutions ("
                << res.count(Classification::extra) << " extra), rho(x)=" << rho_of_point(x, s, r, g)
                << ", rho_min=" << rho_min(g.delta()) << "\n";
            return 0;
        }

        if (*bm) {
            RunConfig cfg = resolve(bm_src);
            const Vec3 c = bm_center.empty() ? cfg.load_scene().center : Vec3{bm_center[0], bm_center[1], bm_center[2]};
            if (dry_run) {
                out << "plan: bem\n";
                print_geometry(out, cfg);
                out << "  points: " << cfg.geometry.n_tx * cfg.geometry.n_rx << ", range factor " << bm_factor << "\n";
                return 0;
            }
            write_text(bm_out, bem_csv(bem_aperture(cfg.geometry, c, bm_factor)));
            out << "wrote " << bm_out << "\n";
            return 0;
        }

        if (*cd) {
            double rho;
            if (cd_rho == "ln6")
                rho = rho_min_perpendicular_ln6 + kRhoMargin;
            else if (cd_rho == "auto")
                rho = rho_min(cd_delta);
            else {
                char* end = nullptr;
                rho = std::strtod(cd_rho.c_str(), &end);
                if (*end != '\0' || !(rho >= 0.0)) {
                    err << "error: --rho must be ln6, auto or a non-negative number\n";
                    return 2;
                }
            }
            if (dry_run) {
                out << "plan: check-delta\n  delta=" << cd_delta << " rho=" << rho << " samples=" << cd_samples << "\n";
                return 0;
            }
            const DeltaSweepRow row = determinant_sweep(cd_delta, rho, cd_samples, cd_seed);
            if (!cd_out.empty()) write_text(cd_out, delta_sweep_csv({row}));
            out << std::setprecision(12) << "delta=" << cd_delta << " rho=" << rho << " samples=" << row.n_samples
                << " non-positive=" << row.n_nonpositive << " min=" << row.min_delta << "\n";
            return row.n_nonpositive == 0 ? 0 : 1;
        }

        if (*pl) {
            const double beta = std::stod(pl_beta);
            const RunConfig cfg = preset_config(parse_scale(pl_scale), beta);
            namespace fs = std::filesystem;
            if (dry_run) {
                out << "plan: pipeline beta=" << beta << " scale=" << pl_scale << "\n";
                print_geometry(out, cfg);
                print_grid(out, cfg.grid);
                print_imaging_plan(out, cfg, pl_fast, pl_over);
                out << "  memory: " << human_bytes(ph_bytes(cfg) + vol_bytes(cfg.grid)) << "\n";
                out << "  gating: " << (pl_no_gate ? "off" : "ROI around the scene, rho_min auto") << "\n";
                return 0;
            }
            fs::create_directories(pl_dir);
            const auto path = [&](const std::string& name) { return (fs::path(pl_dir) / name).string(); };
            auto t0 = std::chrono::steady_clock::now();
            const Scene scene = cfg.load_scene();
            PhaseHistory ph = phase_history(scene, cfg.geometry, cfg.freqs);
            write_phase_history(path("phase_history.bin"), ph);
            out << "simulate: " << seconds_since(t0) << " s\n";
            if (!pl_no_gate) {
                t0 = std::chrono::steady_clock::now();
                const GatingReport rep = roi_gating_report(cfg.geometry, *cfg.roi, cfg.resolved_rho_min());
                write_gating_csv(path("gating.csv"), rep);
                ph = gate_phase_history(ph, rep);
                out << "gate: " << rep.n_compliant() << "/" << rep.entries.size() << " pairs compliant, "
                    << seconds_since(t0) << " s\n";
            }
            t0 = std::chrono::steady_clock::now();
            const ImageVolume vol = pl_fast ? fast_backproject(ph, cfg.grid, cfg.imaging, pl_over)
                                            : backproject(ph, cfg.grid, cfg.imaging);
            write_volume(path("volume.bin"), vol);
            out << "image: " << seconds_since(t0) << " s\n";
            write_mips(vol, path("mip"), pl_range, out);
            const auto peaks = extract_peaks(vol, 0.0, -15.0);
            write_text(path("peaks.csv"), peaks_csv(peaks));
            const auto zpeaks = image_peaks(mip(vol, Axis::z), -pl_range);
            out << "z-MIP local maxima within " << pl_range << " dB: " << zpeaks.size() << "\n";
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace sarms::cli
