#include "sarms/imager.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <fftw3.h>

#include "sarms/constants.hpp"
#include "sarms/error.hpp"

namespace sarms {

void VoxelGrid::validate() const
{
    if (!(spacing > 0.0)) throw std::invalid_argument("voxel spacing must be positive");
    if (nx == 0 || ny == 0 || nz == 0) throw std::invalid_argument("voxel grid must be non-empty");
}

VoxelGrid VoxelGrid::centered_cube(const Vec3& c, double spacing, std::size_t n)
{
    VoxelGrid g;
    g.spacing = spacing;
    g.nx = g.ny = g.nz = n;
    const double half = static_cast<double>(n / 2) * spacing;
    g.origin = c - Vec3{half, half, half};
    return g;
}

std::vector<double> window_taps(Window w, std::size_t n)
{
    std::vector<double> t(n, 1.0);
    if (w == Window::hann) {
        for (std::size_t m = 0; m < n; ++m) {
            const double s = std::sin(kPi * static_cast<double>(m + 1) / static_cast<double>(n + 1));
            t[m] = s * s;
        }
    }
    return t;
}

namespace {

struct PairData {
    std::vector<Vec3> tx, rx;
    std::vector<double> pair_weight;  // aperture taper, j * n_rx + k
    std::vector<double> freq_weight;
    double norm = 1.0;
};

PairData prepare(const PhaseHistory& ph, const ImagingOptions& opt)
{
    const auto& g = ph.geometry;
    g.validate();
    ph.freqs.validate();
    if (ph.data.size() != ph.freqs.n_freq * g.n_tx * g.n_rx)
        throw ShapeMismatch("phase history payload does not match its dimensions");
    PairData pd;
    for (std::size_t j = 0; j < g.n_tx; ++j) pd.tx.push_back(transmitter_position(g, g.s_at(j)));
    for (std::size_t k = 0; k < g.n_rx; ++k) pd.rx.push_back(receiver_position(g, g.r_at(k)));
    const auto wt = window_taps(opt.aperture_window, g.n_tx);
    const auto wr = window_taps(opt.aperture_window, g.n_rx);
    pd.pair_weight.resize(g.n_tx * g.n_rx);
    for (std::size_t j = 0; j < g.n_tx; ++j)
        for (std::size_t k = 0; k < g.n_rx; ++k) pd.pair_weight[j * g.n_rx + k] = wt[j] * wr[k];
    pd.freq_weight = window_taps(opt.window, ph.freqs.n_freq);
    pd.norm = 1.0 / static_cast<double>(ph.freqs.n_freq * g.n_tx * g.n_rx);
    return pd;
}

}  // namespace

ImageVolume backproject(const PhaseHistory& ph, const VoxelGrid& grid, const ImagingOptions& opt)
{
    grid.validate();
    const PairData pd = prepare(ph, opt);
    const auto& g = ph.geometry;
    const std::size_t nf = ph.freqs.n_freq, ntx = g.n_tx, nrx = g.n_rx;
    const std::size_t stride = ph.pair_stride();

    // Pair-major copy with every weight folded in, so the inner loop streams.
    std::vector<cplx> data(nf * ntx * nrx);
    for (std::size_t p = 0; p < ntx * nrx; ++p)
        for (std::size_t m = 0; m < nf; ++m)
            data[p * nf + m] = ph.data[m * stride + p] * (pd.freq_weight[m] * pd.pair_weight[p] * pd.norm);

    const double w0 = 2.0 * kPi * ph.freqs.at(0) / kSpeedOfLight;
    const double wd = 2.0 * kPi * ph.freqs.step() / kSpeedOfLight;

    ImageVolume vol(grid);
    const long long nvox = static_cast<long long>(grid.size());
#pragma omp parallel
    {
        std::vector<cplx> et0(ntx), etd(ntx), er0(nrx), erd(nrx);
#pragma omp for schedule(dynamic, 64)
        for (long long v = 0; v < nvox; ++v) {
            const Vec3 p = grid.world(static_cast<std::size_t>(v));
            // exp(i w d) factorises over the transmitter and receiver legs.
            for (std::size_t j = 0; j < ntx; ++j) {
                const double d = distance(p, pd.tx[j]);
                et0[j] = std::polar(1.0, w0 * d);
                etd[j] = std::polar(1.0, wd * d);
            }
            for (std::size_t k = 0; k < nrx; ++k) {
                const double d = distance(p, pd.rx[k]);
                er0[k] = std::polar(1.0, w0 * d);
                erd[k] = std::polar(1.0, wd * d);
            }
            cplx acc = 0.0;
            for (std::size_t j = 0; j < ntx; ++j) {
                for (std::size_t k = 0; k < nrx; ++k) {
                    const cplx* P = &data[(j * nrx + k) * nf];
                    cplx cur = et0[j] * er0[k];
                    const cplx st = etd[j] * erd[k];
                    cplx sum = 0.0;
                    for (std::size_t m = 0; m < nf; ++m) {
                        sum += P[m] * cur;
                        cur *= st;
                    }
                    acc += sum;
                }
            }
            vol.values[static_cast<std::size_t>(v)] = acc;
        }
    }
    return vol;
}

ImageVolume fast_backproject(const PhaseHistory& ph, const VoxelGrid& grid, const ImagingOptions& opt,
                             std::size_t oversample)
{
    grid.validate();
    if (oversample < 4) throw std::invalid_argument("fast backprojection needs oversample >= 4");
    const PairData pd = prepare(ph, opt);
    const auto& g = ph.geometry;
    const std::size_t nf = ph.freqs.n_freq, ntx = g.n_tx, nrx = g.n_rx, npairs = ntx * nrx;
    const std::size_t stride = ph.pair_stride();
    const std::size_t N = nf * oversample;
    const std::size_t kc = nf / 2;
    const double df = ph.freqs.step();
    const double fcar = ph.freqs.at(kc);

    // Baseband delay profiles g_p(tau_n), tau_n = n / (N df), periodic in 1/df.
    std::vector<cplx> profiles(npairs * N);
    {
        fftw_complex* buf = fftw_alloc_complex(N);
        if (!buf) throw std::bad_alloc();
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(N), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        for (std::size_t p = 0; p < npairs; ++p) {
            for (std::size_t n = 0; n < N; ++n) buf[n][0] = buf[n][1] = 0.0;
            for (std::size_t m = 0; m < nf; ++m) {
                const cplx v = ph.data[m * stride + p] * (pd.freq_weight[m] * pd.pair_weight[p] * pd.norm);
                const std::size_t slot = (m + N - kc) % N;  // frequency offset m - kc
                buf[slot][0] = v.real();
                buf[slot][1] = v.imag();
            }
            fftw_execute(plan);
            for (std::size_t n = 0; n < N; ++n) profiles[p * N + n] = cplx(buf[n][0], buf[n][1]);
        }
        fftw_destroy_plan(plan);
        fftw_free(buf);
    }

    const double to_bins = (nf > 1 ? df : 0.0) * static_cast<double>(N) / kSpeedOfLight;  // path length -> bin
    const double wc = 2.0 * kPi * fcar / kSpeedOfLight;

    ImageVolume vol(grid);
    const long long nvox = static_cast<long long>(grid.size());
#pragma omp parallel
    {
        std::vector<double> dt(ntx), dr(nrx);
#pragma omp for schedule(dynamic, 64)
        for (long long v = 0; v < nvox; ++v) {
            const Vec3 p = grid.world(static_cast<std::size_t>(v));
            for (std::size_t j = 0; j < ntx; ++j) dt[j] = distance(p, pd.tx[j]);
            for (std::size_t k = 0; k < nrx; ++k) dr[k] = distance(p, pd.rx[k]);
            cplx acc = 0.0;
            for (std::size_t j = 0; j < ntx; ++j) {
                for (std::size_t k = 0; k < nrx; ++k) {
                    const double d = dt[j] + dr[k];
                    double x = d * to_bins;
                    x -= static_cast<double>(N) * std::floor(x / static_cast<double>(N));
                    std::size_t n0 = static_cast<std::size_t>(x);
                    if (n0 >= N) n0 = N - 1;
                    const double frac = x - static_cast<double>(n0);
                    const std::size_t n1 = (n0 + 1) % N;
                    const cplx* prof = &profiles[(j * nrx + k) * N];
                    const cplx s = prof[n0] * (1.0 - frac) + prof[n1] * frac;
                    acc += s * std::polar(1.0, wc * d);
                }
            }
            vol.values[static_cast<std::size_t>(v)] = acc;
        }
    }
    return vol;
}

BemAperture bem_aperture(const AcquisitionGeometry& g, const Vec3& c, double range_factor)
{
    g.validate();
    BemAperture bem;
    bem.n_tx = g.n_tx;
    bem.n_rx = g.n_rx;
    bem.scene_center = c;
    bem.points.resize(g.n_tx * g.n_rx);
    for (std::size_t j = 0; j < g.n_tx; ++j) {
        const Vec3 t = transmitter_position(g, g.s_at(j));
        const double lt = distance(t, c);
        if (lt < kFocusEps) throw DegenerateGeometry("scene centre coincides with a transmitter position");
        for (std::size_t k = 0; k < g.n_rx; ++k) {
            const Vec3 q = receiver_position(g, g.r_at(k));
            const double lq = distance(q, c);
            if (lq < kFocusEps) throw DegenerateGeometry("scene centre coincides with a receiver position");
            const Vec3 bis = (t - c) / lt + (q - c) / lq;
            const double nb = norm(bis);
            if (nb < 1e-12) throw DegenerateGeometry("transmitter and receiver are antipodal about the scene centre");
            bem.points[j * g.n_rx + k] = c + bis * (range_factor * (lt + lq) / nb);
        }
    }
    return bem;
}

Image2D mip(const ImageVolume& vol, Axis axis)
{
    const auto& g = vol.grid;
    Image2D img;
    switch (axis) {
    case Axis::x: img.n0 = g.ny; img.n1 = g.nz; break;
    case Axis::y: img.n0 = g.nx; img.n1 = g.nz; break;
    case Axis::z: img.n0 = g.nx; img.n1 = g.ny; break;
    }
    img.values.assign(img.n0 * img.n1, 0.0);
    for (std::size_t i = 0; i < g.nx; ++i) {
        for (std::size_t j = 0; j < g.ny; ++j) {
            for (std::size_t k = 0; k < g.nz; ++k) {
                const double m = std::abs(vol.at(i, j, k));
                double& o = axis == Axis::x ? img.at(j, k) : (axis == Axis::y ? img.at(i, k) : img.at(i, j));
                o = std::max(o, m);
            }
        }
    }
    return img;
}

Image2D db_normalize(const Image2D& img, double dynamic_range_db)
{
    if (!(dynamic_range_db > 0.0)) throw std::invalid_argument("dynamic range must be positive");
    double mx = 0.0;
    for (double v : img.values) mx = std::max(mx, v);
    if (!(mx > 0.0)) throw AllZeroImage("cannot normalise an image whose maximum is zero");
    Image2D out = img;
    for (double& v : out.values) {
        const double db = v > 0.0 ? 20.0 * std::log10(v / mx) : -std::numeric_limits<double>::infinity();
        v = std::clamp(1.0 + db / dynamic_range_db, 0.0, 1.0);
    }
    return out;
}

std::vector<PixelPeak> image_peaks(const Image2D& img, double threshold_db)
{
    double mx = 0.0;
    for (double v : img.values) mx = std::max(mx, v);
    std::vector<PixelPeak> out;
    if (!(mx > 0.0)) return out;
    const double floor = mx * std::pow(10.0, threshold_db / 20.0);
    const long long n0 = static_cast<long long>(img.n0), n1 = static_cast<long long>(img.n1);
    for (long long a = 0; a < n0; ++a) {
        for (long long b = 0; b < n1; ++b) {
            const double v = img.at(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
            if (v < floor || !(v > 0.0)) continue;
            bool is_max = true;
            for (long long da = -1; da <= 1 && is_max; ++da)
                for (long long db = -1; db <= 1; ++db) {
                    const long long p = a + da, q = b + db;
                    if (p < 0 || q < 0 || p >= n0 || q >= n1) continue;
                    if (img.at(static_cast<std::size_t>(p), static_cast<std::size_t>(q)) > v) {
                        is_max = false;
                        break;
                    }
                }
            if (is_max) out.push_back({static_cast<std::size_t>(a), static_cast<std::size_t>(b), 20.0 * std::log10(v / mx)});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const PixelPeak& x, const PixelPeak& y) { return x.value_db > y.value_db; });
    return out;
}

std::vector<Peak> extract_peaks(const ImageVolume& vol, double min_separation, double threshold_db)
{
    const auto& g = vol.grid;
    std::vector<double> mag(vol.values.size());
    double mx = 0.0;
    for (std::size_t q = 0; q < mag.size(); ++q) {
        mag[q] = std::abs(vol.values[q]);
        mx = std::max(mx, mag[q]);
    }
    std::vector<Peak> cand;
    if (!(mx > 0.0)) return cand;
    const double floor = mx * std::pow(10.0, threshold_db / 20.0);

    const long long NX = static_cast<long long>(g.nx), NY = static_cast<long long>(g.ny), NZ = static_cast<long long>(g.nz);
    for (long long i = 0; i < NX; ++i) {
        for (long long j = 0; j < NY; ++j) {
            for (long long k = 0; k < NZ; ++k) {
                const double v = mag[g.index(static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<std::size_t>(k))];
                if (v < floor || !(v > 0.0)) continue;
                bool is_max = true;
                for (long long di = -1; di <= 1 && is_max; ++di)
                    for (long long dj = -1; dj <= 1 && is_max; ++dj)
                        for (long long dk = -1; dk <= 1; ++dk) {
                            const long long a = i + di, b = j + dj, c = k + dk;
                            if (a < 0 || b < 0 || c < 0 || a >= NX || b >= NY || c >= NZ) continue;
                            if (mag[g.index(static_cast<std::size_t>(a), static_cast<std::size_t>(b), static_cast<std::size_t>(c))] > v) {
                                is_max = false;
                                break;
                            }
                        }
                if (!is_max) continue;
                Peak p;
                p.i = static_cast<std::size_t>(i);
                p.j = static_cast<std::size_t>(j);
                p.k = static_cast<std::size_t>(k);
                p.position = g.world(p.i, p.j, p.k);
                p.magnitude = v;
                p.magnitude_db = 20.0 * std::log10(v / mx);
                cand.push_back(p);
            }
        }
    }
    std::stable_sort(cand.begin(), cand.end(), [](const Peak& a, const Peak& b) { return a.magnitude > b.magnitude; });
    std::vector<Peak> kept;
    for (const auto& p : cand) {
        const bool close = std::any_of(kept.begin(), kept.end(), [&](const Peak& q) {
            return distance(p.position, q.position) < min_separation;
        });
        if (!close) kept.push_back(p);
    }
    return kept;
}

bool ResolutionCell::contains(const Vec3& centre, const Vec3& p, double cells) const
{
    double acc = 0.0;
    for (int a = 0; a < 3; ++a) {
        const double u = dot(axes[a], p - centre) / (cells * widths[a]);
        acc += u * u;
    }
    return acc <= 1.0;
}

ResolutionCell resolution_cell(const AcquisitionGeometry& g, const FrequencyGrid& freqs, const Vec3& target)
{
    g.validate();
    freqs.validate();
    // Spatial frequencies K = 2 pi f / c0 (u_tx + u_rx) at the band edges.
    std::vector<Vec3> K;
    const double fl = freqs.at(0), fh = freqs.at(freqs.n_freq - 1);
    for (std::size_t j = 0; j < g.n_tx; ++j) {
        const Vec3 ut = transmitter_position(g, g.s_at(j)) - target;
        for (std::size_t k = 0; k < g.n_rx; ++k) {
            const Vec3 ur = receiver_position(g, g.r_at(k)) - target;
            const Vec3 u = ut / norm(ut) + ur / norm(ur);
            for (double f : {fl, fh}) K.push_back(u * (2.0 * kPi * f / kSpeedOfLight));
        }
    }
    Vec3 mean;
    for (const auto& v : K) mean += v;
    mean = mean / static_cast<double>(K.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& v : K) {
        const Eigen::Vector3d d(v.x - mean.x, v.y - mean.y, v.z - mean.z);
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    ResolutionCell cell;
    for (int a = 0; a < 3; ++a) {
        const Eigen::Vector3d e = es.eigenvectors().col(2 - a);  // largest spread first
        cell.axes[a] = {e(0), e(1), e(2)};
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& v : K) {
            const double p = dot(v, cell.axes[a]);
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        // A vanishing extent means no resolution along that axis.
        cell.widths[a] = hi - lo > 0.0 ? 2.0 * kPi / (hi - lo) : std::numeric_limits<double>::infinity();
    }
    return cell;
}

}  // namespace sarms
