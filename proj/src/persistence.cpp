#include "sarms/persistence.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "sarms/constants.hpp"
#include "sarms/error.hpp"

namespace sarms {

namespace {

void put_u32(unsigned char* p, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) p[i] = static_cast<unsigned char>(v >> (8 * i));
}
void put_u64(unsigned char* p, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) p[i] = static_cast<unsigned char>(v >> (8 * i));
}
void put_f64(unsigned char* p, double v) { put_u64(p, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(const unsigned char* p)
{
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}
std::uint64_t get_u64(const unsigned char* p)
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}
double get_f64(const unsigned char* p) { return std::bit_cast<double>(get_u64(p)); }

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<unsigned char> read_all(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failure on '" + path + "'");
    return bytes;
}

void write_all(const std::string& path, const std::vector<unsigned char>& bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failure on '" + path + "'");
}

std::uint64_t checked_count(const std::uint64_t dims[3])
{
    std::uint64_t n = 1;
    for (int i = 0; i < 3; ++i) {
        if (dims[i] != 0 && n > std::numeric_limits<std::uint64_t>::max() / 16 / dims[i])
            throw DimsOverflow("header dimensions overflow the addressable payload size");
        n *= dims[i];
    }
    return n;
}

std::vector<unsigned char> encode_file(const FileHeader& h, const std::vector<cplx>& data)
{
    auto bytes = encode_header(h);
    bytes.resize(kHeaderSize + data.size() * 16);
    unsigned char* p = bytes.data() + kHeaderSize;
    for (const auto& v : data) {
        put_f64(p, v.real());
        put_f64(p + 8, v.imag());
        p += 16;
    }
    return bytes;
}

std::vector<cplx> decode_payload(const std::vector<unsigned char>& bytes, const FileHeader& h)
{
    const std::uint64_t n = checked_count(h.dims);
    const std::uint64_t need = n * 16;
    if (bytes.size() - kHeaderSize < need)
        throw DimsOverflow("payload holds " + std::to_string(bytes.size() - kHeaderSize) + " bytes but the header requires " +
                           std::to_string(need));
    if (bytes.size() - kHeaderSize > need) throw IoError("trailing bytes after payload");
    std::vector<cplx> data(static_cast<std::size_t>(n));
    const unsigned char* p = bytes.data() + kHeaderSize;
    for (auto& v : data) {
        v = cplx(get_f64(p), get_f64(p + 8));
        p += 16;
    }
    return data;
}

}  // namespace

std::vector<unsigned char> encode_header(const FileHeader& h)
{
    std::vector<unsigned char> b(kHeaderSize, 0);
    std::memcpy(b.data(), kMagic, 8);
    put_u32(&b[8], h.version);
    put_u32(&b[12], static_cast<std::uint32_t>(h.kind));
    for (int i = 0; i < 3; ++i) put_u64(&b[16 + 8 * i], h.dims[i]);
    const auto& g = h.geometry;
    const double gd[6] = {g.beta, g.z0, g.s_min, g.s_max, g.r_min, g.r_max};
    for (int i = 0; i < 6; ++i) put_f64(&b[40 + 8 * i], gd[i]);
    put_u64(&b[88], g.n_tx);
    put_u64(&b[96], g.n_rx);
    put_f64(&b[104], h.freqs.center_hz);
    put_f64(&b[112], h.freqs.bandwidth_hz);
    put_u64(&b[120], h.freqs.n_freq);
    put_f64(&b[128], h.origin.x);
    put_f64(&b[136], h.origin.y);
    put_f64(&b[144], h.origin.z);
    put_f64(&b[152], h.spacing);
    return b;
}

FileHeader decode_header(const unsigned char* b, std::size_t n)
{
    if (n < kHeaderSize) throw IoError("file shorter than the 256-byte header");
    if (std::memcmp(b, kMagic, 8) != 0) throw BadMagic("not a SARMS3D file (bad magic)");
    FileHeader h;
    h.version = get_u32(b + 8);
    if (h.version != kFormatVersion)
        throw VersionMismatch("unsupported format version " + std::to_string(h.version));
    const std::uint32_t kind = get_u32(b + 12);
    if (kind > 1) throw IoError("unknown payload kind " + std::to_string(kind));
    h.kind = static_cast<PayloadKind>(kind);
    for (int i = 0; i < 3; ++i) h.dims[i] = get_u64(b + 16 + 8 * i);
    auto& g = h.geometry;
    g.beta = get_f64(b + 40);
    g.z0 = get_f64(b + 48);
    g.s_min = get_f64(b + 56);
    g.s_max = get_f64(b + 64);
    g.r_min = get_f64(b + 72);
    g.r_max = get_f64(b + 80);
    g.n_tx = static_cast<std::size_t>(get_u64(b + 88));
    g.n_rx = static_cast<std::size_t>(get_u64(b + 96));
    h.freqs.center_hz = get_f64(b + 104);
    h.freqs.bandwidth_hz = get_f64(b + 112);
    h.freqs.n_freq = static_cast<std::size_t>(get_u64(b + 120));
    h.origin = {get_f64(b + 128), get_f64(b + 136), get_f64(b + 144)};
    h.spacing = get_f64(b + 152);
    return h;
}

void write_phase_history(const std::string& path, const PhaseHistory& ph)
{
    const auto& g = ph.geometry;
    if (ph.data.size() != ph.freqs.n_freq * g.n_tx * g.n_rx)
        throw ShapeMismatch("phase history payload does not match its dimensions");
    FileHeader h;
    h.kind = PayloadKind::phase_history;
    h.dims[0] = ph.freqs.n_freq;
    h.dims[1] = g.n_tx;
    h.dims[2] = g.n_rx;
    h.geometry = g;
    h.freqs = ph.freqs;
    write_all(path, encode_file(h, ph.data));
}

FileHeader read_header(const std::string& path)
{
    const auto bytes = read_all(path);
    return decode_header(bytes.data(), bytes.size());
}

PhaseHistory read_phase_history(const std::string& path)
{
    const auto bytes = read_all(path);
    const FileHeader h = decode_header(bytes.data(), bytes.size());
    if (h.kind != PayloadKind::phase_history) throw IoError("'" + path + "' holds an image volume, not a phase history");
    if (h.dims[0] != h.freqs.n_freq || h.dims[1] != h.geometry.n_tx || h.dims[2] != h.geometry.n_rx)
        throw DimsOverflow("phase-history dimensions disagree with the geometry block");
    PhaseHistory ph;
    ph.geometry = h.geometry;
    ph.freqs = h.freqs;
    ph.data = decode_payload(bytes, h);
    return ph;
}

void write_volume(const std::string& path, const ImageVolume& vol)
{
    if (vol.values.size() != vol.grid.size()) throw ShapeMismatch("volume payload does not match its grid");
    FileHeader h;
    h.kind = PayloadKind::volume;
    h.dims[0] = vol.grid.nx;
    h.dims[1] = vol.grid.ny;
    h.dims[2] = vol.grid.nz;
    h.geometry.n_tx = 0;
    h.geometry.n_rx = 0;
    h.geometry.beta = 0.0;
    h.geometry.s_max = h.geometry.r_max = 0.0;
    h.freqs.center_hz = h.freqs.bandwidth_hz = 0.0;
    h.freqs.n_freq = 0;
    h.origin = vol.grid.origin;
    h.spacing = vol.grid.spacing;
    write_all(path, encode_file(h, vol.values));
}

ImageVolume read_volume(const std::string& path)
{
    const auto bytes = read_all(path);
    const FileHeader h = decode_header(bytes.data(), bytes.size());
    if (h.kind != PayloadKind::volume) throw IoError("'" + path + "' holds a phase history, not an image volume");
    ImageVolume vol;
    vol.grid.origin = h.origin;
    vol.grid.spacing = h.spacing;
    vol.grid.nx = static_cast<std::size_t>(h.dims[0]);
    vol.grid.ny = static_cast<std::size_t>(h.dims[1]);
    vol.grid.nz = static_cast<std::size_t>(h.dims[2]);
    vol.values = decode_payload(bytes, h);
    return vol;
}

std::vector<unsigned char> encode_pgm(const Image2D& img)
{
    const std::string head = "P5\n" + std::to_string(img.n1) + " " + std::to_string(img.n0) + "\n255\n";
    std::vector<unsigned char> out(head.begin(), head.end());
    out.reserve(head.size() + img.values.size());
    for (double v : img.values) {
        const double c = std::clamp(v, 0.0, 1.0);
        out.push_back(static_cast<unsigned char>(std::nearbyint(c * 255.0)));
    }
    return out;
}

void write_pgm(const std::string& path, const Image2D& img)
{
    write_all(path, encode_pgm(img));
}

void write_text(const std::string& path, const std::string& text)
{
    write_all(path, std::vector<unsigned char>(text.begin(), text.end()));
}

std::string gating_csv(const GatingReport& rep)
{
    std::string s = "s,r,D,t_min_seconds,roi_compliant\n";
    for (const auto& e : rep.entries)
        s += fmt(e.s) + "," + fmt(e.r) + "," + fmt(e.D) + "," + fmt(e.t_min) + "," + (e.roi_compliant ? "1" : "0") + "\n";
    return s;
}

void write_gating_csv(const std::string& path, const GatingReport& rep)
{
    write_text(path, gating_csv(rep));
}

namespace {

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    return out;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out)
{
    const std::string t = trim(s);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size() && std::isfinite(out);
}

bool parse_size(const std::string& s, std::size_t& out)
{
    const std::string t = trim(s);
    if (t.empty() || t[0] == '-' || t[0] == '+') return false;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size()) return false;
    out = static_cast<std::size_t>(v);
    return true;
}

bool parse_vec3(const std::string& s, Vec3& out)
{
    std::string t = s;
    for (char& c : t)
        if (c == ',') c = ' ';
    std::istringstream is(t);
    std::string a, b, c, extra;
    if (!(is >> a >> b >> c) || (is >> extra)) return false;
    return parse_double(a, out.x) && parse_double(b, out.y) && parse_double(c, out.z);
}

}  // namespace

GatingReport read_gating_csv(const std::string& path, double rho_min_value, std::size_t n_tx, std::size_t n_rx)
{
    const auto bytes = read_all(path);
    std::istringstream in(std::string(bytes.begin(), bytes.end()));
    std::string line;
    if (!std::getline(in, line) || trim(line) != "s,r,D,t_min_seconds,roi_compliant")
        throw IoError("'" + path + "' is not a gating report (unexpected header)");
    GatingReport rep;
    rep.rho_min = rho_min_value;
    rep.n_tx = n_tx;
    rep.n_rx = n_rx;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto f = split(line, ',');
        GatingEntry e;
        if (f.size() != 5 || !parse_double(f[0], e.s) || !parse_double(f[1], e.r) || !parse_double(f[2], e.D) ||
            !parse_double(f[3], e.t_min) || (trim(f[4]) != "0" && trim(f[4]) != "1"))
            throw IoError(path + ":" + std::to_string(lineno) + ": malformed gating row");
        e.roi_compliant = trim(f[4]) == "1";
        const std::size_t idx = rep.entries.size();
        e.j = n_rx ? idx / n_rx : 0;
        e.k = n_rx ? idx % n_rx : 0;
        rep.entries.push_back(e);
    }
    if (rep.entries.size() != n_tx * n_rx)
        throw ShapeMismatch("gating report has " + std::to_string(rep.entries.size()) + " rows, expected " +
                            std::to_string(n_tx * n_rx));
    return rep;
}

std::string solutions_csv(const std::vector<ArtefactSolution>& sols)
{
    std::string s = "y1,y2,y3,residual_norm,classification\n";
    for (const auto& a : sols)
        s += fmt(a.y.x) + "," + fmt(a.y.y) + "," + fmt(a.y.z) + "," + fmt(a.residual_norm) + "," +
             to_string(a.classification) + "\n";
    return s;
}

std::string bem_csv(const BemAperture& bem)
{
    std::string s = "j,k,x,y,z\n";
    for (std::size_t j = 0; j < bem.n_tx; ++j)
        for (std::size_t k = 0; k < bem.n_rx; ++k) {
            const Vec3& p = bem.points[j * bem.n_rx + k];
            s += std::to_string(j) + "," + std::to_string(k) + "," + fmt(p.x) + "," + fmt(p.y) + "," + fmt(p.z) + "\n";
        }
    return s;
}

std::string peaks_csv(const std::vector<Peak>& peaks)
{
    std::string s = "x,y,z,i,j,k,magnitude,magnitude_db\n";
    for (const auto& p : peaks)
        s += fmt(p.position.x) + "," + fmt(p.position.y) + "," + fmt(p.position.z) + "," + std::to_string(p.i) + "," +
             std::to_string(p.j) + "," + std::to_string(p.k) + "," + fmt(p.magnitude) + "," + fmt(p.magnitude_db) + "\n";
    return s;
}

std::string delta_sweep_csv(const std::vector<DeltaSweepRow>& rows)
{
    std::string s = "rho,n_samples,n_nonpositive,min_determinant\n";
    for (const auto& r : rows)
        s += fmt(r.rho) + "," + std::to_string(r.n_samples) + "," + std::to_string(r.n_nonpositive) + "," +
             fmt(r.min_delta) + "\n";
    return s;
}

std::string scan_csv(const std::vector<ScanRow>& rows)
{
    std::string s = "rho,x1,x2,x3,n_solutions,n_extra,n_extra_degenerate\n";
    for (const auto& r : rows)
        s += fmt(r.rho) + "," + fmt(r.x.x) + "," + fmt(r.x.y) + "," + fmt(r.x.z) + "," + std::to_string(r.n_solutions) +
             "," + std::to_string(r.n_extra) + "," + std::to_string(r.n_extra_degenerate) + "\n";
    return s;
}

Scene parse_scene(const std::string& text)
{
    Scene scene;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> errors;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        if (tok[0] == "center") {
            Vec3 c;
            if (tok.size() != 4 || !parse_double(tok[1], c.x) || !parse_double(tok[2], c.y) || !parse_double(tok[3], c.z))
                errors.push_back("line " + std::to_string(lineno) + ": expected 'center x y z'");
            else
                scene.center = c;
            continue;
        }
        Scatterer sc;
        double re = 1.0, im = 0.0;
        const bool ok = (tok.size() == 3 || tok.size() == 5) && parse_double(tok[0], sc.position.x) &&
                        parse_double(tok[1], sc.position.y) && parse_double(tok[2], sc.position.z) &&
                        (tok.size() == 3 || (parse_double(tok[3], re) && parse_double(tok[4], im)));
        if (!ok) {
            errors.push_back("line " + std::to_string(lineno) + ": expected 'x y z [re im]'");
            continue;
        }
        sc.amplitude = cplx(re, im);
        scene.scatterers.push_back(sc);
    }
    if (!errors.empty()) {
        std::string msg = "invalid scene file:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    return scene;
}

Scene read_scene(const std::string& path)
{
    const auto bytes = read_all(path);
    return parse_scene(std::string(bytes.begin(), bytes.end()));
}

std::string scene_text(const Scene& scene)
{
    std::string s = "center " + fmt(scene.center.x) + " " + fmt(scene.center.y) + " " + fmt(scene.center.z) + "\n";
    for (const auto& sc : scene.scatterers)
        s += fmt(sc.position.x) + " " + fmt(sc.position.y) + " " + fmt(sc.position.z) + " " + fmt(sc.amplitude.real()) +
             " " + fmt(sc.amplitude.imag()) + "\n";
    return s;
}

Scene RunConfig::load_scene() const
{
    if (scene == "default") return scene_center ? default_scene(*scene_center) : default_scene();
    return read_scene(scene);
}

double RunConfig::resolved_rho_min() const
{
    return rho_auto ? rho_min(geometry.delta()) : rho_value;
}

namespace {

const std::set<std::string> kRequired = {"beta_deg", "z0_m", "s_min", "s_max", "r_min", "r_max", "n_tx", "n_rx",
                                         "fc_hz", "bw_hz", "n_freq", "origin", "spacing_m", "nx", "ny", "nz",
                                         "scene", "rho_min_mode"};
const std::set<std::string> kOptional = {"rho_min_value", "window", "aperture_window", "roi_lo", "roi_hi",
                                         "scene_center"};

bool parse_window(const std::string& v, Window& w)
{
    if (v == "rect") w = Window::rect;
    else if (v == "hann") w = Window::hann;
    else return false;
    return true;
}

std::string window_name(Window w) { return w == Window::hann ? "hann" : "rect"; }

}  // namespace

RunConfig parse_run_config(const std::string& text)
{
    RunConfig cfg;
    std::vector<std::string> errors;
    std::map<std::string, std::pair<std::string, std::size_t>> kv;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!kRequired.count(key) && !kOptional.count(key)) {
            errors.push_back("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
            continue;
        }
        if (kv.count(key)) {
            errors.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "' (first on line " +
                             std::to_string(kv[key].second) + ")");
            continue;
        }
        if (val.empty()) {
            errors.push_back("line " + std::to_string(lineno) + ": empty value for '" + key + "'");
            continue;
        }
        kv[key] = {val, lineno};
    }
    for (const auto& k : kRequired)
        if (!kv.count(k)) errors.push_back("missing required key '" + k + "'");

    auto where = [&](const std::string& key) { return "line " + std::to_string(kv[key].second) + ": "; };
    auto num = [&](const std::string& key, double& out) {
        if (kv.count(key) && !parse_double(kv[key].first, out))
            errors.push_back(where(key) + "'" + key + "' must be a finite number");
    };
    auto count = [&](const std::string& key, std::size_t& out) {
        if (kv.count(key) && (!parse_size(kv[key].first, out) || out == 0))
            errors.push_back(where(key) + "'" + key + "' must be a positive integer");
    };
    auto vec = [&](const std::string& key, Vec3& out) {
        if (kv.count(key) && !parse_vec3(kv[key].first, out))
            errors.push_back(where(key) + "'" + key + "' must be three numbers");
    };

    double beta_deg = 90.0;
    num("beta_deg", beta_deg);
    cfg.geometry.beta = beta_deg * kPi / 180.0;
    num("z0_m", cfg.geometry.z0);
    num("s_min", cfg.geometry.s_min);
    num("s_max", cfg.geometry.s_max);
    num("r_min", cfg.geometry.r_min);
    num("r_max", cfg.geometry.r_max);
    count("n_tx", cfg.geometry.n_tx);
    count("n_rx", cfg.geometry.n_rx);
    num("fc_hz", cfg.freqs.center_hz);
    num("bw_hz", cfg.freqs.bandwidth_hz);
    count("n_freq", cfg.freqs.n_freq);
    vec("origin", cfg.grid.origin);
    num("spacing_m", cfg.grid.spacing);
    count("nx", cfg.grid.nx);
    count("ny", cfg.grid.ny);
    count("nz", cfg.grid.nz);
    if (kv.count("scene")) cfg.scene = kv["scene"].first;
    if (kv.count("scene_center")) {
        Vec3 c;
        vec("scene_center", c);
        cfg.scene_center = c;
        if (cfg.scene != "default") errors.push_back(where("scene_center") + "scene_center applies only to scene = default");
    }

    if (kv.count("rho_min_mode")) {
        const auto& m = kv["rho_min_mode"].first;
        if (m == "auto") {
            cfg.rho_auto = true;
        } else if (m == "value") {
            cfg.rho_auto = false;
            if (!kv.count("rho_min_value"))
                errors.push_back(where("rho_min_mode") + "rho_min_mode = value requires rho_min_value");
            else
                num("rho_min_value", cfg.rho_value);
        } else {
            errors.push_back(where("rho_min_mode") + "rho_min_mode must be 'auto' or 'value'");
        }
    }
    for (const char* key : {"window", "aperture_window"}) {
        if (!kv.count(key)) continue;
        Window& w = std::string(key) == "window" ? cfg.imaging.window : cfg.imaging.aperture_window;
        if (!parse_window(kv[key].first, w)) errors.push_back(where(key) + "'" + key + "' must be 'rect' or 'hann'");
    }
    if (kv.count("roi_lo") != kv.count("roi_hi")) {
        errors.push_back("roi_lo and roi_hi must be given together");
    } else if (kv.count("roi_lo")) {
        Box b;
        vec("roi_lo", b.lo);
        vec("roi_hi", b.hi);
        cfg.roi = b;
    }

    if (errors.empty()) {
        try {
            cfg.geometry.validate();
            cfg.freqs.validate();
            cfg.grid.validate();
        } catch (const std::invalid_argument& e) {
            errors.push_back(e.what());
        }
    }
    if (!errors.empty()) {
        std::string msg = "invalid run configuration:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    return cfg;
}

RunConfig read_run_config(const std::string& path)
{
    const auto bytes = read_all(path);
    return parse_run_config(std::string(bytes.begin(), bytes.end()));
}

std::string run_config_text(const RunConfig& cfg)
{
    const auto& g = cfg.geometry;
    std::ostringstream os;
    os << "# acquisition\n"
       << "beta_deg = " << fmt(g.beta * 180.0 / kPi) << "\n"
       << "z0_m = " << fmt(g.z0) << "\n"
       << "s_min = " << fmt(g.s_min) << "\n"
       << "s_max = " << fmt(g.s_max) << "\n"
       << "r_min = " << fmt(g.r_min) << "\n"
       << "r_max = " << fmt(g.r_max) << "\n"
       << "n_tx = " << g.n_tx << "\n"
       << "n_rx = " << g.n_rx << "\n"
       << "# frequency sweep\n"
       << "fc_hz = " << fmt(cfg.freqs.center_hz) << "\n"
       << "bw_hz = " << fmt(cfg.freqs.bandwidth_hz) << "\n"
       << "n_freq = " << cfg.freqs.n_freq << "\n"
       << "# voxel grid\n"
       << "origin = " << fmt(cfg.grid.origin.x) << " " << fmt(cfg.grid.origin.y) << " " << fmt(cfg.grid.origin.z) << "\n"
       << "spacing_m = " << fmt(cfg.grid.spacing) << "\n"
       << "nx = " << cfg.grid.nx << "\n"
       << "ny = " << cfg.grid.ny << "\n"
       << "nz = " << cfg.grid.nz << "\n"
       << "scene = " << cfg.scene << "\n";
    if (cfg.scene_center)
        os << "scene_center = " << fmt(cfg.scene_center->x) << " " << fmt(cfg.scene_center->y) << " "
           << fmt(cfg.scene_center->z) << "\n";
    os
       << "window = " << window_name(cfg.imaging.window) << "\n"
       << "aperture_window = " << window_name(cfg.imaging.aperture_window) << "\n"
       << "# gating\n"
       << "rho_min_mode = " << (cfg.rho_auto ? "auto" : "value") << "\n";
    if (!cfg.rho_auto) os << "rho_min_value = " << fmt(cfg.rho_value) << "\n";
    if (cfg.roi) {
        os << "roi_lo = " << fmt(cfg.roi->lo.x) << " " << fmt(cfg.roi->lo.y) << " " << fmt(cfg.roi->lo.z) << "\n";
        os << "roi_hi = " << fmt(cfg.roi->hi.x) << " " << fmt(cfg.roi->hi.y) << " " << fmt(cfg.roi->hi.z) << "\n";
    }
    return os.str();
}

}  // namespace sarms
