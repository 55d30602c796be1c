#include "usconf/phantom.hpp"
#include "usconf/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace usconf {

namespace {

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument(what); }

struct Canvas {
    int h, a;
    std::vector<double> img;
    std::vector<float> needle, reverb;

    Canvas(int h, int a, double bg)
        : h(h), a(a), img(static_cast<size_t>(h) * a, bg),
          needle(static_cast<size_t>(h) * a, 0.0f), reverb(static_cast<size_t>(h) * a, 0.0f) {}

    double& at(int i, int j) { return img[static_cast<size_t>(i) * a + j]; }
};

void check_cols(int col0, int col1, int width, const std::string& what) {
    if (col0 < 0 || col1 > width || col0 >= col1) bad("phantom: " + what + " columns out of bounds");
}

void render(Canvas& c, const ReflectorElement& e) {
    if (e.row < 1 || e.row >= c.h - 1) bad("phantom: reflector row out of bounds");
    check_cols(e.col0, e.col1, c.a, "reflector");
    if (e.intensity < 0.0 || e.intensity > 1.0 || e.attenuation_drop < 0.0 || e.attenuation_drop > 1.0)
        bad("phantom: reflector intensities must be in [0,1]");
    for (int j = e.col0; j < e.col1; ++j) c.at(e.row, j) = e.intensity;
    for (int i = e.row + 1; i < c.h; ++i)
        for (int j = e.col0; j < e.col1; ++j) c.at(i, j) *= e.attenuation_drop;
}

void render(Canvas& c, const VesselElement& e) {
    if (e.radius_rows <= 0 || e.radius_cols <= 0) bad("phantom: vessel radii must be positive");
    if (e.center_row - e.radius_rows < 0 || e.center_row + e.radius_rows >= c.h ||
        e.center_col - e.radius_cols < 0 || e.center_col + e.radius_cols >= c.a)
        bad("phantom: vessel outside image bounds");
    if (e.wall_intensity < 0.0 || e.wall_intensity > 1.0 || e.lumen_intensity < 0.0 ||
        e.lumen_intensity > 1.0)
        bad("phantom: vessel intensities must be in [0,1]");
    for (int i = e.center_row - e.radius_rows; i <= e.center_row + e.radius_rows; ++i) {
        for (int j = e.center_col - e.radius_cols; j <= e.center_col + e.radius_cols; ++j) {
            const double dr = static_cast<double>(i - e.center_row) / e.radius_rows;
            const double dc = static_cast<double>(j - e.center_col) / e.radius_cols;
            const double rho = std::sqrt(dr * dr + dc * dc);
            if (rho <= 0.7) c.at(i, j) = e.lumen_intensity;
            else if (rho <= 1.0) c.at(i, j) = e.wall_intensity; // wall band
        }
    }
}

void render(Canvas& c, const NeedleElement& e) {
    if (e.row < 1 || e.row >= c.h - 1) bad("phantom: needle row out of bounds");
    check_cols(e.col0, e.col1, c.a, "needle");
    if (e.intensity < 0.0 || e.intensity > 1.0) bad("phantom: needle intensity must be in [0,1]");
    if (e.reverb_period <= 0 || e.reverb_count < 0 || e.reverb_decay < 0.0 || e.reverb_decay > 1.0 ||
        e.attenuation_drop < 0.0 || e.attenuation_drop > 1.0)
        bad("phantom: bad needle reverberation parameters");
    for (int j = e.col0; j < e.col1; ++j) {
        c.at(e.row, j) = e.intensity;
        c.needle[static_cast<size_t>(e.row) * c.a + j] = 1.0f;
    }
    for (int i = e.row + 1; i < c.h; ++i)
        for (int j = e.col0; j < e.col1; ++j) c.at(i, j) *= e.attenuation_drop;
    // echoes overwrite the shadow: reverberation copies are artificial and
    // not attenuated by the needle
    double level = e.intensity;
    for (int m = 1; m <= e.reverb_count; ++m) {
        level *= e.reverb_decay;
        const int i = e.row + m * e.reverb_period;
        if (i >= c.h) break;
        for (int j = e.col0; j < e.col1; ++j) {
            c.at(i, j) = level;
            c.reverb[static_cast<size_t>(i) * c.a + j] = 1.0f;
        }
    }
}

void render(Canvas& c, const DetachElement& e) {
    check_cols(e.col0, e.col1, c.a, "detach");
    for (int i = 0; i < c.h; ++i)
        for (int j = e.col0; j < e.col1; ++j) c.at(i, j) = 0.01;
}

struct PatchGeometry {
    int row, col0, col1; // the structure casting the shadow/train
    int b_row0, b_row1;  // artifact/shadow rows
    PatchKind kind;
};

// Emits an (A, B, C) triple for the element when the geometry leaves room;
// small or crowded phantoms simply get no patches for it.
void add_patches(std::vector<PatchSpec>& out, const PatchGeometry& g, int h, int a) {
    const int inset = std::max(1, (g.col1 - g.col0) / 6);
    const int pc0 = g.col0 + inset, pc1 = g.col1 - inset;
    if (pc1 - pc0 < 2) return;
    const int a_row1 = g.row - 2;
    const int a_row0 = std::max(0, a_row1 - 12);
    if (a_row1 - a_row0 < 2) return;
    const int b_row0 = std::max(g.b_row0, 0);
    const int b_row1 = std::min(g.b_row1, h);
    if (b_row1 - b_row0 < 2) return;

    const int pw = pc1 - pc0;
    int c0 = g.col1 + 4;
    if (c0 + pw > a) c0 = g.col0 - 4 - pw; // fall back to the left side
    if (c0 < 0) return;

    out.push_back({PatchRole::A, g.kind, {a_row0, pc0, a_row1, pc1}});
    out.push_back({PatchRole::B, g.kind, {b_row0, pc0, b_row1, pc1}});
    out.push_back({PatchRole::C, g.kind, {b_row0, c0, b_row1, c0 + pw}});
}

} // namespace

GeneratedPhantom generate(const PhantomSpec& spec) {
    if (spec.height < 2 || spec.width < 2) bad("phantom: dimensions must be at least 2x2");
    if (spec.background < 0.0 || spec.background > 1.0) bad("phantom: background must be in [0,1]");
    if (spec.speckle_std < 0.0) bad("phantom: speckle_std must be >= 0");

    Canvas canvas(spec.height, spec.width, spec.background);
    std::vector<PatchSpec> patches;
    for (const PhantomElement& el : spec.elements) {
        std::visit([&](const auto& e) { render(canvas, e); }, el);
        if (const auto* r = std::get_if<ReflectorElement>(&el)) {
            PatchGeometry g{r->row, r->col0, r->col1, r->row + 4,
                            std::min(r->row + 4 + 28, spec.height - 2), PatchKind::shadow};
            add_patches(patches, g, spec.height, spec.width);
        } else if (const auto* n = std::get_if<NeedleElement>(&el)) {
            PatchGeometry g{n->row, n->col0, n->col1, n->row + std::max(2, n->reverb_period - 2),
                            std::min(n->row + n->reverb_period * std::max(1, n->reverb_count) + 3,
                                     spec.height - 2),
                            PatchKind::reverberation};
            add_patches(patches, g, spec.height, spec.width);
        }
    }

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : canvas.img) {
        if (spec.speckle_std > 0.0) v *= 1.0 + spec.speckle_std * normal(rng);
        v = std::clamp(v, 0.0, 1.0);
    }

    std::vector<float> samples(canvas.img.size());
    for (size_t i = 0; i < samples.size(); ++i) samples[i] = static_cast<float>(canvas.img[i]);
    GeneratedPhantom out{
        ImageGrid(spec.height, spec.width, ValueDomain::intensity, std::move(samples)),
        ProbMask::combined(
            ImageGrid(spec.height, spec.width, ValueDomain::probability, std::move(canvas.needle)),
            ImageGrid(spec.height, spec.width, ValueDomain::probability, std::move(canvas.reverb))),
        std::move(patches)};
    return out;
}

namespace {

using KeyValues = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double num(const KeyValues& kv, const std::string& key, const std::string& kind) {
    auto it = kv.find(key);
    if (it == kv.end()) bad("phantom spec: element '" + kind + "' missing key '" + key + "'");
    return std::stod(it->second);
}

double num_or(const KeyValues& kv, const std::string& key, double fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stod(it->second);
}

std::pair<int, int> int_pair(const KeyValues& kv, const std::string& key, const std::string& kind,
                             char sep) {
    auto it = kv.find(key);
    if (it == kv.end()) bad("phantom spec: element '" + kind + "' missing key '" + key + "'");
    std::istringstream in(it->second);
    int x = 0, y = 0;
    char c = 0;
    if (!(in >> x >> c >> y) || c != sep || !(in >> std::ws).eof())
        bad("phantom spec: bad value for '" + key + "': '" + it->second + "'");
    return {x, y};
}

PhantomElement parse_element(const std::string& line) {
    std::istringstream in(line);
    std::string kw, kind;
    in >> kw >> kind;
    KeyValues kv;
    std::string tok;
    while (in >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) bad("phantom spec: expected key=value, got '" + tok + "'");
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    if (kind == "reflector") {
        ReflectorElement e;
        e.row = static_cast<int>(num(kv, "row", kind));
        std::tie(e.col0, e.col1) = int_pair(kv, "cols", kind, ':');
        e.intensity = num(kv, "intensity", kind);
        e.attenuation_drop = num(kv, "drop", kind);
        return e;
    }
    if (kind == "vessel") {
        VesselElement e;
        std::tie(e.center_row, e.center_col) = int_pair(kv, "center", kind, ',');
        std::tie(e.radius_rows, e.radius_cols) = int_pair(kv, "radii", kind, ',');
        e.wall_intensity = num(kv, "wall", kind);
        e.lumen_intensity = num(kv, "lumen", kind);
        return e;
    }
    if (kind == "needle") {
        NeedleElement e;
        e.row = static_cast<int>(num(kv, "row", kind));
        std::tie(e.col0, e.col1) = int_pair(kv, "cols", kind, ':');
        e.intensity = num(kv, "intensity", kind);
        e.reverb_period = static_cast<int>(num(kv, "period", kind));
        e.reverb_count = static_cast<int>(num(kv, "count", kind));
        e.reverb_decay = num(kv, "decay", kind);
        e.attenuation_drop = num_or(kv, "drop", 0.5);
        return e;
    }
    if (kind == "detach") {
        DetachElement e;
        std::tie(e.col0, e.col1) = int_pair(kv, "cols", kind, ':');
        return e;
    }
    bad("phantom spec: unknown element kind '" + kind + "'");
}

} // namespace

PhantomSpec parse_phantom_text(const std::string& text) {
    PhantomSpec spec;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool have_h = false, have_w = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.rfind("element", 0) == 0) {
            spec.elements.push_back(parse_element(line));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            bad("phantom spec line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "height") { spec.height = std::stoi(value); have_h = true; }
        else if (key == "width") { spec.width = std::stoi(value); have_w = true; }
        else if (key == "background") spec.background = std::stod(value);
        else if (key == "speckle_std") spec.speckle_std = std::stod(value);
        else if (key == "seed") spec.seed = std::stoull(value);
        else bad("phantom spec: unknown key '" + key + "'");
    }
    if (!have_h || !have_w) bad("phantom spec: height and width are required");
    return spec;
}

PhantomSpec load_phantom_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open phantom spec '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_phantom_text(buf.str());
}

} // namespace usconf
