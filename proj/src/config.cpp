#include "usconf/config.hpp"
#include "usconf/io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace usconf {

namespace {

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument(what); }

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) bad("config key '" + key + "': trailing junk in value '" + value + "'");
        return v;
    } catch (const std::invalid_argument&) {
        bad("config key '" + key + "': expected a number, got '" + value + "'");
    } catch (const std::out_of_range&) {
        bad("config key '" + key + "': value out of range '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        bad("config key '" + key + "': expected an integer, got '" + value + "'");
    return v;
}

Q0Region parse_q0_region(const std::string& value) {
    if (value == "auto") return Q0Region{};
    Q0Region r;
    r.automatic = false;
    std::istringstream in(value);
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(in >> r.rect.row0 >> c1 >> r.rect.col0 >> c2 >> r.rect.row1 >> c3 >> r.rect.col1) ||
        c1 != ',' || c2 != ',' || c3 != ',' || !(in >> std::ws).eof())
        bad("config key 'q0_region': expected 'auto' or 'row0,col0,row1,col1', got '" + value + "'");
    return r;
}

} // namespace

void DenoiseConfig::validate() const {
    if (iterations < 0) bad("denoise: iterations must be >= 0");
    if (!(time_step > 0.0 && time_step <= 0.25)) bad("denoise: time_step must be in (0, 0.25]");
    if (q0_decay_rho < 0.0) bad("denoise: q0_decay_rho must be >= 0");
    if (canny_low < 0.0 || canny_low > 1.0) bad("denoise: canny_low must be in [0,1]");
    if (canny_high < 0.0 || canny_high > 1.0) bad("denoise: canny_high must be in [0,1]");
    if (canny_low > canny_high) bad("denoise: canny_low must not exceed canny_high");
    if (!(canny_sigma > 0.0)) bad("denoise: canny_sigma must be > 0");
    if (!(c_canny > 0.0 && c_canny <= 1.0)) bad("denoise: c_canny must be in (0,1]");
    if (histogram_bins < 2) bad("denoise: histogram_bins must be >= 2");
    if (!q0_region.automatic && (q0_region.rect.rows() <= 0 || q0_region.rect.cols() <= 0))
        bad("denoise: q0_region rectangle is empty");
}

void ConfidenceConfig::validate() const {
    if (!(alpha > 0.0)) bad("config: alpha must be > 0");
    if (!(beta > 0.0)) bad("config: beta must be > 0");
    if (kappa < 0) bad("config: kappa must be >= 0");
    if (!(sigma > 0.0)) bad("config: sigma must be > 0");
    if (!(xi > 0.0 && xi < 1.0)) bad("config: xi must be in (0,1)");
    if (!(epsilon_mean > 0.0)) bad("config: epsilon_mean must be > 0");
    denoise.validate();
}

void apply_config_entry(ConfidenceConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "alpha") cfg.alpha = parse_double(key, value);
    else if (key == "beta") cfg.beta = parse_double(key, value);
    else if (key == "kappa") cfg.kappa = parse_int(key, value);
    else if (key == "sigma") cfg.sigma = parse_double(key, value);
    else if (key == "xi") cfg.xi = parse_double(key, value);
    else if (key == "epsilon_mean") cfg.epsilon_mean = parse_double(key, value);
    else if (key == "calibration_sign") {
        if (value == "as_printed") cfg.calibration_sign = CalibrationSign::as_printed;
        else if (value == "consistent") cfg.calibration_sign = CalibrationSign::consistent;
        else bad("config key 'calibration_sign': expected 'as_printed' or 'consistent', got '" + value + "'");
    }
    else if (key == "iterations") cfg.denoise.iterations = parse_int(key, value);
    else if (key == "time_step") cfg.denoise.time_step = parse_double(key, value);
    else if (key == "q0_region") cfg.denoise.q0_region = parse_q0_region(value);
    else if (key == "q0_decay_rho") cfg.denoise.q0_decay_rho = parse_double(key, value);
    else if (key == "canny_low") cfg.denoise.canny_low = parse_double(key, value);
    else if (key == "canny_high") cfg.denoise.canny_high = parse_double(key, value);
    else if (key == "canny_sigma") cfg.denoise.canny_sigma = parse_double(key, value);
    else if (key == "c_canny") cfg.denoise.c_canny = parse_double(key, value);
    else if (key == "histogram_bins") cfg.denoise.histogram_bins = parse_int(key, value);
    else bad("unknown config key '" + key + "'");
}

ConfidenceConfig parse_config_text(const std::string& text) {
    ConfidenceConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            bad("config line " + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

ConfidenceConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

} // namespace usconf
