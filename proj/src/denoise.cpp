#include "usconf/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <vector>

namespace usconf {

namespace {

constexpr double kIntensityFloor = 1.0 / 255.0;

inline int reflect(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

double sample_clamped(const ImageGrid& im, int i, int j) {
    return std::max(static_cast<double>(im.at(reflect(i, im.height()), reflect(j, im.width()))),
                    kIntensityFloor);
}

// separable Gaussian blur with replicated borders
ImageGrid gaussian_blur(const ImageGrid& image, double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(static_cast<size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        const double v = std::exp(-0.5 * (t * t) / (sigma * sigma));
        kernel[static_cast<size_t>(t + radius)] = v;
        sum += v;
    }
    for (double& v : kernel) v /= sum;

    const int h = image.height(), a = image.width();
    std::vector<double> tmp(static_cast<size_t>(h) * a), out(static_cast<size_t>(h) * a);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < a; ++j) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t)
                acc += kernel[static_cast<size_t>(t + radius)] * image.at(i, reflect(j + t, a));
            tmp[static_cast<size_t>(i) * a + j] = acc;
        }
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < a; ++j) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t)
                acc += kernel[static_cast<size_t>(t + radius)] * tmp[static_cast<size_t>(reflect(i + t, h)) * a + j];
            out[static_cast<size_t>(i) * a + j] = acc;
        }
    ImageGrid result(h, a, ValueDomain::unconstrained);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < a; ++j) result.at(i, j) = static_cast<float>(out[static_cast<size_t>(i) * a + j]);
    return result;
}

} // namespace

ImageGrid icov(const ImageGrid& image) {
    const int h = image.height(), a = image.width();
    ImageGrid q(h, a, ValueDomain::unconstrained);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < a; ++j) {
            const double c = sample_clamped(image, i, j);
            const double gx = 0.5 * (sample_clamped(image, i, j + 1) - sample_clamped(image, i, j - 1));
            const double gy = 0.5 * (sample_clamped(image, i + 1, j) - sample_clamped(image, i - 1, j));
            const double lap = sample_clamped(image, i + 1, j) + sample_clamped(image, i - 1, j) +
                               sample_clamped(image, i, j + 1) + sample_clamped(image, i, j - 1) - 4.0 * c;
            const double grad_over_i2 = (gx * gx + gy * gy) / (c * c);
            const double lap_over_i = lap / c;
            const double num = 0.5 * grad_over_i2 - (1.0 / 16.0) * lap_over_i * lap_over_i;
            double den = 1.0 + 0.25 * lap_over_i;
            den *= den;
            // keep q finite when the denominator degenerates
            const double radicand = std::max(0.0, num / std::max(den, 1e-12));
            q.at(i, j) = static_cast<float>(std::sqrt(radicand));
        }
    }
    return q;
}

ImageGrid diffusion_coefficient(const ImageGrid& q, double q0, const ImageGrid& edge_mask,
                                double c_canny) {
    if (!(q0 > 0.0)) throw std::invalid_argument("diffusion_coefficient: q0 must be > 0");
    if (!q.same_shape(edge_mask))
        throw std::invalid_argument("diffusion_coefficient: edge mask dimensions mismatch");
    const double q0sq = q0 * q0;
    ImageGrid c(q.height(), q.width(), ValueDomain::unconstrained);
    for (int i = 0; i < q.height(); ++i) {
        for (int j = 0; j < q.width(); ++j) {
            const double qsq = static_cast<double>(q.at(i, j)) * q.at(i, j);
            // algebraically 1 / (1 + (q^2-q0^2)/(q0^2(1+q0^2))), positive form
            double v = q0sq * (1.0 + q0sq) / (q0sq * q0sq + qsq);
            if (edge_mask.at(i, j) > 0.5f) v *= c_canny;
            c.at(i, j) = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    }
    return c;
}

ImageGrid canny_edges(const ImageGrid& image, const DenoiseConfig& cfg) {
    const int h = image.height(), a = image.width();
    const ImageGrid blurred = gaussian_blur(image, cfg.canny_sigma);

    std::vector<double> mag(static_cast<size_t>(h) * a, 0.0);
    std::vector<double> dx(static_cast<size_t>(h) * a, 0.0), dy(static_cast<size_t>(h) * a, 0.0);
    double max_mag = 0.0;
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < a; ++j) {
            const double gx = 0.5 * (blurred.at(i, reflect(j + 1, a)) - blurred.at(i, reflect(j - 1, a)));
            const double gy = 0.5 * (blurred.at(reflect(i + 1, h), j) - blurred.at(reflect(i - 1, h), j));
            const size_t idx = static_cast<size_t>(i) * a + j;
            dx[idx] = gx;
            dy[idx] = gy;
            mag[idx] = std::hypot(gx, gy);
            max_mag = std::max(max_mag, mag[idx]);
        }
    }
    ImageGrid edges(h, a, ValueDomain::probability, 0.0f);
    if (max_mag <= 0.0) return edges;

    // non-maximum suppression along the quantized gradient direction;
    // ties keep the later pixel so plateau edges stay one pixel wide
    std::vector<unsigned char> keep(static_cast<size_t>(h) * a, 0);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < a; ++j) {
            const size_t idx = static_cast<size_t>(i) * a + j;
            const double m = mag[idx];
            if (m <= 0.0) continue;
            const double angle = std::atan2(dy[idx], dx[idx]); // [-pi, pi]
            int di = 0, dj = 0;
            const double deg = angle * 180.0 / M_PI;
            const double fold = deg < 0.0 ? deg + 180.0 : deg; // direction mod 180
            if (fold < 22.5 || fold >= 157.5) { di = 0; dj = 1; }
            else if (fold < 67.5) { di = 1; dj = 1; }
            else if (fold < 112.5) { di = 1; dj = 0; }
            else { di = -1; dj = 1; }
            const double m_neg = mag[static_cast<size_t>(reflect(i - di, h)) * a + reflect(j - dj, a)];
            const double m_pos = mag[static_cast<size_t>(reflect(i + di, h)) * a + reflect(j + dj, a)];
            if (m >= m_neg && m > m_pos) keep[idx] = 1;
        }
    }

    const double t_high = cfg.canny_high * max_mag;
    const double t_low = cfg.canny_low * max_mag;
    std::vector<unsigned char> state(static_cast<size_t>(h) * a, 0); // 1 weak, 2 strong
    std::deque<std::pair<int, int>> frontier;
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < a; ++j) {
            const size_t idx = static_cast<size_t>(i) * a + j;
            if (!keep[idx] || mag[idx] <= 0.0) continue;
            if (mag[idx] >= t_high) {
                state[idx] = 2;
                frontier.emplace_back(i, j);
            } else if (mag[idx] >= t_low) {
                state[idx] = 1;
            }
        }
    }
    while (!frontier.empty()) { // weak pixels join when 8-connected to strong
        const auto [i, j] = frontier.front();
        frontier.pop_front();
        for (int di = -1; di <= 1; ++di) {
            for (int dj = -1; dj <= 1; ++dj) {
                const int ni = i + di, nj = j + dj;
                if (ni < 0 || ni >= h || nj < 0 || nj >= a) continue;
                const size_t nidx = static_cast<size_t>(ni) * a + nj;
                if (state[nidx] == 1) {
                    state[nidx] = 2;
                    frontier.emplace_back(ni, nj);
                }
            }
        }
    }
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < a; ++j)
            edges.at(i, j) = state[static_cast<size_t>(i) * a + j] == 2 ? 1.0f : 0.0f;
    return edges;
}

ImageGrid diffuse_step(const ImageGrid& image, const ImageGrid& coeff, double dt) {
    if (!image.same_shape(coeff)) throw std::invalid_argument("diffuse_step: dimensions mismatch");
    if (!(dt > 0.0 && dt <= 0.25)) throw std::invalid_argument("diffuse_step: dt must be in (0, 0.25]");
    const int h = image.height(), a = image.width();
    ImageGrid out(h, a, ValueDomain::unconstrained);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < a; ++j) {
            const double c0 = coeff.at(i, j);
            const double v = image.at(i, j);
            const double south = coeff.at(reflect(i + 1, h), j) * (image.at(reflect(i + 1, h), j) - v);
            const double north = c0 * (image.at(reflect(i - 1, h), j) - v);
            const double east = coeff.at(i, reflect(j + 1, a)) * (image.at(i, reflect(j + 1, a)) - v);
            const double west = c0 * (image.at(i, reflect(j - 1, a)) - v);
            out.at(i, j) = static_cast<float>(v + dt * (south + north + east + west));
        }
    }
    return out;
}

double estimate_q0(const ImageGrid& q, const Q0Region& region) {
    const int h = q.height(), a = q.width();
    if (!region.automatic) {
        if (!region.rect.inside(h, a))
            throw std::invalid_argument("q0_region outside image bounds");
        double sum = 0.0;
        for (int i = region.rect.row0; i < region.rect.row1; ++i)
            for (int j = region.rect.col0; j < region.rect.col1; ++j) sum += q.at(i, j);
        return sum / (static_cast<double>(region.rect.rows()) * region.rect.cols());
    }

    // minimum-variance 11x11 window via summed-area tables
    const int win_h = std::min(11, h), win_w = std::min(11, a);
    std::vector<double> s1(static_cast<size_t>(h + 1) * (a + 1), 0.0);
    std::vector<double> s2(static_cast<size_t>(h + 1) * (a + 1), 0.0);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < a; ++j) {
            const double v = q.at(i, j);
            const size_t idx = static_cast<size_t>(i + 1) * (a + 1) + (j + 1);
            s1[idx] = v + s1[idx - 1] + s1[idx - (a + 1)] - s1[idx - (a + 1) - 1];
            s2[idx] = v * v + s2[idx - 1] + s2[idx - (a + 1)] - s2[idx - (a + 1) - 1];
        }
    }
    auto box = [&](const std::vector<double>& s, int i0, int j0, int i1, int j1) {
        return s[static_cast<size_t>(i1) * (a + 1) + j1] - s[static_cast<size_t>(i0) * (a + 1) + j1] -
               s[static_cast<size_t>(i1) * (a + 1) + j0] + s[static_cast<size_t>(i0) * (a + 1) + j0];
    };
    const double n = static_cast<double>(win_h) * win_w;
    double best_var = HUGE_VAL, best_mean = 0.0;
    for (int i = 0; i + win_h <= h; ++i) {
        for (int j = 0; j + win_w <= a; ++j) {
            const double sum = box(s1, i, j, i + win_h, j + win_w);
            const double sumsq = box(s2, i, j, i + win_h, j + win_w);
            const double mean = sum / n;
            const double var = sumsq / n - mean * mean;
            if (var < best_var) {
                best_var = var;
                best_mean = mean;
            }
        }
    }
    return best_mean;
}

ImageGrid histogram_match(const ImageGrid& source, const ImageGrid& target, int bins) {
    if (bins < 2) throw std::invalid_argument("histogram_match: bins must be >= 2");
    const auto bin_of = [bins](float v) {
        const int b = static_cast<int>(static_cast<double>(v) * bins);
        return std::clamp(b, 0, bins - 1);
    };

    std::vector<size_t> tgt_hist(static_cast<size_t>(bins), 0);
    std::vector<double> tgt_sum(static_cast<size_t>(bins), 0.0);
    for (float v : target.samples()) {
        const size_t b = static_cast<size_t>(bin_of(v));
        ++tgt_hist[b];
        tgt_sum[b] += v;
    }
    // representative of each target bin: mean of the target samples in it
    // (a constant target maps back to its exact value); the clamp keeps a
    // rounded mean from drifting across the bin edge
    std::vector<float> rep(static_cast<size_t>(bins), 0.5f);
    for (int b = 0; b < bins; ++b) {
        if (tgt_hist[static_cast<size_t>(b)] == 0) continue;
        const float lo = static_cast<float>(static_cast<double>(b) / bins);
        const float hi = std::nextafter(static_cast<float>(static_cast<double>(b + 1) / bins), lo);
        const float mean = static_cast<float>(
            tgt_sum[static_cast<size_t>(b)] / static_cast<double>(tgt_hist[static_cast<size_t>(b)]));
        rep[static_cast<size_t>(b)] = std::clamp(mean, lo, hi);
    }

    // rank-based specification: the r-th ranked source sample takes the
    // target bin covering quantile (r+0.5)/n, so the output's binned CDF
    // stays within 1/bins of the target's. Ties break by pixel index, which
    // keeps the mapping deterministic and the constant image a fixed point.
    const size_t n_src = source.samples().size();
    const size_t n_tgt = target.samples().size();
    std::vector<uint32_t> order(n_src);
    for (size_t i = 0; i < n_src; ++i) order[i] = static_cast<uint32_t>(i);
    const auto src = source.samples();
    std::stable_sort(order.begin(), order.end(),
                     [&src](uint32_t a, uint32_t b) { return src[a] < src[b]; });

    ImageGrid out = source;
    int tb = 0;
    size_t cum = tgt_hist[0];
    for (size_t r = 0; r < n_src; ++r) {
        const double pos = (static_cast<double>(r) + 0.5) / static_cast<double>(n_src) *
                           static_cast<double>(n_tgt);
        while (tb < bins - 1 && static_cast<double>(cum) < pos) {
            ++tb;
            cum += tgt_hist[static_cast<size_t>(tb)];
        }
        out.samples()[order[r]] = rep[static_cast<size_t>(tb)];
    }
    return out;
}

ImageGrid denoise(const ImageGrid& image, const DenoiseConfig& cfg) {
    cfg.validate();
    image.validate();
    if (!cfg.q0_region.automatic && !cfg.q0_region.rect.inside(image.height(), image.width()))
        throw std::invalid_argument("q0_region outside image bounds");
    if (cfg.iterations == 0) return image;

    ImageGrid current = image;
    for (int t = 0; t < cfg.iterations; ++t) {
        const ImageGrid q = icov(current);
        const double q0 =
            std::max(estimate_q0(q, cfg.q0_region) * std::exp(-cfg.q0_decay_rho * t), 1e-8);
        const ImageGrid edges = canny_edges(current, cfg);
        const ImageGrid c = diffusion_coefficient(q, q0, edges, cfg.c_canny);
        current = diffuse_step(current, c, cfg.time_step);
        current = histogram_match(current, image, cfg.histogram_bins);
    }
    for (float& v : current.samples()) v = std::clamp(v, 0.0f, 1.0f);
    return current.with_domain(ValueDomain::intensity);
}

} // namespace usconf
