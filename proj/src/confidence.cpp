#include "usconf/confidence.hpp"
#include "usconf/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace usconf {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

} // namespace

StencilWeights make_stencil(int kappa, double sigma) {
    if (kappa < 0) throw std::invalid_argument("make_stencil: kappa must be >= 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("make_stencil: sigma must be > 0");

    StencilWeights st;
    st.kappa = kappa;
    st.weights.assign(static_cast<size_t>(2 * kappa + 1), 0.0);
    if (kappa == 0) {
        st.weights[0] = 1.0; // single tap carries all the mass
        return st;
    }
    double inner_sum = 0.0;
    for (int k = -(kappa - 1); k <= kappa - 1; ++k) {
        const double w = normal_cdf((k + 0.5) / sigma) - normal_cdf((k - 0.5) / sigma);
        st.weights[static_cast<size_t>(k + kappa)] = w;
        inner_sum += w;
    }
    const double tail = std::max(0.0, (1.0 - inner_sum) / 2.0);
    st.weights.front() = tail;
    st.weights.back() = tail;
    // mirror so symmetry holds bitwise
    for (int k = 1; k <= kappa; ++k)
        st.weights[static_cast<size_t>(kappa - k)] = st.weights[static_cast<size_t>(kappa + k)];
    if (tail > st.at(0))
        throw std::invalid_argument("make_stencil: sigma too large for kappa (folded tail "
                                    "outweighs the central tap)");
    return st;
}

RelativeGradientField relative_gradient(const ImageGrid& image, int kappa,
                                        const ProbMask* exclude, double eps) {
    const int h = image.height();
    const int a = image.width();
    if (2 * kappa + 1 > a)
        throw std::invalid_argument("relative_gradient: stencil wider than image");
    if (exclude) exclude->validate_against(image);

    RelativeGradientField g(h - 1, a, kappa);
    std::vector<double> absdiff(static_cast<size_t>(a));

    for (int s = 0; s < h - 1; ++s) {
        for (int d = -kappa; d <= kappa; ++d) {
            const int j_lo = std::max(0, -d);
            const int j_hi = std::min(a, a - d); // j and j+d both in [0, a)

            double sum = 0.0;
            int count = 0;
            for (int j = j_lo; j < j_hi; ++j) {
                const double diff =
                    std::abs(static_cast<double>(image.at(s + 1, j + d)) - image.at(s, j));
                absdiff[static_cast<size_t>(j)] = diff;
                if (exclude) {
                    // terms touching a reverb pixel at either endpoint are
                    // excluded from the mean
                    if (exclude->reverb.at(s, j) > 0.5f || exclude->reverb.at(s + 1, j + d) > 0.5f)
                        continue;
                }
                sum += diff;
                ++count;
            }
            const double mean = count > 0 ? sum / count : 0.0;
            if (mean < eps) {
                for (int j = 0; j < a; ++j) g.at(s, j, d) = 1.0;
            } else {
                for (int j = j_lo; j < j_hi; ++j)
                    g.at(s, j, d) = absdiff[static_cast<size_t>(j)] / mean;
            }
        }
    }
    return g;
}

double depth_factor(double alpha, int source_row, int height) {
    // 1-based source row i = source_row + 1; factor exp(-alpha*(i+1)/h).
    return std::exp(-alpha * static_cast<double>(source_row + 2) / height);
}

RelativeGradientField beer_lambert_adjust(const RelativeGradientField& g, double alpha,
                                          double beta, int height) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("beer_lambert_adjust: alpha and beta must be > 0");
    RelativeGradientField out = g;
    const int taps = 2 * g.kappa + 1;
    const bool unit_beta = beta == 1.0;
    for (int s = 0; s < g.rows; ++s) {
        const double depth = depth_factor(alpha, s, height);
        double* row = &out.values[static_cast<size_t>(s) * g.cols * taps];
        const size_t n = static_cast<size_t>(g.cols) * taps;
        for (size_t t = 0; t < n; ++t) {
            const double v = row[t];
            row[t] = (unit_beta ? v : std::pow(v, beta)) * depth;
        }
    }
    return out;
}

double gamma_coefficient(double alpha, int height, double xi, CalibrationSign sign) {
    if (!(xi > 0.0 && xi < 1.0)) throw std::invalid_argument("gamma_coefficient: xi must be in (0,1)");
    if (height < 2) throw std::invalid_argument("gamma_coefficient: height must be >= 2");
    double denom = 0.0;
    if (sign == CalibrationSign::as_printed) {
        for (int i = 1; i <= height; ++i)
            denom += std::exp(alpha * static_cast<double>(i) / height);
    } else {
        // sum of exactly the depth factors the propagation applies, so the
        // homogeneous-image bottom row lands on xi
        for (int s = 0; s < height - 1; ++s) denom += depth_factor(alpha, s, height);
    }
    return -std::log(xi) / denom;
}

double edge_weight(double g_adjusted, double gamma) {
    return std::exp(-gamma * g_adjusted);
}

RelativeGradientField build_weight_field(const ImageGrid& image, const ConfidenceConfig& cfg,
                                         const ProbMask* mask) {
    cfg.validate();
    RelativeGradientField g = relative_gradient(image, cfg.kappa, mask, cfg.epsilon_mean);
    if (mask) {
        const NeedleEdgeMap edges = needle_edge_map(*mask);
        g = override_gradients(g, image, *mask, edges);
    }
    g = beer_lambert_adjust(g, cfg.alpha, cfg.beta, image.height());
    const double gamma = gamma_coefficient(cfg.alpha, image.height(), cfg.xi, cfg.calibration_sign);
    for (double& v : g.values) v = edge_weight(v, gamma);
    return g;
}

std::vector<double> propagate_rows(const ImageGrid& image, const ConfidenceConfig& cfg,
                                   const ProbMask* mask, std::span<const double> first_row,
                                   std::span<const double> row_ceiling) {
    const int h = image.height();
    const int a = image.width();
    if (static_cast<int>(first_row.size()) != a)
        throw std::invalid_argument("propagate_rows: first row width mismatch");
    if (!row_ceiling.empty() && static_cast<int>(row_ceiling.size()) != h)
        throw std::invalid_argument("propagate_rows: row ceiling height mismatch");

    const StencilWeights psi = make_stencil(cfg.kappa, cfg.sigma);
    const RelativeGradientField w = build_weight_field(image, cfg, mask);

    std::vector<double> map(static_cast<size_t>(h) * a);
    std::copy(first_row.begin(), first_row.end(), map.begin());
    if (!row_ceiling.empty())
        for (int j = 0; j < a; ++j)
            map[static_cast<size_t>(j)] = std::min(map[static_cast<size_t>(j)], row_ceiling[0]);

    for (int r = 1; r < h; ++r) {
        const int s = r - 1;
        const double* above = &map[static_cast<size_t>(s) * a];
        double* current = &map[static_cast<size_t>(r) * a];
        for (int j = 0; j < a; ++j) {
            double acc = 0.0;
            double psi_sum = 0.0;
            double tap_max = -HUGE_VAL; // k = 0 is always a valid tap
            for (int k = -cfg.kappa; k <= cfg.kappa; ++k) {
                const int src = j + k;
                if (src < 0 || src >= a) continue; // dropped tap
                const double p = psi.at(k);
                psi_sum += p;
                // edge (s, src) -> (r, j): direction j - src = -k
                acc += p * w.at(s, src, -k) * above[src];
                tap_max = std::max(tap_max, above[src]);
            }
            double c = acc / psi_sum;
            // the weighted mean of taps scaled by w <= 1 cannot exceed the
            // largest tap; trim the float-rounding excess so the bound is exact
            c = std::min(c, tap_max);
            if (!row_ceiling.empty()) c = std::min(c, row_ceiling[r]);
            current[j] = c;
        }
    }
    return map;
}

ImageGrid propagate(const ImageGrid& image, const ConfidenceConfig& cfg, const ProbMask* mask) {
    image.validate();
    const std::vector<double> ones(static_cast<size_t>(image.width()), 1.0);
    const std::vector<double> map = propagate_rows(image, cfg, mask, ones);
    std::vector<float> samples(map.size());
    for (size_t i = 0; i < map.size(); ++i) samples[i] = static_cast<float>(map[i]);
    return ImageGrid(image.height(), image.width(), ValueDomain::confidence, std::move(samples));
}

} // namespace usconf
