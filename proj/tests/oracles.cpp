#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracles {

namespace {

double normal_pdf(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI); }

double simpson(double a, double b) {
    const double m = 0.5 * (a + b);
    return (b - a) / 6.0 * (normal_pdf(a) + 4.0 * normal_pdf(m) + normal_pdf(b));
}

double adaptive(double a, double b, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = simpson(a, m);
    const double right = simpson(m, b);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive(a, m, left, tol / 2.0, depth - 1) + adaptive(m, b, right, tol / 2.0, depth - 1);
}

} // namespace

double normal_cdf(double x) {
    if (x < -12.0) return 0.0;
    if (x > 12.0) return 1.0;
    const double integral = x >= 0.0 ? adaptive(0.0, x, simpson(0.0, x), 1e-14, 40)
                                     : -adaptive(x, 0.0, simpson(x, 0.0), 1e-14, 40);
    return 0.5 + integral;
}

std::vector<double> stencil(int kappa, double sigma) {
    std::vector<double> psi(static_cast<size_t>(2 * kappa + 1), 0.0);
    if (kappa == 0) {
        psi[0] = 1.0;
        return psi;
    }
    double inner = 0.0;
    for (int k = -kappa + 1; k <= kappa - 1; ++k) {
        psi[static_cast<size_t>(k + kappa)] =
            normal_cdf((k + 0.5) / sigma) - normal_cdf((k - 0.5) / sigma);
        inner += psi[static_cast<size_t>(k + kappa)];
    }
    psi[0] = (1.0 - inner) / 2.0;
    psi[static_cast<size_t>(2 * kappa)] = (1.0 - inner) / 2.0;
    return psi;
}

std::vector<double> relative_gradient(const usconf::ImageGrid& image, int kappa, double eps) {
    const int h = image.height();
    const int a = image.width();
    const int taps = 2 * kappa + 1;
    std::vector<double> g(static_cast<size_t>(h - 1) * a * taps, 0.0);
    auto idx = [&](int s, int j, int d) {
        return (static_cast<size_t>(s) * a + j) * taps + (d + kappa);
    };
    for (int s = 0; s < h - 1; ++s) {
        for (int d = -kappa; d <= kappa; ++d) {
            double sum = 0.0;
            int count = 0;
            for (int k = 0; k < a; ++k) {
                if (k + d < 0 || k + d >= a) continue;
                sum += std::abs(static_cast<double>(image.at(s + 1, k + d)) - image.at(s, k));
                ++count;
            }
            const double mean = count > 0 ? sum / count : 0.0;
            if (mean < eps) {
                for (int j = 0; j < a; ++j) g[idx(s, j, d)] = 1.0;
            } else {
                for (int j = 0; j < a; ++j) {
                    if (j + d < 0 || j + d >= a) continue;
                    g[idx(s, j, d)] =
                        std::abs(static_cast<double>(image.at(s + 1, j + d)) - image.at(s, j)) / mean;
                }
            }
        }
    }
    return g;
}

std::vector<double> beer_lambert(const std::vector<double>& g, int rows, int cols, int kappa,
                                 double alpha, double beta, int height) {
    const int taps = 2 * kappa + 1;
    std::vector<double> out(g.size(), 0.0);
    for (int s = 0; s < rows; ++s) {
        const int i = s + 1; // 1-based source row
        const double factor = std::exp(-alpha * static_cast<double>(i + 1) / height);
        for (int j = 0; j < cols; ++j)
            for (int t = 0; t < taps; ++t) {
                const size_t k = (static_cast<size_t>(s) * cols + j) * taps + t;
                out[k] = std::pow(g[k], beta) * factor;
            }
    }
    return out;
}

double gamma_coefficient(double alpha, int height, double xi, usconf::CalibrationSign sign) {
    double denom = 0.0;
    if (sign == usconf::CalibrationSign::as_printed) {
        for (int i = 1; i <= height; ++i) denom += std::exp(alpha * static_cast<double>(i) / height);
    } else {
        for (int s = 0; s < height - 1; ++s) {
            const int i = s + 1;
            denom += std::exp(-alpha * static_cast<double>(i + 1) / height);
        }
    }
    return -std::log(xi) / denom;
}

std::vector<double> propagate(const usconf::ImageGrid& image, const usconf::ConfidenceConfig& cfg) {
    const int h = image.height();
    const int a = image.width();
    const int taps = 2 * cfg.kappa + 1;
    const std::vector<double> psi = stencil(cfg.kappa, cfg.sigma);
    std::vector<double> g = relative_gradient(image, cfg.kappa, cfg.epsilon_mean);
    g = beer_lambert(g, h - 1, a, cfg.kappa, cfg.alpha, cfg.beta, h);
    const double gamma = gamma_coefficient(cfg.alpha, h, cfg.xi, cfg.calibration_sign);
    std::vector<double> w(g.size());
    for (size_t i = 0; i < g.size(); ++i) w[i] = std::exp(-gamma * g[i]);

    auto widx = [&](int s, int j, int d) {
        return (static_cast<size_t>(s) * a + j) * taps + (d + cfg.kappa);
    };
    std::vector<double> c(static_cast<size_t>(h) * a, 0.0);
    for (int j = 0; j < a; ++j) c[static_cast<size_t>(j)] = 1.0;
    for (int r = 1; r < h; ++r) {
        for (int j = 0; j < a; ++j) {
            double num = 0.0;
            double den = 0.0;
            for (int k = -cfg.kappa; k <= cfg.kappa; ++k) {
                if (j + k < 0 || j + k >= a) continue;
                const double p = psi[static_cast<size_t>(k + cfg.kappa)];
                // the edge from (r-1, j+k) into (r, j) runs in direction -k
                num += p * w[widx(r - 1, j + k, -k)] * c[static_cast<size_t>(r - 1) * a + (j + k)];
                den += p;
            }
            c[static_cast<size_t>(r) * a + j] = num / den;
        }
    }
    return c;
}

double homogeneous_bottom(double alpha, int height, double xi, usconf::CalibrationSign sign) {
    const double gamma = gamma_coefficient(alpha, height, xi, sign);
    double exponent_sum = 0.0;
    for (int s = 0; s < height - 1; ++s) {
        const int i = s + 1;
        exponent_sum += std::exp(-alpha * static_cast<double>(i + 1) / height);
    }
    return std::exp(-gamma * exponent_sum);
}

std::vector<double> icov(const usconf::ImageGrid& image) {
    const int h = image.height();
    const int a = image.width();
    auto pix = [&](int i, int j) {
        i = std::max(0, std::min(h - 1, i));
        j = std::max(0, std::min(a - 1, j));
        return std::max(static_cast<double>(image.at(i, j)), 1.0 / 255.0);
    };
    std::vector<double> q(static_cast<size_t>(h) * a, 0.0);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < a; ++j) {
            const double I = pix(i, j);
            const double gx = (pix(i, j + 1) - pix(i, j - 1)) / 2.0;
            const double gy = (pix(i + 1, j) - pix(i - 1, j)) / 2.0;
            const double grad_mag_sq = gx * gx + gy * gy;
            const double lap = pix(i + 1, j) + pix(i - 1, j) + pix(i, j + 1) + pix(i, j - 1) - 4.0 * I;
            const double num = 0.5 * (grad_mag_sq / (I * I)) - (1.0 / 16.0) * (lap / I) * (lap / I);
            double den = 1.0 + 0.25 * (lap / I);
            den = den * den;
            if (den < 1e-12) den = 1e-12;
            double radicand = num / den;
            if (radicand < 0.0) radicand = 0.0;
            q[static_cast<size_t>(i) * a + j] = std::sqrt(radicand);
        }
    }
    return q;
}

} // namespace oracles
