#pragma once

// Gamma function on the positive real axis (Lanczos, g = 7, n = 9) with a
// per-(n,k) cache for the ratios used by the Borel and Laplace transforms.

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace summa {

inline double gamma_real(double x) {
    static const double g = 7.0;
    static const double coef[9] = {
        0.99999999999980993,  676.5203681218851,   -1259.1392167224028,
        771.32342877765313,   -176.61502916214059, 12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // reflection; only hit for arguments in (0, 0.5)
        return M_PI / (std::sin(M_PI * x) * gamma_real(1.0 - x));
    }
    x -= 1.0;
    double a = coef[0];
    double t = x + g + 0.5;
    for (int i = 1; i < 9; ++i) a += coef[i] / (x + i);
    return std::sqrt(2.0 * M_PI) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

inline double log_gamma_real(double x) {
    if (x <= 0.0) throw std::domain_error("log_gamma_real: nonpositive argument");
    return std::lgamma(x);
}

// Cached Gamma(1 + n/k).
inline double gamma_one_plus(int n, int k) {
    static std::map<std::pair<int, int>, double> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(n, k);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    double v = gamma_real(1.0 + static_cast<double>(n) / k);
    cache.emplace(key, v);
    return v;
}

}  // namespace summa
