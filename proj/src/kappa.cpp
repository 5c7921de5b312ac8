#include "kahler/kappa.hpp"

#include <cmath>
#include <stdexcept>

namespace kahler {

double s_kappa(double kappa, double t) {
    if (kappa > 0.0) {
        const double rk = std::sqrt(kappa);
        return std::sin(rk * t) / rk;
    }
    if (kappa < 0.0) {
        const double rk = std::sqrt(-kappa);
        return std::sinh(rk * t) / rk;
    }
    return t;
}

double s_kappa_prime(double kappa, double t) {
    if (kappa > 0.0) return std::cos(std::sqrt(kappa) * t);
    if (kappa < 0.0) return std::cosh(std::sqrt(-kappa) * t);
    return 1.0;
}

double c_kappa(double kappa, double t) {
    if (kappa > 0.0) {
        const double rk = std::sqrt(kappa);
        return std::cos(rk * t) / rk;
    }
    if (kappa < 0.0) {
        const double rk = std::sqrt(-kappa);
        return std::cosh(rk * t) / rk;
    }
    return 1.0;
}

double c_kappa_prime(double kappa, double t) {
    if (kappa > 0.0) return -std::sin(std::sqrt(kappa) * t);
    if (kappa < 0.0) return std::sinh(std::sqrt(-kappa) * t);
    return 0.0;
}

double cot_kappa(double kappa, double t) {
    if (!(t > 0.0)) throw std::domain_error("cot_kappa: t must be positive");
    // pole proximity is measured on the normalized oscillatory factor, since
    // the scaled s_kappa never reaches an exact floating-point zero
    if (kappa > 0.0 && std::abs(std::sin(std::sqrt(kappa) * t)) < 1e-12)
        throw std::domain_error("cot_kappa: evaluation at a zero of s_kappa");
    return s_kappa_prime(kappa, t) / s_kappa(kappa, t);
}

double tan_kappa(double kappa, double t) {
    if (kappa > 0.0 && std::abs(std::cos(std::sqrt(kappa) * t)) < 1e-12)
        throw std::domain_error("tan_kappa: evaluation at a zero of c_kappa");
    return c_kappa_prime(kappa, t) / c_kappa(kappa, t);
}

} // namespace kahler
