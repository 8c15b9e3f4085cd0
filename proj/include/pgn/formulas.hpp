#pragma once

#include "rational.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace pgn {

inline const double tau0_sing12 = (3.0 * std::sqrt(2.0) - 2.0) / 14.0;
inline const Scalar tau1_sing12 = rat(1, 8);

inline void check_mn(int m, int n) {
    if (m < 1 || n < 1) throw std::domain_error("m and n must be positive");
}

// tau = (1/n)(omega - n/m)/(omega + 1)
inline double dani_tau(double omega, int m, int n) {
    check_mn(m, n);
    double lo = double(n) / double(m);
    if (std::isnan(omega) || omega < lo - 1e-15) throw std::domain_error("omega below n/m");
    if (std::isinf(omega)) return 1.0 / n;
    return (omega - lo) / (n * (omega + 1.0));
}

inline Scalar dani_tau(const Scalar& omega, int m, int n) {
    check_mn(m, n);
    if (omega < rat(n, m)) throw std::domain_error("omega below n/m");
    return (omega - rat(n, m)) / (Scalar(n) * (omega + 1));
}

inline double dani_omega(double tau, int m, int n) {
    check_mn(m, n);
    double top = 1.0 / n;
    if (std::isnan(tau) || tau < 0 || tau > top + 1e-15) throw std::domain_error("tau outside [0, 1/n]");
    if (tau >= top) return std::numeric_limits<double>::infinity();
    return (n * tau + double(n) / m) / (1.0 - n * tau);
}

inline Scalar dani_omega(const Scalar& tau, int m, int n) {
    check_mn(m, n);
    if (tau < 0 || tau >= rat(1, n)) throw std::domain_error("tau outside [0, 1/n) for a finite omega");
    return (Scalar(n) * tau + rat(n, m)) / (1 - Scalar(n) * tau);
}

inline Scalar delta_mn(int m, int n) {
    check_mn(m, n);
    return Scalar(m * n) * (1 - rat(1, m + n));
}

inline void check_tau12(double tau) {
    if (std::isnan(tau) || tau < 0 || tau > 0.5) throw std::domain_error("tau outside [0, 1/2]");
}

inline double hd_sing12(double tau) {
    check_tau12(tau);
    if (tau <= tau0_sing12) {
        double r = tau - 6 * tau * tau * tau + 4 * tau * tau * tau * tau;
        return 4.0 / 3.0 - (4.0 / 3.0) * std::sqrt(std::max(r, 0.0)) - 2 * tau + (8.0 / 3.0) * tau * tau;
    }
    return (1 - 2 * tau) / (1 + tau);
}

inline double pd_sing12(double tau) {
    check_tau12(tau);
    if (tau <= 0.125) return (4 - 8 * tau) / 3;
    return 1.0;
}

// both branches, for continuity checks
inline double hd_sing12_radical(double tau) {
    double r = tau - 6 * tau * tau * tau + 4 * tau * tau * tau * tau;
    return 4.0 / 3.0 - (4.0 / 3.0) * std::sqrt(std::max(r, 0.0)) - 2 * tau + (8.0 / 3.0) * tau * tau;
}
inline double hd_sing12_rational(double tau) { return (1 - 2 * tau) / (1 + tau); }

inline double jarnik_transfer(double omega) {
    if (std::isnan(omega) || omega < 2) throw std::domain_error("omega below 2");
    if (std::isinf(omega)) return 1.0;
    return 1 - 1 / omega;
}

inline Scalar jarnik_transfer(const Scalar& omega) {
    if (omega < 2) throw std::domain_error("omega below 2");
    return 1 - 1 / omega;
}

inline double tau_transfer(double tau) {
    if (std::isnan(tau) || tau < 0 || tau > 0.5) throw std::domain_error("tau outside [0, 1/2]");
    return tau / (1 + 2 * tau);
}

inline Scalar tau_transfer(const Scalar& tau) {
    if (tau < 0 || tau > rat(1, 2)) throw std::domain_error("tau outside [0, 1/2]");
    return tau / (1 + 2 * tau);
}

inline Scalar f_mn_k(int m, int n, int k) {
    check_mn(m, n);
    int d = m + n;
    if (k < 1 || k > d - 1) throw std::out_of_range("k must lie in [1, m+n-1]");
    Scalar kk(k), D(d), mn(m * n);
    return mn - (kk * mn / D) * (1 - kk / D) - frac(kk * m / D) * frac(kk * n / D);
}

inline Scalar schmidt_dim(int m, int n, int k) {
    check_mn(m, n);
    if (k < 2 || k > m + n - 1) throw std::out_of_range("k must lie in [2, m+n-1]");
    Scalar a = f_mn_k(m, n, k), b = f_mn_k(m, n, k - 1);
    return a > b ? a : b;
}

inline Scalar singular_on_average_dim(const Scalar& p, int m, int n) {
    check_mn(m, n);
    if (p < 0 || p > 1) throw std::domain_error("p outside [0,1]");
    return p * delta_mn(m, n) + (1 - p) * Scalar(m * n);
}

struct PackingConstants {
    std::optional<Scalar> pd_large_omega;   // n >= 2
    std::optional<Scalar> pd_near_one;      // n = 1, m >= 2
    std::optional<Scalar> hd_star_infinity; // n >= 2
    std::optional<Scalar> pd_star_infinity; // n >= 2
    std::optional<Scalar> hd_star_one;      // n = 1, m >= 2
    std::optional<Scalar> pd_star_one;      // n = 1, m >= 2
};

inline PackingConstants exact_packing_constants(int m, int n) {
    check_mn(m, n);
    if (m == 1 && n == 1) throw std::domain_error("(1,1) has no packing constants");
    PackingConstants c;
    if (n >= 2) {
        c.pd_large_omega = Scalar(m * n - m);
        c.hd_star_infinity = Scalar(m * n - 2 * m);
        c.pd_star_infinity = Scalar(m * n - m);
    } else {
        c.pd_near_one = Scalar(1);
        c.hd_star_one = Scalar(0);
        c.pd_star_one = Scalar(1);
    }
    return c;
}

} // namespace pgn
