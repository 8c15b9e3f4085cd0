#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pgn {

namespace mp = boost::multiprecision;

using Integer = mp::number<mp::cpp_int_backend<>, mp::et_off>;
using Scalar = mp::number<mp::rational_adaptor<mp::cpp_int_backend<>>, mp::et_off>;
using Vec = std::vector<Scalar>;

struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Scalar rat(long long p, long long q = 1) {
    if (q == 0) throw std::domain_error("zero denominator");
    return Scalar(Integer(p), Integer(q));
}

inline Integer num(const Scalar& x) { return mp::numerator(x); }
inline Integer den(const Scalar& x) { return mp::denominator(x); }

inline Integer floor_int(const Scalar& x) {
    Integer q = num(x) / den(x);
    if (num(x) < 0 && q * den(x) != num(x)) q -= 1;
    return q;
}

inline Scalar frac(const Scalar& x) { return x - Scalar(floor_int(x)); }

inline Scalar abs(const Scalar& x) { return x < 0 ? -x : x; }

inline double to_double(const Scalar& x) { return x.convert_to<double>(); }

// "p/q", "p", or a plain decimal like "-0.125"
inline Scalar parse_scalar(const std::string& s) {
    if (s.empty()) throw parse_error("empty rational");
    auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            Integer p(s.substr(0, slash)), q(s.substr(slash + 1));
            if (q == 0) throw parse_error("zero denominator in '" + s + "'");
            return Scalar(p, q);
        }
        auto dot = s.find('.');
        if (dot == std::string::npos) return Scalar(Integer(s));
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        if (digits == "-" || digits == "+" || digits.empty()) throw parse_error("bad rational '" + s + "'");
        Integer q = mp::pow(Integer(10), static_cast<unsigned>(s.size() - dot - 1));
        return Scalar(Integer(digits), q);
    } catch (const parse_error&) {
        throw;
    } catch (const std::exception&) {
        throw parse_error("bad rational '" + s + "'");
    }
}

inline std::string to_string(const Scalar& x) {
    if (den(x) == 1) return num(x).str();
    return num(x).str() + "/" + den(x).str();
}

// nearest p/q with q = 2^bits
inline Scalar snap(double x, int bits = 20) {
    if (!std::isfinite(x)) throw std::domain_error("cannot snap non-finite value");
    double scale = std::ldexp(1.0, bits);
    return Scalar(Integer(static_cast<long long>(std::llround(x * scale))), Integer(1) << bits);
}

// best approximation with denominator <= qmax (continued fractions)
inline Scalar nearest_rational(double x, long long qmax) {
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double r = x;
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(r);
        long long ai = static_cast<long long>(a);
        long long q2 = ai * q1 + q0;
        if (q2 > qmax) {
            long long k = (qmax - q0) / q1;
            long long pk = k * p1 + p0, qk = k * q1 + q0;
            double e1 = std::abs(x - double(p1) / double(q1));
            double ek = std::abs(x - double(pk) / double(qk));
            return ek < e1 ? rat(pk, qk) : rat(p1, q1);
        }
        long long p2 = ai * p1 + p0;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        if (r - a < 1e-18) break;
        r = 1.0 / (r - a);
    }
    return rat(p1, q1);
}

inline Vec zeros(std::size_t d) { return Vec(d, Scalar(0)); }

inline Vec operator+(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec operator-(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec operator*(const Scalar& s, const Vec& a) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
    return r;
}

inline std::vector<std::string> to_strings(const Vec& v) {
    std::vector<std::string> r;
    r.reserve(v.size());
    for (auto& x : v) r.push_back(to_string(x));
    return r;
}

} // namespace pgn
