#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <tuple>

#include "leakbf/channel.hpp"
#include "leakbf/config.hpp"
#include "leakbf/errors.hpp"
#include "leakbf/quadrature.hpp"
#include "leakbf/special_functions.hpp"

namespace leakbf {

/// Parameters of the interference leakage distributions for the zero-forcing
/// beamformer: V = Z G is the normalized leakage |h w|^2 and D = R V folds in
/// the chi-square channel magnitude.
struct LeakageDistributionParams {
    std::size_t n = 2; // antennas, >= 2
    unsigned b = 0;    // CDI bits

    void validate() const {
        if (n < 2) throw DomainError("leakage distribution: requires N >= 2");
    }
};

enum class CdfMethod { closed_form, quadrature };

struct CdfValue {
    double value = 0.0;
    CdfMethod method = CdfMethod::closed_form;
};

/// CDF of the squared sine of the quantization angle:
///   P_Z(z) = 1 - (1 - z^{N-1})^{2^B}.
inline double cdf_Z(double z, std::size_t n, unsigned b) {
    if (n < 2) throw DomainError("cdf_Z: requires N >= 2");
    if (!(z >= 0.0 && z <= 1.0)) throw DomainError("cdf_Z: requires z in [0,1]");
    double m = std::ldexp(1.0, static_cast<int>(b));
    return 1.0 - std::pow(1.0 - std::pow(z, static_cast<double>(n) - 1.0), m);
}

inline double pdf_Z(double z, std::size_t n, unsigned b) {
    if (n < 2) throw DomainError("pdf_Z: requires N >= 2");
    if (!(z >= 0.0 && z <= 1.0)) throw DomainError("pdf_Z: requires z in [0,1]");
    double m = std::ldexp(1.0, static_cast<int>(b));
    double nm1 = static_cast<double>(n) - 1.0;
    if (z == 0.0) return n == 2 ? m : 0.0;
    return m * nm1 * std::pow(z, nm1 - 1.0) * std::pow(1.0 - std::pow(z, nm1), m - 1.0);
}

/// CDF of G = |e w|^2 for independent isotropic unit vectors in an
/// (N-1)-dimensional space: beta(1, N-2), i.e. P_G(g) = 1 - (1-g)^{N-2}.
/// For N = 2 the nullspace is one-dimensional and G == 1 (point mass).
inline double cdf_G(double g, std::size_t n) {
    if (n < 2) throw DomainError("cdf_G: requires N >= 2");
    if (!(g >= 0.0 && g <= 1.0)) throw DomainError("cdf_G: requires g in [0,1]");
    if (n == 2) return g >= 1.0 ? 1.0 : 0.0;
    return 1.0 - std::pow(1.0 - g, static_cast<double>(n) - 2.0);
}

namespace detail {

inline double log_binomial(double a, double k) {
    return log_gamma(a + 1.0) - log_gamma(k + 1.0) - log_gamma(a - k + 1.0);
}

/// Kahan-compensated accumulator that remembers the largest term magnitude,
/// feeding the cancellation monitor.
struct MonitoredSum {
    double sum = 0.0;
    double comp = 0.0;
    double max_mag = 0.0;

    void add(double x) {
        max_mag = std::max(max_mag, std::abs(x));
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

constexpr double kCancellationRatioLimit = 1e12;
constexpr unsigned kClosedFormMaxBits = 8;

/// Direct evaluation of the Theorem-3 double sum. Returns the value and
/// whether the cancellation monitor certified it.
inline bool cdf_v_closed(double v, std::size_t n, unsigned b, double* out) {
    const double nd = static_cast<double>(n);
    const double m_count = std::ldexp(1.0, static_cast<int>(b));
    MonitoredSum acc;
    for (std::size_t nn = 0; nn + 2 <= n; ++nn) {
        double nnd = static_cast<double>(nn);
        double lc_n = log_binomial(nd - 2.0, nnd);
        for (double m = 1.0; m <= m_count; m += 1.0) {
            double diff = std::pow(v, nnd) - std::pow(v, m * (nd - 1.0));
            if (diff == 0.0) continue;
            double lg = lc_n + log_binomial(m_count, m) + std::log(m) + std::log(diff) -
                        std::log(m * nd - (m + nnd));
            double term = std::exp(lg);
            if (static_cast<long long>(nn + static_cast<std::size_t>(m)) % 2 != 0) term = -term;
            acc.add(term);
        }
    }
    double value = 1.0 + (nd - 1.0) * acc.sum;
    double denom = std::max(std::abs(acc.sum), 1e-300);
    *out = value;
    return acc.max_mag / denom <= kCancellationRatioLimit;
}

/// Semi-numeric form: P_V(v) = 1 - int (1 - v/z(u))^{N-2} du over
/// u in [P_Z(v), 1], with z(u) the closed-form inverse of P_Z. The
/// substitution equidistributes the quantization-angle mass, which keeps the
/// panel count small even for thousands of codewords.
inline double cdf_v_quadrature(double v, std::size_t n, unsigned b) {
    const double nd = static_cast<double>(n);
    const double inv_m = std::ldexp(1.0, -static_cast<int>(b));
    double u0 = cdf_Z(v, n, b);
    auto z_of_u = [&](double u) {
        return std::pow(1.0 - std::pow(1.0 - u, inv_m), 1.0 / (nd - 1.0));
    };
    double integral = integrate(
        [&](double u) {
            double z = z_of_u(u);
            if (z <= v) return 0.0;
            return std::pow(1.0 - v / z, nd - 2.0);
        },
        u0, 1.0, 1e-11);
    return 1.0 - integral;
}

/// The four brace contributions of the Theorem-2 closed form, each folded
/// with its prefactor (e^{-d}/(N-2)! or E1(d)/(N-2)!), evaluated in the log
/// domain: P_D(d) = 1 + c1 - c2 - c3 - c4.
struct Theorem2Contributions {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
    double max_term = 0.0;
    double value() const { return 1.0 + c1 - c2 - c3 - c4; }
};

inline Theorem2Contributions theorem2_contributions(double d, std::size_t n, unsigned b) {
    const double nd = static_cast<double>(n);
    const double m_count = std::ldexp(1.0, static_cast<int>(b));
    const double log_d = std::log(d);
    const double lf = log_gamma(nd - 1.0); // ln (N-2)!
    const double log_e1 = std::log(exp_integral_e1(d));

    MonitoredSum s1, s2, s3, s4;
    for (std::size_t nn = 0; nn + 2 <= n; ++nn) {
        double nnd = static_cast<double>(nn);
        double lc_n = log_binomial(nd - 2.0, nnd);

        // m = 1 slice (brace 2)
        {
            double lg = lc_n + std::log(m_count) - std::log(nd - 1.0 - nnd) +
                        (nd - 1.0) * log_d - d - lf;
            double term = std::exp(lg);
            if (nn % 2 == 0) term = -term; // (-1)^{n+1}
            s2.add(term);
        }

        for (double m = 1.0; m <= m_count; m += 1.0) {
            double lcoef = lc_n + log_binomial(m_count, m) + std::log(m) -
                           std::log(m * nd - (m + nnd));
            bool coef_neg = static_cast<long long>(nn + static_cast<std::size_t>(m)) % 2 != 0;

            // brace 1: sum_l l! C(N-1-n, l) d^{N-1-l}
            for (double l = 0.0; l <= nd - 1.0 - nnd; l += 1.0) {
                double lg = lcoef + log_gamma(l + 1.0) + log_binomial(nd - 1.0 - nnd, l) +
                            (nd - 1.0 - l) * log_d - d - lf;
                double term = std::exp(lg);
                if (coef_neg) term = -term;
                s1.add(term);
            }

            if (m < 2.0) continue;
            double i_exp = (m - 1.0) * (nd - 1.0); // exponent i in r^{-i}

            // brace 3: sum_{l=1}^{i-1} (-1)^{l-1} d^{N-1+l} / (l! C(i-1, l))
            for (double l = 1.0; l <= i_exp - 1.0; l += 1.0) {
                double lg = lcoef + (nd - 1.0 + l) * log_d - log_gamma(l + 1.0) -
                            log_binomial(i_exp - 1.0, l) - d - lf;
                double term = std::exp(lg);
                bool neg = coef_neg != (std::fmod(l - 1.0, 2.0) != 0.0);
                if (neg) term = -term;
                s3.add(term);
            }

            // brace 4: (-1)^{i-1} d^{m(N-1)} / (i-1)! times E1(d)
            {
                double lg = lcoef + m * (nd - 1.0) * log_d - log_gamma(i_exp) + log_e1 - lf;
                double term = std::exp(lg);
                bool neg = coef_neg != (std::fmod(i_exp - 1.0, 2.0) != 0.0);
                if (neg) term = -term;
                s4.add(term);
            }
        }
    }

    Theorem2Contributions out;
    out.c1 = s1.sum;
    out.c2 = s2.sum;
    out.c3 = s3.sum;
    out.c4 = s4.sum;
    out.max_term = std::max(std::max(s1.max_mag, s2.max_mag), std::max(s3.max_mag, s4.max_mag));
    return out;
}

inline double cdf_d_quadrature(double d, std::size_t n, unsigned b); // below, needs cdf_V

} // namespace detail

/// CDF of the normalized zero-forcing leakage V = Z G (Theorem-3 form).
/// Uses the closed-form alternating double sum when the cancellation monitor
/// certifies it, otherwise the semi-numeric integral of the Z/G composition.
inline CdfValue cdf_V_eval(double v, LeakageDistributionParams p) {
    p.validate();
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("cdf_V: requires v in [0,1]");
    if (v == 0.0) return {0.0, CdfMethod::closed_form};
    if (v == 1.0) return {1.0, CdfMethod::closed_form};
    if (p.n == 2) {
        // G is a point mass at 1, so V = Z exactly.
        return {cdf_Z(v, p.n, p.b), CdfMethod::closed_form};
    }
    if (p.b <= detail::kClosedFormMaxBits) {
        double value = 0.0;
        if (detail::cdf_v_closed(v, p.n, p.b, &value))
            return {std::min(1.0, std::max(0.0, value)), CdfMethod::closed_form};
    }
    return {std::min(1.0, std::max(0.0, detail::cdf_v_quadrature(v, p.n, p.b))),
            CdfMethod::quadrature};
}

inline double cdf_V(double v, LeakageDistributionParams p) { return cdf_V_eval(v, p).value; }

/// CDF of D = R V where R is the chi-square channel magnitude (Theorem-2
/// form), with the same closed-form / quadrature split as cdf_V.
inline CdfValue cdf_D_eval(double d, LeakageDistributionParams p) {
    p.validate();
    if (!(d >= 0.0)) throw DomainError("cdf_D: requires d >= 0");
    if (d == 0.0) return {0.0, CdfMethod::closed_form};
    if (p.b <= detail::kClosedFormMaxBits) {
        auto c = detail::theorem2_contributions(d, p.n, p.b);
        double value = c.value();
        double denom = std::max(std::abs(value), 1e-300);
        if (c.max_term / denom <= detail::kCancellationRatioLimit && value > -1e-9 &&
            value < 1.0 + 1e-9)
            return {std::min(1.0, std::max(0.0, value)), CdfMethod::closed_form};
    }
    return {std::min(1.0, std::max(0.0, detail::cdf_d_quadrature(d, p.n, p.b))),
            CdfMethod::quadrature};
}

inline double cdf_D(double d, LeakageDistributionParams p) { return cdf_D_eval(d, p).value; }

namespace detail {

/// P_D(d) = P_R(d) + int_d^inf P_V(d/r) p_R(r) dr (the region r <= d has
/// V <= 1 <= d/r certainly); the exponential tail is cut 80 units out.
inline double cdf_d_quadrature(double d, std::size_t n, unsigned b) {
    LeakageDistributionParams p{n, b};
    double head = chi2_cdf(d, n);
    double tail = integrate(
        [&](double r) {
            double v = d / r;
            double pv = v >= 1.0 ? 1.0 : cdf_V(v, p);
            return pv * chi2_pdf(r, n);
        },
        d, d + 80.0, 1e-11);
    return head + tail;
}

} // namespace detail

/// Bisection inversion of a nondecreasing CDF-like handle on [lo, hi].
/// Requires cdf(lo) <= target <= cdf(hi); stops when |cdf(mid) - target|
/// drops below 1e-10 or the interval collapses.
template <typename F>
double invert_cdf(F&& cdf, double target, double lo, double hi) {
    double flo = cdf(lo);
    double fhi = cdf(hi);
    if (!(target >= flo && target <= fhi))
        throw BracketError("invert_cdf: target outside bracket range");
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        double f = cdf(mid);
        if (std::abs(f - target) <= 1e-10 || (hi - lo) <= 1e-14 * std::max(1.0, std::abs(mid)))
            break;
        if (f < target)
            lo = mid;
        else
            hi = mid;
    }
    return mid;
}

/// delta-quantile of V, cached per (N, B, delta); pure and thread-safe.
inline double quantile_V(double delta, LeakageDistributionParams p) {
    p.validate();
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("quantile_V: delta in (0,1)");
    static std::mutex mu;
    static std::map<std::tuple<std::size_t, unsigned, double>, double> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find({p.n, p.b, delta});
        if (it != cache.end()) return it->second;
    }
    double q = invert_cdf([&](double v) { return cdf_V(v, p); }, delta, 0.0, 1.0);
    std::lock_guard<std::mutex> lock(mu);
    cache.insert({{p.n, p.b, delta}, q});
    return q;
}

/// delta-quantile of D; bisection bracket [0, 10 N (B+2)], doubled on demand.
inline double quantile_D(double delta, LeakageDistributionParams p) {
    p.validate();
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("quantile_D: delta in (0,1)");
    static std::mutex mu;
    static std::map<std::tuple<std::size_t, unsigned, double>, double> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find({p.n, p.b, delta});
        if (it != cache.end()) return it->second;
    }
    double hi = 10.0 * static_cast<double>(p.n) * (static_cast<double>(p.b) + 2.0);
    while (cdf_D(hi, p) < delta) hi *= 2.0;
    double q = invert_cdf([&](double d) { return cdf_D(d, p); }, delta, 0.0, hi);
    std::lock_guard<std::mutex> lock(mu);
    cache.insert({{p.n, p.b, delta}, q});
    return q;
}

/// Minimum expected leakage from one beam onto one victim at transmit power
/// P, pathloss xi^2 and CF-CMI A (the zero-forcing floor):
///   P xi^2 A eta / (N - 1).
inline double min_avg_leakage(double p_tilde, double xi_sq, double a_cmi, std::size_t n,
                              unsigned b) {
    if (n < 2) throw DomainError("min_avg_leakage: requires N >= 2");
    return p_tilde * xi_sq * a_cmi * eta(n, b) / (static_cast<double>(n) - 1.0);
}

/// Leakage cap pinned to the zero-forcing floor. With average CF-CMI this is
/// P N eta/(N-1) sum xi^2; the quantized and perfect modes substitute the
/// fed-back magnitudes.
inline double threshold_malc(double p_tilde, const QuantizedCsi& csi, std::size_t k,
                             const SystemConfig& config) {
    double e = eta(config.n_antennas, csi.cdi_bits);
    double sum = 0.0;
    for (std::size_t j = 0; j < csi.xi_sq.size(); ++j) {
        if (j == k) continue;
        sum += csi.xi_sq[j] * csi.cmi[j];
    }
    return p_tilde * e / (static_cast<double>(config.n_antennas) - 1.0) * sum;
}

/// Smallest admissible RALC percentile: the CDF value at the normalized MALC
/// point. Anything at or below it would not relax the threshold.
inline double ralc_delta_lower_endpoint(const SystemConfig& config, unsigned cdi_bits) {
    LeakageDistributionParams p{config.n_antennas, cdi_bits};
    double e = eta(config.n_antennas, cdi_bits);
    double nm1 = static_cast<double>(config.n_antennas) - 1.0;
    if (config.cmi_mode == CmiMode::average)
        return cdf_D(static_cast<double>(config.n_antennas) * e / nm1, p);
    return cdf_V(e / nm1, p);
}

/// Leakage cap relaxed to the delta-percentile of the zero-forcing leakage
/// distribution: P sum xi^2 P_D^{-1}(delta) with average CF-CMI, or
/// P sum xi^2 A_j P_V^{-1}(delta) with fed-back magnitudes.
inline double threshold_ralc(double p_tilde, const QuantizedCsi& csi, std::size_t k,
                             const SystemConfig& config) {
    LeakageDistributionParams p{config.n_antennas, csi.cdi_bits};
    double endpoint = ralc_delta_lower_endpoint(config, csi.cdi_bits);
    if (config.delta <= endpoint && !config.allow_delta_below_endpoint)
        throw ConfigError("threshold_ralc: delta " + std::to_string(config.delta) +
                          " is at or below the admissible lower endpoint " +
                          std::to_string(endpoint));
    double sum = 0.0;
    if (config.cmi_mode == CmiMode::average) {
        double q = quantile_D(config.delta, p);
        for (std::size_t j = 0; j < csi.xi_sq.size(); ++j)
            if (j != k) sum += csi.xi_sq[j] * q;
    } else {
        double q = quantile_V(config.delta, p);
        for (std::size_t j = 0; j < csi.xi_sq.size(); ++j)
            if (j != k) sum += csi.xi_sq[j] * csi.cmi[j] * q;
    }
    return p_tilde * sum;
}

} // namespace leakbf
