#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "leakbf/errors.hpp"

namespace leakbf {

/// How the base station obtains channel-fading magnitude information.
enum class CmiMode { average, quantized, perfect };

inline std::string to_string(CmiMode m) {
    switch (m) {
        case CmiMode::average: return "average";
        case CmiMode::quantized: return "quantized";
        case CmiMode::perfect: return "perfect";
    }
    return "?";
}

inline CmiMode cmi_mode_from_string(const std::string& s) {
    if (s == "average") return CmiMode::average;
    if (s == "quantized") return CmiMode::quantized;
    if (s == "perfect") return CmiMode::perfect;
    throw ConfigError("unknown cmi mode '" + s + "' (expected average|quantized|perfect)");
}

/// Full scenario description for one simulated operating point.
struct SystemConfig {
    std::size_t n_antennas = 4;              // N
    std::size_t n_ues = 4;                   // K
    unsigned cdi_bits = 6;                   // B
    unsigned cmi_bits = 0;                   // M (quantized CF-CMI only)
    CmiMode cmi_mode = CmiMode::average;
    std::vector<double> alpha;               // K rate weights
    std::vector<double> xi;                  // K large-scale amplitudes
    std::vector<double> antenna_power;       // N per-antenna budgets, linear
    double noise_power = 1.0;                // N0
    double delta = 0.8;                      // RALC percentile
    std::size_t l_rand = 1000;               // randomization draws
    double epsilon = 0.01;                   // GP stop threshold
    std::size_t l_algo1 = 3;                 // outer iterations
    std::uint64_t seed = 1;

    // scheme knobs
    double plc_gamma = 0.9;
    double plc_p = 0.05;
    bool fixed_codebook = false;             // reuse trial-0 codebooks (unit tests)
    bool perfect_cdi = false;                // bypass CDI quantization entirely
    bool allow_delta_below_endpoint = false; // demote the RALC delta check to a warning

    double total_power() const {
        double p = 0.0;
        for (double x : antenna_power) p += x;
        return p;
    }

    void validate() const {
        if (n_ues < 1 || n_antennas < n_ues)
            throw ConfigError("config: requires N >= K >= 1");
        if (alpha.size() != n_ues || xi.size() != n_ues)
            throw ConfigError("config: alpha and xi must have K entries");
        if (antenna_power.size() != n_antennas)
            throw ConfigError("config: antenna_power must have N entries");
        for (double a : alpha)
            if (!(a > 0.0)) throw ConfigError("config: weights must be positive");
        for (double x : xi)
            if (!(x > 0.0)) throw ConfigError("config: xi must be positive");
        for (double p : antenna_power)
            if (!(p > 0.0)) throw ConfigError("config: antenna powers must be positive");
        if (!(noise_power > 0.0)) throw ConfigError("config: noise power must be positive");
        if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("config: delta must be in (0,1)");
        if (!(epsilon > 0.0)) throw ConfigError("config: epsilon must be positive");
        if (cmi_mode == CmiMode::quantized && cmi_bits < 1)
            throw ConfigError("config: quantized CF-CMI requires at least 1 bit");
    }

    /// Simulation defaults: (N,K) = (4,4), weights [3/2, 3/2, 1, 1], unit
    /// pathloss, equal per-antenna budgets P/N with P = N0 * 10^(SNR/10).
    static SystemConfig defaults(double snr_db = 20.0) {
        SystemConfig c;
        c.alpha = {1.5, 1.5, 1.0, 1.0};
        c.xi = {1.0, 1.0, 1.0, 1.0};
        c.set_snr_db(snr_db);
        return c;
    }

    /// Reassign equal per-antenna budgets from a total SNR = P / N0.
    void set_snr_db(double snr_db) {
        double p = noise_power * std::pow(10.0, snr_db / 10.0);
        antenna_power.assign(n_antennas, p / static_cast<double>(n_antennas));
    }
};

} // namespace leakbf
