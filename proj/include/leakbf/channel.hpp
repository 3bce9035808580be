#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "leakbf/config.hpp"
#include "leakbf/errors.hpp"
#include "leakbf/linalg.hpp"
#include "leakbf/rng.hpp"
#include "leakbf/special_functions.hpp"

namespace leakbf {

/// One trial's ground truth: small-scale channel rows h_k (unit-variance
/// i.i.d. complex Gaussian entries) plus the large-scale amplitudes.
struct ChannelRealization {
    CMat h;                  // K x N, row k = h_k
    std::vector<double> xi;  // K amplitudes
};

inline ChannelRealization generate_channel(const SystemConfig& config, std::uint64_t trial) {
    config.validate();
    ChannelRealization ch;
    ch.h = CMat(config.n_ues, config.n_antennas);
    ch.xi = config.xi;
    for (std::size_t k = 0; k < config.n_ues; ++k) {
        auto rng = StreamRng::keyed(config.seed, trial, k, RngPurpose::channel);
        for (std::size_t n = 0; n < config.n_antennas; ++n) ch.h(k, n) = rng.complex_gaussian();
    }
    return ch;
}

/// Random vector quantization codebook: 2^B isotropic unit-norm rows.
struct RvqCodebook {
    std::vector<CVec> codewords;
};

inline RvqCodebook make_rvq_codebook(std::size_t n, unsigned bits, StreamRng& rng) {
    if (n < 1) throw InvalidInputError("make_rvq_codebook: dimension must be positive");
    RvqCodebook cb;
    cb.codewords.resize(std::size_t{1} << bits);
    for (auto& c : cb.codewords) c = normalized(rng.complex_gaussian_vector(n));
    return cb;
}

struct CdiQuantization {
    std::size_t index = 0;
    CVec h_hat;       // selected codeword, phase-rotated so h_tilde h_hat^H >= 0
    double fidelity = 0.0; // |c h_tilde^H| of the winner
};

/// Select the codeword maximizing |c h_tilde^H|; ties break to the lowest
/// index. The returned codeword is rotated by e^{-j arg(h_hat h_tilde^H)} so
/// that the direction decomposition below has a real nonnegative cosine.
inline CdiQuantization quantize_cdi(const CVec& h_k, const RvqCodebook& codebook) {
    double nrm = norm(h_k);
    if (!(nrm > 0.0)) throw InvalidInputError("quantize_cdi: zero channel vector");
    CVec h_tilde = scaled(h_k, cplx{1.0 / nrm, 0.0});

    CdiQuantization q;
    cplx best_inner{0.0, 0.0};
    double best = -1.0;
    for (std::size_t i = 0; i < codebook.codewords.size(); ++i) {
        cplx inner = inner_conj(codebook.codewords[i], h_tilde); // c h_tilde^H
        double mag = std::abs(inner);
        if (mag > best) {
            best = mag;
            best_inner = inner;
            q.index = i;
        }
    }
    q.fidelity = best;
    // h_hat h_tilde^H = best_inner; rotate so the inner product becomes |.|
    cplx rot = best > 0.0 ? std::conj(best_inner) / best : cplx{1.0, 0.0};
    q.h_hat = scaled(codebook.codewords[q.index], rot);
    return q;
}

struct DirectionDecomposition {
    double cos_theta = 0.0;
    double sin_theta = 0.0;
    CVec error_vector;        // unit norm, orthogonal to h_hat
    bool error_defined = true; // false when h_tilde is parallel to h_hat
};

/// Split a unit direction into its component along h_hat and a unit error
/// vector orthogonal to it. Assumes the quantizer's phase convention, i.e.
/// h_tilde h_hat^H is real nonnegative up to roundoff.
inline DirectionDecomposition decompose_direction(const CVec& h_tilde, const CVec& h_hat) {
    DirectionDecomposition d;
    cplx c = inner_conj(h_tilde, h_hat); // h_tilde h_hat^H
    d.cos_theta = std::abs(c);
    CVec resid(h_tilde.size());
    for (std::size_t i = 0; i < h_tilde.size(); ++i) resid[i] = h_tilde[i] - c * h_hat[i];
    double s = norm(resid);
    d.sin_theta = s;
    if (s < 1e-12) {
        d.sin_theta = 0.0;
        d.error_defined = false;
        d.error_vector.assign(h_tilde.size(), cplx{0.0, 0.0});
        return d;
    }
    d.error_vector = scaled(resid, cplx{1.0 / s, 0.0});
    return d;
}

/// Midpoint codebook quantization of ||h_k||^2: candidate levels are
/// T_i = P_R^{-1}((2i+1)/2^{M+1}); returns the nearest level (ties toward the
/// smaller one).
inline double quantize_cf_cmi(double norm_sq, unsigned m_bits, std::size_t n) {
    if (m_bits < 1) throw InvalidInputError("quantize_cf_cmi: requires M >= 1");
    if (!(norm_sq >= 0.0)) throw InvalidInputError("quantize_cf_cmi: requires norm_sq >= 0");
    const std::size_t levels = std::size_t{1} << m_bits;
    double best = 0.0;
    double best_dist = -1.0;
    for (std::size_t i = 0; i < levels; ++i) {
        double p = (2.0 * static_cast<double>(i) + 1.0) /
                   static_cast<double>(std::size_t{2} << m_bits);
        double t = chi2_cdf_inverse(p, n);
        double dist = std::abs(norm_sq - t);
        if (best_dist < 0.0 || dist < best_dist) {
            best_dist = dist;
            best = t;
        }
    }
    return best;
}

/// Mean squared sine of the quantization angle:
///   eta = 2^B beta(2^B, N/(N-1)).
inline double eta(std::size_t n, unsigned b) {
    if (n < 2) throw DomainError("eta: requires N >= 2");
    double m = std::ldexp(1.0, static_cast<int>(b)); // 2^B
    return m * beta_fn(m, static_cast<double>(n) / (static_cast<double>(n) - 1.0));
}

/// Draw an isotropic unit vector in the nullspace of the unit row h_hat.
inline CVec sample_nullspace_direction(const CVec& h_hat, StreamRng& rng) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        CVec g = rng.complex_gaussian_vector(h_hat.size());
        cplx c = inner_conj(g, h_hat);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] -= c * h_hat[i];
        double nn = norm(g);
        if (nn > 1e-9) return scaled(g, cplx{1.0 / nn, 0.0});
    }
    throw SolverNumericError("sample_nullspace_direction: projection kept collapsing");
}

/// Sample the base station's model of the true channel direction around the
/// fed-back codeword: h = sqrt(1-Z) h_hat + sqrt(Z) e with Z drawn by the
/// closed-form inverse of P_Z(z) = 1 - (1 - z^{N-1})^{2^B} and e isotropic in
/// the nullspace of h_hat.
inline CVec sample_true_direction(const CVec& h_hat, unsigned b, StreamRng& rng) {
    const std::size_t n = h_hat.size();
    if (n < 2) throw DomainError("sample_true_direction: requires N >= 2");
    double u = rng.uniform();
    double z = std::pow(1.0 - std::pow(1.0 - u, std::ldexp(1.0, -static_cast<int>(b))),
                        1.0 / (static_cast<double>(n) - 1.0));
    CVec e = sample_nullspace_direction(h_hat, rng);
    CVec h(n);
    double a = std::sqrt(1.0 - z), s = std::sqrt(z);
    for (std::size_t i = 0; i < n; ++i) h[i] = a * h_hat[i] + s * e[i];
    return h;
}

/// Everything the base station knows for one trial.
struct QuantizedCsi {
    std::vector<CVec> h_hat;     // K unit-norm direction rows (phase aligned)
    std::vector<double> cmi;     // A_k: N (average), quantized levels, or ||h_k||^2
    std::vector<double> xi_sq;   // K pathloss CMI values
    unsigned cdi_bits = 0;
};

inline QuantizedCsi quantize_csi(const ChannelRealization& ch, const SystemConfig& config,
                                 std::uint64_t trial) {
    const std::size_t k_ues = ch.h.rows();
    QuantizedCsi csi;
    csi.cdi_bits = config.cdi_bits;
    csi.h_hat.resize(k_ues);
    csi.cmi.resize(k_ues);
    csi.xi_sq.resize(k_ues);
    for (std::size_t k = 0; k < k_ues; ++k) {
        CVec h_k = ch.h.row(k);
        double norm_sq = norm2(h_k);
        if (config.perfect_cdi) {
            csi.h_hat[k] = normalized(h_k);
        } else {
            std::uint64_t cb_trial = config.fixed_codebook ? 0 : trial;
            auto rng = StreamRng::keyed(config.seed, cb_trial, k, RngPurpose::codebook);
            RvqCodebook cb = make_rvq_codebook(ch.h.cols(), config.cdi_bits, rng);
            csi.h_hat[k] = quantize_cdi(h_k, cb).h_hat;
        }
        switch (config.cmi_mode) {
            case CmiMode::average:
                csi.cmi[k] = static_cast<double>(ch.h.cols());
                break;
            case CmiMode::quantized:
                csi.cmi[k] = quantize_cf_cmi(norm_sq, config.cmi_bits, ch.h.cols());
                break;
            case CmiMode::perfect:
                csi.cmi[k] = norm_sq;
                break;
        }
        csi.xi_sq[k] = ch.xi[k] * ch.xi[k];
    }
    return csi;
}

} // namespace leakbf
