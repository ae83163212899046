#pragma once

#include <cstddef>
#include <vector>

#include "unifield/dictionary.hpp"
#include "unifield/rng.hpp"
#include "unifield/types.hpp"

namespace unifield {

// Channel convention used throughout: channel matrices store row k = h_k
// (unconjugated) and UE k receives h_k^H x, so every formula below pairs a
// precoder column with conj(h_k).

struct FeedbackReport {
    int ue_index = 0;
    std::vector<int> codeword_indices; // unique, sorted by descending |amplitude|
    cvec amplitudes;                   // noisy h^H a at those indices, same order
};

struct PrecodingMatrix {
    cmat f; // N x K
    double power_budget = 1.0;
};

struct HybridPrecoder {
    cmat analog;   // N x n_rf, entries modulus 1/sqrt(N)
    cmat baseband; // n_rf x K, power scaling folded in
    double power_budget = 1.0;

    cmat f() const { return analog * baseband; }
};

enum class AnalogSelection { Global, PerUe };

// alpha_m = h_k^H a_m + CN(0, noise_sigma^2) for every codeword; reports the
// L largest by magnitude (ties: lowest index).
FeedbackReport beam_sweep_report(const Dictionary& codebook, const cvec& h_k, std::size_t L,
                                 double noise_sigma, Rng& rng, int ue_index = 0);

// Column k = UE k's strongest reported codeword at equal per-UE power.
// Collisions demote the weaker UE to its next reported index; a UE whose
// whole list is taken raises InsufficientFeedback.
PrecodingMatrix type1_precoder(const std::vector<FeedbackReport>& reports,
                               const Dictionary& codebook, double power_budget);

// Column k = sum over UE k's report of conj(amplitude) * codeword,
// normalized per UE, then equal-power scaled.
PrecodingMatrix type2_precoder(const std::vector<FeedbackReport>& reports,
                               const Dictionary& codebook, double power_budget);

// Analog stage: n_rf codewords chosen from the reports (Global: largest
// aggregate |amplitude|^2 across UEs; PerUe: strongest UEs first, each takes
// its best un-taken reported codeword, remaining slots filled from the
// aggregate ranking), constant-modulus projected. Baseband: zero-forcing on
// the effective channel conj(estimates) * analog, equal per-UE power.
// Throws RankDeficientEffectiveChannel when the effective channel loses
// rank K.
HybridPrecoder hybrid_precoder(const Dictionary& codebook,
                               const std::vector<FeedbackReport>& reports,
                               const cmat& channel_estimates, std::size_t n_rf,
                               double power_budget,
                               AnalogSelection selection = AnalogSelection::Global);

// Zero-forcing on the reception matrix G = conj(H): f = G^H (G G^H)^-1 with
// equal-power column scaling, so conj(H) f is diagonal. noise_sigma is
// accepted for signature parity with MMSE variants but does not enter ZF.
PrecodingMatrix fully_digital_zf(const cmat& H, double power_budget, double noise_sigma);

// Column k = constant-modulus projection of h_k (phase-matched filter under
// the h_k^H x reception convention), equal-power scaled.
PrecodingMatrix cm_mf_precoder(const cmat& H, double power_budget);

struct SpectralEfficiency {
    rvec per_ue; // bits/s/Hz
    double sum = 0.0;
};

// SINR_k = |h_k^H f_k|^2 / (sum_{j != k} |h_k^H f_j|^2 + noise_sigma^2),
// SE = sum_k log2(1 + SINR_k)
SpectralEfficiency spectral_efficiency(const cmat& H, const cmat& f, double noise_sigma);

} // namespace unifield
