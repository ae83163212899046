#include "unifield/precoding.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "unifield/errors.hpp"
#include "unifield/ksvd.hpp"

namespace unifield {

namespace {

// stable descending-score ranking; ties resolve to the lowest index
std::vector<int> rank_desc(const std::vector<double>& score) {
    std::vector<int> order(score.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return score[std::size_t(a)] > score[std::size_t(b)]; });
    return order;
}

void check_reports(const std::vector<FeedbackReport>& reports, Eigen::Index m) {
    if (reports.empty())
        throw InsufficientFeedback("no feedback reports");
    for (const FeedbackReport& r : reports) {
        if (r.codeword_indices.empty())
            throw InsufficientFeedback("empty feedback report");
        if (Eigen::Index(r.codeword_indices.size()) != r.amplitudes.size())
            throw DimensionMismatch("feedback report: index/amplitude length mismatch");
        for (int idx : r.codeword_indices)
            if (idx < 0 || Eigen::Index(idx) >= m)
                throw IndexOutOfRange("feedback report references codeword outside codebook");
    }
}

} // namespace

FeedbackReport beam_sweep_report(const Dictionary& codebook, const cvec& h_k, std::size_t L,
                                 double noise_sigma, Rng& rng, int ue_index) {
    Eigen::Index const m = codebook.atoms.cols();
    if (codebook.atoms.rows() != h_k.size())
        throw DimensionMismatch("beam_sweep_report: channel length differs from codebook rows");
    if (L == 0)
        throw NonPositiveParameter("beam_sweep_report: L must be >= 1");
    if (Eigen::Index(L) > m)
        throw InconsistentBounds("beam_sweep_report: L exceeds codebook size");
    if (noise_sigma < 0.0)
        throw NonPositiveParameter("beam_sweep_report: negative noise_sigma");

    cvec alpha = codebook.atoms.adjoint() * h_k; // entry m = h_k^H a_m (conjugated)
    // adjoint gives a_m^H h_k; the report carries h_k^H a_m
    alpha = alpha.conjugate();
    if (noise_sigma > 0.0) {
        double const var = noise_sigma * noise_sigma;
        for (Eigen::Index i = 0; i < m; ++i) alpha(i) += rng.cgaussian(var);
    }

    std::vector<double> mag(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) mag[std::size_t(i)] = std::abs(alpha(i));
    std::vector<int> const order = rank_desc(mag);

    FeedbackReport rep;
    rep.ue_index = ue_index;
    rep.codeword_indices.assign(order.begin(), order.begin() + long(L));
    rep.amplitudes.resize(Eigen::Index(L));
    for (std::size_t i = 0; i < L; ++i)
        rep.amplitudes(Eigen::Index(i)) = alpha(rep.codeword_indices[i]);
    return rep;
}

PrecodingMatrix type1_precoder(const std::vector<FeedbackReport>& reports,
                               const Dictionary& codebook, double power_budget) {
    if (power_budget <= 0.0)
        throw NonPositiveParameter("type1_precoder: power budget must be positive");
    check_reports(reports, codebook.atoms.cols());
    std::size_t const k = reports.size();

    // stronger UEs pick first; each takes its best still-free codeword
    std::vector<double> strength(k);
    for (std::size_t i = 0; i < k; ++i) strength[i] = std::abs(reports[i].amplitudes(0));
    std::vector<int> const order = rank_desc(strength);

    std::vector<int> chosen(k, -1);
    std::vector<bool> taken(std::size_t(codebook.atoms.cols()), false);
    for (int ue : order) {
        const FeedbackReport& r = reports[std::size_t(ue)];
        for (int idx : r.codeword_indices) {
            if (!taken[std::size_t(idx)]) {
                chosen[std::size_t(ue)] = idx;
                taken[std::size_t(idx)] = true;
                break;
            }
        }
        if (chosen[std::size_t(ue)] < 0)
            throw InsufficientFeedback("type1_precoder: every reported codeword already assigned");
    }

    PrecodingMatrix out;
    out.power_budget = power_budget;
    out.f.resize(codebook.atoms.rows(), Eigen::Index(k));
    double const col_norm = std::sqrt(power_budget / double(k));
    for (std::size_t i = 0; i < k; ++i)
        out.f.col(Eigen::Index(i)) = codebook.atoms.col(chosen[i]) * col_norm;
    return out;
}

PrecodingMatrix type2_precoder(const std::vector<FeedbackReport>& reports,
                               const Dictionary& codebook, double power_budget) {
    if (power_budget <= 0.0)
        throw NonPositiveParameter("type2_precoder: power budget must be positive");
    check_reports(reports, codebook.atoms.cols());
    std::size_t const k = reports.size();

    PrecodingMatrix out;
    out.power_budget = power_budget;
    out.f.resize(codebook.atoms.rows(), Eigen::Index(k));
    double const col_norm = std::sqrt(power_budget / double(k));
    for (std::size_t i = 0; i < k; ++i) {
        const FeedbackReport& r = reports[i];
        cvec col = cvec::Zero(codebook.atoms.rows());
        for (std::size_t l = 0; l < r.codeword_indices.size(); ++l)
            col += std::conj(r.amplitudes(Eigen::Index(l))) *
                   codebook.atoms.col(r.codeword_indices[l]);
        double const n = col.norm();
        if (n < 1e-300)
            throw ZeroReference("type2_precoder: reported combination sums to zero");
        out.f.col(Eigen::Index(i)) = col * (col_norm / n);
    }
    return out;
}

HybridPrecoder hybrid_precoder(const Dictionary& codebook,
                               const std::vector<FeedbackReport>& reports,
                               const cmat& channel_estimates, std::size_t n_rf,
                               double power_budget, AnalogSelection selection) {
    Eigen::Index const n = codebook.atoms.rows();
    Eigen::Index const m = codebook.atoms.cols();
    if (power_budget <= 0.0)
        throw NonPositiveParameter("hybrid_precoder: power budget must be positive");
    check_reports(reports, m);
    std::size_t const k = reports.size();
    if (n_rf == 0)
        throw NonPositiveParameter("hybrid_precoder: n_rf must be >= 1");
    if (Eigen::Index(n_rf) > m || n_rf < k)
        throw InconsistentBounds("hybrid_precoder: need K <= n_rf <= codebook size");
    if (channel_estimates.rows() != Eigen::Index(k) || channel_estimates.cols() != n)
        throw DimensionMismatch("hybrid_precoder: estimate matrix must be K x N");

    // aggregate sweep energy per codeword across all UEs
    std::vector<double> score(std::size_t(m), 0.0);
    for (const FeedbackReport& r : reports)
        for (std::size_t l = 0; l < r.codeword_indices.size(); ++l)
            score[std::size_t(r.codeword_indices[l])] += std::norm(r.amplitudes(Eigen::Index(l)));

    std::vector<int> const aggregate = rank_desc(score);
    std::vector<int> selected;
    selected.reserve(n_rf);
    std::vector<bool> taken(std::size_t(m), false);
    auto take = [&](int idx) {
        taken[std::size_t(idx)] = true;
        selected.push_back(idx);
    };

    if (selection == AnalogSelection::PerUe) {
        // strongest UEs claim their best free codeword; a UE whose whole list
        // is taken is skipped, its beams being present already
        std::vector<double> strength(k);
        for (std::size_t i = 0; i < k; ++i) strength[i] = std::abs(reports[i].amplitudes(0));
        for (int ue : rank_desc(strength)) {
            if (selected.size() == n_rf) break;
            for (int idx : reports[std::size_t(ue)].codeword_indices) {
                if (!taken[std::size_t(idx)]) {
                    take(idx);
                    break;
                }
            }
        }
    }
    for (int idx : aggregate) {
        if (selected.size() == n_rf) break;
        if (!taken[std::size_t(idx)] && score[std::size_t(idx)] > 0.0) take(idx);
    }
    for (int idx = 0; int(selected.size()) < int(n_rf) && idx < int(m); ++idx)
        if (!taken[std::size_t(idx)]) take(idx);

    cmat beams(n, Eigen::Index(n_rf));
    for (std::size_t i = 0; i < n_rf; ++i)
        beams.col(Eigen::Index(i)) = codebook.atoms.col(selected[i]);

    HybridPrecoder out;
    out.power_budget = power_budget;
    out.analog = constant_modulus_project(beams);

    cmat const g_eff = channel_estimates.conjugate() * out.analog; // K x n_rf
    Eigen::ColPivHouseholderQR<cmat> qr(g_eff);
    if (qr.rank() < Eigen::Index(k))
        throw RankDeficientEffectiveChannel("hybrid_precoder: effective channel rank below K");

    cmat const gram = g_eff * g_eff.adjoint();
    cmat baseband = g_eff.adjoint() *
                    gram.ldlt().solve(cmat::Identity(Eigen::Index(k), Eigen::Index(k)));

    // fold the equal-power column scaling into the baseband stage
    double const col_norm = std::sqrt(power_budget / double(k));
    for (Eigen::Index j = 0; j < Eigen::Index(k); ++j) {
        double const cn = (out.analog * baseband.col(j)).norm();
        if (cn < 1e-300)
            throw RankDeficientEffectiveChannel("hybrid_precoder: zero precoder column");
        baseband.col(j) *= col_norm / cn;
    }
    out.baseband = std::move(baseband);
    return out;
}

PrecodingMatrix fully_digital_zf(const cmat& H, double power_budget, double noise_sigma) {
    if (power_budget <= 0.0)
        throw NonPositiveParameter("fully_digital_zf: power budget must be positive");
    if (noise_sigma < 0.0)
        throw NonPositiveParameter("fully_digital_zf: negative noise_sigma");
    Eigen::Index const k = H.rows();
    if (k == 0 || H.cols() == 0)
        throw DimensionMismatch("fully_digital_zf: empty channel matrix");

    cmat const g = H.conjugate(); // reception matrix: UE k sees g.row(k) * x
    Eigen::ColPivHouseholderQR<cmat> qr(g);
    if (qr.rank() < k)
        throw SingularChannel("fully_digital_zf: channel rows are linearly dependent");

    cmat const gram = g * g.adjoint();
    cmat f = g.adjoint() * gram.ldlt().solve(cmat::Identity(k, k));

    PrecodingMatrix out;
    out.power_budget = power_budget;
    double const col_norm = std::sqrt(power_budget / double(k));
    for (Eigen::Index j = 0; j < k; ++j) {
        double const cn = f.col(j).norm();
        if (cn < 1e-300)
            throw SingularChannel("fully_digital_zf: zero pseudo-inverse column");
        f.col(j) *= col_norm / cn;
    }
    out.f = std::move(f);
    return out;
}

PrecodingMatrix cm_mf_precoder(const cmat& H, double power_budget) {
    if (power_budget <= 0.0)
        throw NonPositiveParameter("cm_mf_precoder: power budget must be positive");
    Eigen::Index const k = H.rows();
    if (k == 0 || H.cols() == 0)
        throw DimensionMismatch("cm_mf_precoder: empty channel matrix");

    PrecodingMatrix out;
    out.power_budget = power_budget;
    // columns are the rows of H unconjugated, so h_k^H f_k is real positive
    out.f = constant_modulus_project(H.transpose()) * std::sqrt(power_budget / double(k));
    return out;
}

SpectralEfficiency spectral_efficiency(const cmat& H, const cmat& f, double noise_sigma) {
    Eigen::Index const k = H.rows();
    if (f.rows() != H.cols() || f.cols() != k)
        throw DimensionMismatch("spectral_efficiency: precoder must be N x K");
    if (noise_sigma < 0.0)
        throw NonPositiveParameter("spectral_efficiency: negative noise_sigma");

    cmat const e = H.conjugate() * f; // e(k, j) = h_k^H f_j
    SpectralEfficiency out;
    out.per_ue.resize(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        double const signal = std::norm(e(i, i));
        double interference = 0.0;
        for (Eigen::Index j = 0; j < k; ++j)
            if (j != i) interference += std::norm(e(i, j));
        double const denom = interference + noise_sigma * noise_sigma;
        double sinr;
        if (denom > 0.0)
            sinr = signal / denom;
        else
            sinr = signal > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        out.per_ue(i) = std::log2(1.0 + sinr);
        out.sum += out.per_ue(i);
    }
    return out;
}

} // namespace unifield
