#include "unifield/ksvd.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <vector>

#include "unifield/errors.hpp"
#include "unifield/omp.hpp"
#include "unifield/parallel.hpp"
#include "unifield/rng.hpp"

namespace unifield {

namespace {

// leading singular triplet of e via the Gram matrix on the smaller side
void leading_triplet(const cmat& e, cvec& u, double& sigma) {
    if (e.cols() <= e.rows()) {
        cmat const g = e.adjoint() * e;
        Eigen::SelfAdjointEigenSolver<cmat> es(g);
        Eigen::Index const last = g.rows() - 1; // eigenvalues ascending
        double const lam = std::max(0.0, es.eigenvalues()(last));
        sigma = std::sqrt(lam);
        cvec const v = es.eigenvectors().col(last);
        u = e * v;
        double const un = u.norm();
        if (un > 0.0)
            u /= un;
        else
            u = e.col(0).normalized();
    } else {
        cmat const g = e * e.adjoint();
        Eigen::SelfAdjointEigenSolver<cmat> es(g);
        Eigen::Index const last = g.rows() - 1;
        sigma = std::sqrt(std::max(0.0, es.eigenvalues()(last)));
        u = es.eigenvectors().col(last);
    }
}

} // namespace

cmat sparse_coding_step(const cmat& A, const cmat& H, std::size_t sparsity, int workers) {
    if (A.rows() != H.rows())
        throw DimensionMismatch("sparse_coding_step: dictionary and training rows differ");
    Eigen::Index const m = A.cols(), t = H.cols();
    cmat codes = cmat::Zero(m, t);
    OmpStopping const stop{sparsity, 0.0};
    parallel_for(std::size_t(t), workers, [&](std::size_t col) {
        SparseEstimate const est = omp(H.col(Eigen::Index(col)), A, stop);
        for (std::size_t i = 0; i < est.support.size(); ++i)
            codes(est.support[i], Eigen::Index(col)) = est.coefficients(Eigen::Index(i));
    });
    return codes;
}

void dictionary_update_step(cmat& A, cmat& codes, const cmat& H) {
    Eigen::Index const m = A.cols(), t = H.cols();
    if (codes.rows() != m || codes.cols() != t || A.rows() != H.rows())
        throw DimensionMismatch("dictionary_update_step: shape mismatch");

    std::vector<bool> replacement_used(std::size_t(t), false);
    for (Eigen::Index j = 0; j < m; ++j) {
        std::vector<Eigen::Index> omega;
        for (Eigen::Index c = 0; c < t; ++c)
            if (codes(j, c) != cx(0.0, 0.0)) omega.push_back(c);

        if (omega.empty()) {
            // hand the dead atom the worst-represented training column,
            // skipping columns already consumed this pass
            cmat const resid = H - A * codes;
            Eigen::Index best = -1;
            double best_norm = -1.0;
            for (Eigen::Index c = 0; c < t; ++c) {
                if (replacement_used[std::size_t(c)]) continue;
                double const rn = resid.col(c).norm();
                if (rn > best_norm && H.col(c).norm() > 1e-300) {
                    best_norm = rn;
                    best = c;
                }
            }
            if (best >= 0) {
                A.col(j) = H.col(best).normalized();
                replacement_used[std::size_t(best)] = true;
            }
            continue;
        }

        cmat e(A.rows(), Eigen::Index(omega.size()));
        for (std::size_t i = 0; i < omega.size(); ++i) {
            e.col(Eigen::Index(i)) = H.col(omega[i]) - A * codes.col(omega[i]) +
                                     A.col(j) * codes(j, omega[i]);
        }
        cvec u;
        double sigma = 0.0;
        leading_triplet(e, u, sigma);
        // keep the update phase-aligned with the previous atom so repeated
        // passes cannot drift in global phase
        cx const overlap = A.col(j).dot(u);
        if (std::abs(overlap) > 1e-12) {
            u *= std::conj(overlap) / std::abs(overlap);
        } else {
            Eigen::Index imax = 0;
            u.cwiseAbs().maxCoeff(&imax);
            cx const pivot = u(imax);
            if (std::abs(pivot) > 1e-300) u *= std::conj(pivot) / std::abs(pivot);
        }
        A.col(j) = u;
        // optimal code row for the fixed unit atom
        for (std::size_t i = 0; i < omega.size(); ++i)
            codes(j, omega[i]) = u.dot(e.col(Eigen::Index(i)));
    }
}

LearnedCodebook ksvd_learn(const cmat& H, const KsvdConfig& cfg, int workers) {
    Eigen::Index const t = H.cols();
    if (t == 0 || H.rows() == 0)
        throw EmptyTrainingSet("ksvd_learn: no training columns");
    if (cfg.atom_count == 0 || cfg.max_iters == 0)
        throw NonPositiveParameter("ksvd_learn: atom_count and max_iters must be >= 1");
    if (cfg.sparsity == 0 || cfg.sparsity > cfg.atom_count)
        throw InconsistentBounds("ksvd_learn: need 1 <= sparsity <= atom_count");
    if (std::size_t(t) < cfg.atom_count)
        std::cerr << "ksvd_learn: training set smaller than atom_count; atoms will repeat\n";

    Rng rng(cfg.seed);
    Eigen::Index const m = Eigen::Index(cfg.atom_count);

    // init from distinct normalized training columns (random order)
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(t));
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[std::size_t(rng.next_u64() % i)]);

    cmat a(H.rows(), m);
    std::size_t cursor = 0;
    for (Eigen::Index j = 0; j < m; ++j) {
        Eigen::Index pick = -1;
        while (cursor < perm.size()) {
            Eigen::Index const cand = perm[cursor++];
            if (H.col(cand).norm() > 1e-300) {
                pick = cand;
                break;
            }
        }
        if (pick < 0) {
            // training set exhausted; reuse a random nonzero column
            for (int tries = 0; tries < 64 && pick < 0; ++tries) {
                Eigen::Index const cand = Eigen::Index(rng.next_u64() % std::uint64_t(t));
                if (H.col(cand).norm() > 1e-300) pick = cand;
            }
            if (pick < 0)
                throw EmptyTrainingSet("ksvd_learn: all training columns are zero");
        }
        a.col(j) = H.col(pick).normalized();
    }

    LearnedCodebook out;
    double const h_energy = H.squaredNorm();
    cmat codes;
    for (std::size_t it = 0; it < cfg.max_iters; ++it) {
        codes = sparse_coding_step(a, H, cfg.sparsity, workers);
        dictionary_update_step(a, codes, H);
        double const err = (H - a * codes).squaredNorm() / h_energy;
        out.history.push_back(err);
        if (err <= cfg.nmse_threshold) break;
    }

    out.dictionary.kind = DictionaryKind::Learned;
    out.dictionary.atoms = std::move(a);
    out.dictionary.grid_meta.assign(std::size_t(m), GridMeta{});
    out.sparse_codes = std::move(codes);
    return out;
}

cmat constant_modulus_project(const cmat& A) {
    double const scale = 1.0 / std::sqrt(double(A.rows()));
    cmat out(A.rows(), A.cols());
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            cx const v = A(i, j);
            double const mag = std::abs(v);
            out(i, j) = mag > 1e-12 ? v / mag * scale : cx(scale, 0.0);
        }
    }
    return out;
}

bool retrain_trigger(const std::vector<double>& se_history, double baseline_se,
                     double decline_fraction) {
    if (!(decline_fraction > 0.0 && decline_fraction < 1.0))
        throw InconsistentBounds("retrain_trigger: decline_fraction must be in (0, 1)");
    if (se_history.empty()) return false;
    std::size_t const window = std::min<std::size_t>(10, se_history.size());
    double sum = 0.0;
    for (std::size_t i = se_history.size() - window; i < se_history.size(); ++i)
        sum += se_history[i];
    return sum / double(window) < (1.0 - decline_fraction) * baseline_se;
}

} // namespace unifield
