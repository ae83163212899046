#include "unifield/omp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "unifield/errors.hpp"

namespace unifield {

MeasurementMatrix build_measurement(const ArrayGeometry& geom, std::size_t pilot_count,
                                    Rng& rng, bool identity) {
    std::size_t const n = geom.size();
    if (pilot_count == 0)
        throw NonPositiveParameter("build_measurement: pilot_count must be >= 1");
    if (pilot_count > n)
        throw PilotBudgetExceeded("build_measurement: pilot_count exceeds antenna count");
    MeasurementMatrix m;
    m.pilot_count = pilot_count;
    if (identity) {
        if (pilot_count != n)
            throw DimensionMismatch("build_measurement: identity requires pilot_count = N");
        m.phi = cmat::Identity(Eigen::Index(n), Eigen::Index(n));
        return m;
    }
    double const scale = 1.0 / std::sqrt(double(n));
    m.phi.resize(Eigen::Index(pilot_count), Eigen::Index(n));
    for (std::size_t p = 0; p < pilot_count; ++p) {
        for (std::size_t e = 0; e < n; ++e) {
            double const th = rng.uniform(0.0, 2.0 * pi);
            m.phi(Eigen::Index(p), Eigen::Index(e)) = cx(std::cos(th) * scale, std::sin(th) * scale);
        }
    }
    return m;
}

cvec observe(const MeasurementMatrix& m, const cvec& h, double noise_sigma, Rng& rng) {
    if (h.size() != m.phi.cols())
        throw DimensionMismatch("observe: channel length does not match measurement width");
    if (noise_sigma < 0.0)
        throw NonPositiveParameter("observe: noise_sigma must be >= 0");
    cvec y = m.phi * h;
    if (noise_sigma > 0.0) {
        double const var = noise_sigma * noise_sigma;
        for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += rng.cgaussian(var);
    }
    return y;
}

SparseEstimate omp(const cvec& y, const cmat& sensing, const OmpStopping& stopping) {
    Eigen::Index const p = sensing.rows();
    Eigen::Index const m = sensing.cols();
    if (y.size() != p)
        throw DimensionMismatch("omp: observation length does not match sensing rows");
    if (stopping.max_atoms > std::size_t(p))
        throw DimensionMismatch("omp: max_atoms exceeds measurement count");

    SparseEstimate est;
    double const y_norm = y.norm();
    if (y_norm == 0.0) return est;

    // selection metric is correlation against unit-norm columns; the refit
    // uses the original columns
    rvec inv_norms(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        double const nj = sensing.col(j).norm();
        inv_norms(j) = nj > 1e-300 ? 1.0 / nj : 0.0;
    }

    cvec residual = y;
    std::vector<bool> excluded(std::size_t(m), false);
    cmat basis(p, Eigen::Index(std::min<std::size_t>(stopping.max_atoms, std::size_t(p))));
    cvec coef;

    while (est.support.size() < stopping.max_atoms) {
        cvec corr_raw = sensing.adjoint() * residual;
        // candidates ranked by normalized correlation, ties to lowest index
        std::vector<int> order;
        order.reserve(std::size_t(m));
        for (Eigen::Index j = 0; j < m; ++j)
            if (!excluded[std::size_t(j)] && inv_norms(j) > 0.0) order.push_back(int(j));
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return std::abs(corr_raw(a)) * inv_norms(a) > std::abs(corr_raw(b)) * inv_norms(b);
        });

        bool advanced = false;
        for (int j : order) {
            if (std::abs(corr_raw(j)) * inv_norms(j) < 1e-13 * y_norm) break;
            Eigen::Index const s = Eigen::Index(est.support.size());
            basis.col(s) = sensing.col(j);
            Eigen::ColPivHouseholderQR<cmat> qr(basis.leftCols(s + 1));
            if (qr.rank() < s + 1) {
                // adding this atom loses rank; take the next-best instead
                excluded[std::size_t(j)] = true;
                continue;
            }
            est.support.push_back(j);
            excluded[std::size_t(j)] = true;
            coef = qr.solve(y);
            residual = y - basis.leftCols(s + 1) * coef;
            advanced = true;
            break;
        }
        if (!advanced) {
            if (est.support.empty())
                throw NoProgress("omp: correlations underflow before any selection");
            break;
        }
        if (residual.norm() / y_norm <= stopping.residual_tol) break;
    }

    est.coefficients = coef.size() > 0 ? coef : cvec();
    return est;
}

cvec reconstruct(const Dictionary& dict, const SparseEstimate& est) {
    cvec h = cvec::Zero(dict.atoms.rows());
    for (std::size_t i = 0; i < est.support.size(); ++i) {
        int const j = est.support[i];
        if (j < 0 || j >= int(dict.atoms.cols()))
            throw IndexOutOfRange("reconstruct: support index outside dictionary");
        h += est.coefficients(Eigen::Index(i)) * dict.atoms.col(j);
    }
    return h;
}

double nmse(const cvec& h_hat, const cvec& h) {
    if (h_hat.size() != h.size())
        throw DimensionMismatch("nmse: length mismatch");
    double const ref = h.squaredNorm();
    if (ref == 0.0)
        throw ZeroReference("nmse: reference vector is zero");
    return (h_hat - h).squaredNorm() / ref;
}

} // namespace unifield
