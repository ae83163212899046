#pragma once

#include <cstddef>
#include <vector>

#include "unifield/dictionary.hpp"
#include "unifield/geometry.hpp"
#include "unifield/rng.hpp"
#include "unifield/types.hpp"

namespace unifield {

struct MeasurementMatrix {
    cmat phi; // P x N, unit-norm rows
    std::size_t pilot_count = 0;
};

struct SparseEstimate {
    std::vector<int> support;
    cvec coefficients;
    DictionaryKind dictionary_kind = DictionaryKind::Learned;
};

struct OmpStopping {
    std::size_t max_atoms = 8;
    double residual_tol = 0.0;
};

// Random unit-modulus combining rows, entry = exp(i theta)/sqrt(N); with
// identity=true returns the identity (requires pilot_count = N). Throws
// PilotBudgetExceeded when pilot_count > N.
MeasurementMatrix build_measurement(const ArrayGeometry& geom, std::size_t pilot_count,
                                    Rng& rng, bool identity = false);

// y = phi h + w, w iid circular complex Gaussian with per-entry variance
// noise_sigma^2
cvec observe(const MeasurementMatrix& m, const cvec& h, double noise_sigma, Rng& rng);

// Greedy max-correlation selection (columns normalized internally for the
// selection metric only) with a least-squares refit on the accumulated
// original columns each iteration. Stops at max_atoms or when
// ||residual||/||y|| <= residual_tol. Candidates that would make the
// support rank-deficient are rejected in favor of the next-best correlation
// (ties: lowest index). Zero y gives an empty estimate; a nonzero y whose
// correlations all underflow before the first selection throws NoProgress.
SparseEstimate omp(const cvec& y, const cmat& sensing, const OmpStopping& stopping);

// h_hat = sum over support of coefficient * atom
cvec reconstruct(const Dictionary& dict, const SparseEstimate& est);

// ||h_hat - h||^2 / ||h||^2; ZeroReference when ||h|| = 0
double nmse(const cvec& h_hat, const cvec& h);

} // namespace unifield
