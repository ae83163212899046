#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "unifield/dictionary.hpp"
#include "unifield/types.hpp"

namespace unifield {

struct KsvdConfig {
    std::size_t atom_count = 1024;
    std::size_t sparsity = 8;
    std::size_t max_iters = 30;
    double nmse_threshold = 1e-3;
    std::uint64_t seed = 0;
};

struct LearnedCodebook {
    Dictionary dictionary;        // kind Learned, M = atom_count
    cmat sparse_codes;            // M x T over the training set
    std::vector<double> history;  // training NMSE per iteration
};

// Column t = omp(H col t, A, max_atoms = sparsity, residual_tol = 0),
// independent per column; parallel over columns when workers > 1.
cmat sparse_coding_step(const cmat& A, const cmat& H, std::size_t sparsity, int workers = 1);

// One full pass of column-wise rank-1 updates. Used atoms get the leading
// singular direction of their restricted residual (phase-aligned with the
// previous atom so updates do not drift in global phase) and their code row
// is refit; unused atoms are replaced by the currently worst-represented
// training column, each training column used at most once per pass.
// With supports frozen this never increases ||H - A codes||_F.
void dictionary_update_step(cmat& A, cmat& codes, const cmat& H);

// Alternate the two steps from an initialization of distinct normalized
// training columns, recording NMSE = ||H - A codes||_F^2 / ||H||_F^2 per
// iteration; stop at nmse_threshold or max_iters. Throws EmptyTrainingSet.
LearnedCodebook ksvd_learn(const cmat& H, const KsvdConfig& cfg, int workers = 1);

// entry -> (a/|a|)/sqrt(N); entries with |a| <= 1e-12 become 1/sqrt(N)
// (phase 0). Every output entry has modulus exactly 1/sqrt(N).
cmat constant_modulus_project(const cmat& A);

// true iff the trailing moving average (window 10) of se_history fell below
// (1 - decline_fraction) * baseline_se
bool retrain_trigger(const std::vector<double>& se_history, double baseline_se,
                     double decline_fraction);

} // namespace unifield
