#pragma once

#include "smith/models.hpp"

namespace smith {

// Seeded randomized invariant suites over all library layers.  Each suite
// draws `cases` random instances and reports the worst normalized defect
// against its tolerance.  All randomness comes from the given seed, so a
// fixed (seed, cases) pair reproduces the run bit for bit.
struct SuiteResult {
  std::string name;
  std::int64_t cases = 0;
  double max_defect = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// 1. wedge/interior adjunction, double star sign, star isometry, and
//    functoriality of the exterior-power matrices, on random metrics.
SuiteResult exterior_suite(std::uint64_t seed, int cases);

// 2. the determinant-vs-norm bound on random rectangular matrices, with the
//    equality case checked in both directions against conformality.
SuiteResult hadamard_suite(std::uint64_t seed, int cases);

// 3. structure-constant tables of the standard calibrations: the cross
//    product induced by the 3-form on R^7 must satisfy the norm identity,
//    coordinate planes must calibrate with vanishing first-cousin values,
//    and the fixed wedge/duality identities between the tables must hold.
//    `three_form_override` substitutes the R^7 3-form (and everything
//    derived from it) so conventions can be audited from a file.
SuiteResult star_calibration_suite(
    std::uint64_t seed, int cases,
    const std::optional<KForm>& three_form_override = std::nullopt);

// 4. metric compatibility of the chart connection, type decomposition and
//    its star exchange, and the divergence/exterior-power commutation.
SuiteResult connection_suite(std::uint64_t seed, int cases);

// 5. the pointwise inequality: nonnegative slack on random jets in both
//    directions for all standard calibrations.
SuiteResult inequality_suite(std::uint64_t seed, int cases);

// 6. agreement of the direct residual and the operator-form residual:
//    both vanish on conformal calibrated jets and both reject perturbed
//    jets at the coupled tolerance.
SuiteResult equivalence_suite(std::uint64_t seed, int cases);

// 7. the flat model registry: exact models pass a sweep, perturbed ones
//    are detected.
SuiteResult models_suite();

struct SuiteOptions {
  std::uint64_t seed = 1;
  int cases = 300;
  std::optional<KForm> three_form_override;
};

std::vector<SuiteResult> run_lemma_suites(const SuiteOptions& opt);

}  // namespace smith
