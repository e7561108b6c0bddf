#ifndef CANAL_IDENT_HPP
#define CANAL_IDENT_HPP

#include <vector>

#include "canal/filters.hpp"
#include "canal/pool_model.hpp"

namespace canal {

/// Drain-then-refill excitation: +1 before t1, 0 on [t1,t2), -1 on [t2,t3),
/// 0 afterwards. Requires 0 < t1 < t2 < t3 <= length.
std::vector<double> make_test_signal(int t1, int t2, int t3, int length);

struct DelayFitConfig {
    int t1 = 100, t2 = 300, t3 = 400;
    int length = 600;
    int candidate_lo = 0;
    int candidate_hi = 30;
    IIRFilterCoeffs filter;  // shared input low-pass applied to the reference
};

DelayFitConfig default_delay_fit_config();

struct DelayFitResult {
    int delay = 0;
    std::vector<double> objective;  // per candidate, candidate_lo first
};

/**
 * Stage one of the two-stage fit: the shared low-pass delay. For every
 * candidate, each pool's first-order response to the raw outflow test
 * signal is compared against the third-order response to the filtered
 * signal; squared errors are normalized by each pool's reference energy
 * and summed. Exhaustive integer search, ties broken toward the smaller
 * delay. The outflow channel isolates tau_bar because the per-pool
 * transport delay does not enter it.
 */
DelayFitResult fit_common_delay(const std::vector<ThirdOrderPoolParams>& references,
                                const std::vector<FirstOrderPoolParams>& candidates,
                                const DelayFitConfig& config = default_delay_fit_config());

/// Stage two: per-pool transport delay from the inflow response, with
/// tau_bar fixed by stage one.
DelayFitResult fit_pool_delay(const ThirdOrderPoolParams& reference,
                              const FirstOrderPoolParams& candidate, int tau_bar,
                              const DelayFitConfig& config = default_delay_fit_config());

}  // namespace canal

#endif
