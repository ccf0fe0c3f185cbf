#pragma once

#include <vector>

#include "foca/feature.hpp"
#include "foca/linear_system.hpp"

namespace foca {

enum class PredictorKind;
class TrajectorySource;

/// ||pred - truth|| / (||truth|| + 1e-12).
double relative_error(const FeatureVector& pred, const FeatureVector& truth);

struct FlaggedError {
    double value = 0.0;
    bool degenerate = false;  // near-zero ground truth; value is the absolute error
};
FlaggedError relative_error_flagged(const FeatureVector& pred, const FeatureVector& truth);

/// Defect of one two-step backward-differentiation step taken from exact
/// history, with the end-of-step derivative estimated from exact trajectory
/// differences (central where available). Third-order in h on smooth data.
double local_truncation_error(const std::vector<FeatureVector>& trajectory, double h, int at);

/// Local slope-variation rate: max ||dv|| over the window divided by the
/// window mean of ||dF||, with v_k = (F_{k+1} - F_k)/h. Approximates the
/// magnitude of the locally dominant eigenvalue; 0 on a frozen trajectory.
double stiffness_index(const std::vector<FeatureVector>& trajectory, double h, int at, int window);

struct Prop1Report {
    double rho = 0.0;
    double tau_max = 0.0;
    std::vector<double> errors;       // error(k), k = 1..max_k
    std::vector<double> bounds;       // (1 - rho^k)/(1 - rho) * tau_max
    std::vector<bool> bound_ok;       // error(k) <= bound(k) * slack
    bool all_bounds_ok = true;
    double sup_bound = 0.0;           // tau_max / (1 - rho)
    bool sup_ok = true;
    bool error_increasing_in_k = false;  // k-independence violation marker
    bool pass = true;
};

/// Runs the given predictor over max_k consecutive skipped steps from a warm
/// state and checks the geometric error bound at 5% slack. tau_max is the
/// largest one-skip deviation: the gap, after a single completed step, between
/// using the forecast and using the true feature at the same cached state.
Prop1Report verify_proposition1(const LinearSystem& system, double h, int warmup, int max_k, PredictorKind kind);

struct HorizonPoint {
    int step = 0;
    double rel_feature_error = 0.0;
    double abs_feature_error = 0.0;
    double abs_state_deviation = 0.0;
};

struct HorizonCurve {
    int warm_steps = 0;
    PredictorKind kind;
    std::vector<HorizonPoint> points;
};

/// Warm the cache with `warm` full steps, then forecast `horizon` consecutive
/// steps with each kind; errors are against the uncached run.
std::vector<HorizonCurve> multi_horizon_forecast_error(TrajectorySource& source, const std::vector<int>& warm_steps,
                                                       int horizon, const std::vector<PredictorKind>& kinds, int m,
                                                       uint64_t seed);

/// Median pairwise distance of the pooled samples (the kernel bandwidth
/// heuristic); 1.0 when every distance is zero.
double median_pairwise_distance(const std::vector<FeatureVector>& a, const std::vector<FeatureVector>& b);

/// Unbiased squared maximum mean discrepancy with a Gaussian kernel.
/// bandwidth <= 0 selects the median heuristic.
double mmd_sample_quality(const std::vector<FeatureVector>& samples_a, const std::vector<FeatureVector>& samples_b,
                          double bandwidth = 0.0);

}  // namespace foca
