#pragma once

#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "khsim/errors.hpp"
#include "khsim/timeseries.hpp"

namespace khsim {

struct Peak {
    double t = 0.0;
    double amplitude = 0.0;
};

// Local maxima of |trace|, refined by a parabola through three samples.
[[nodiscard]] std::vector<Peak> peak_envelope(const std::vector<double>& trace, const std::vector<double>& times);

// Upward zero crossings, linearly interpolated.
[[nodiscard]] std::vector<double> zero_crossings(const std::vector<double>& trace, const std::vector<double>& times);

struct TimeWindow {
    double start = -std::numeric_limits<double>::infinity();
    double end = std::numeric_limits<double>::infinity();
};

// Phase by which b trails a, from matched upward zero crossings in the window,
// wrapped to (-pi, pi].
[[nodiscard]] double phase_lag(const std::vector<double>& a, const std::vector<double>& b,
                               const std::vector<double>& times, TimeWindow window = {});

// Exponential decay rate -d ln(A)/dt; 0 below the resolution 1/(100 t_span).
[[nodiscard]] double fit_decay(const std::vector<Peak>& envelope);

struct SyncTolerances {
    double phase_tol = 0.05;
    double amp_tol = 0.05;
    int periods = 5;
};

struct PeriodMetrics {
    double start = 0.0;
    double peak_a = 0.0;
    double peak_b = 0.0;
    double lag = 0.0;
};

struct SyncReport {
    // Start of the first run of `periods` consecutive periods that meet the
    // strict (phase and amplitude) condition; +inf when there is none.
    double transient_time = std::numeric_limits<double>::infinity();
    // Same for the phase condition alone, once both peaks have settled.
    double phase_sync_time = std::numeric_limits<double>::infinity();
    double phase_lag = 0.0;
    double amplitude_ratio = 0.0;  // b / a
    std::vector<double> steady_amplitudes;
    double decay_rate = 0.0;  // of the mean post-transient envelope of the pair
    double period = 0.0;
    bool strict_sync = false;
    bool phase_sync = false;
    std::vector<PeriodMetrics> per_period;
};

// pair holds 0-based DOF indices into series.charge.
[[nodiscard]] SyncReport sync_report(const TimeSeries& series, std::pair<int, int> pair,
                                     const SyncTolerances& tolerances = {});

}  // namespace khsim
