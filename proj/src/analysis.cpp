#include "khsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iterator>
#include <numbers>
#include <string>

namespace khsim {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap(double x) {
    x = std::remainder(x, 2.0 * kPi);
    if (x <= -kPi + 1e-12) {
        x += 2.0 * kPi;
    }
    return x;
}

void check_lengths(const std::vector<double>& trace, const std::vector<double>& times) {
    if (trace.size() != times.size()) {
        throw InputError("trace and time axis differ in length");
    }
}

// Parabolic refinement of |x| around sample i.
Peak refine(const std::vector<double>& x, const std::vector<double>& t, std::size_t i) {
    if (i == 0 || i + 1 >= x.size()) {
        return {t[i], std::abs(x[i])};
    }
    const double y0 = std::abs(x[i - 1]);
    const double y1 = std::abs(x[i]);
    const double y2 = std::abs(x[i + 1]);
    const double denom = y0 - 2.0 * y1 + y2;
    if (denom >= 0.0) {
        return {t[i], y1};
    }
    const double delta = std::clamp(0.5 * (y0 - y2) / denom, -0.5, 0.5);
    const double h = 0.5 * (t[i + 1] - t[i - 1]);
    return {t[i] + delta * h, y1 - 0.25 * (y0 - y2) * delta};
}

double nearest(const std::vector<double>& sorted, double x) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
    double best = std::numeric_limits<double>::quiet_NaN();
    if (it != sorted.end()) {
        best = *it;
    }
    if (it != sorted.begin() && (std::isnan(best) || x - *(it - 1) < best - x)) {
        best = *(it - 1);
    }
    return best;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double circular_mean(const std::vector<double>& angles) {
    std::complex<double> sum{0.0, 0.0};
    for (double a : angles) {
        sum += std::polar(1.0, a);
    }
    return wrap(std::arg(sum));
}

}  // namespace

std::vector<Peak> peak_envelope(const std::vector<double>& trace, const std::vector<double>& times) {
    check_lengths(trace, times);
    std::vector<Peak> peaks;
    for (std::size_t i = 1; i + 1 < trace.size(); ++i) {
        const double y = std::abs(trace[i]);
        if (y > 0.0 && y >= std::abs(trace[i - 1]) && y > std::abs(trace[i + 1])) {
            peaks.push_back(refine(trace, times, i));
        }
    }
    if (peaks.size() < 2) {
        throw InputError("no oscillation found in trace");
    }
    return peaks;
}

std::vector<double> zero_crossings(const std::vector<double>& trace, const std::vector<double>& times) {
    check_lengths(trace, times);
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
        if (trace[i] < 0.0 && trace[i + 1] >= 0.0) {
            const double f = -trace[i] / (trace[i + 1] - trace[i]);
            out.push_back(times[i] + f * (times[i + 1] - times[i]));
        }
    }
    return out;
}

double phase_lag(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& times,
                 TimeWindow window) {
    const auto all_a = zero_crossings(a, times);
    const auto cb = zero_crossings(b, times);
    std::vector<double> ca;
    std::copy_if(all_a.begin(), all_a.end(), std::back_inserter(ca),
                 [&](double t) { return t >= window.start && t <= window.end; });
    if (ca.size() < 2 || cb.empty()) {
        throw InputError("no zero crossings in the phase window");
    }
    const double omega = 2.0 * kPi * static_cast<double>(ca.size() - 1) / (ca.back() - ca.front());
    std::vector<double> lags;
    for (double ta : ca) {
        lags.push_back(omega * (nearest(cb, ta) - ta));
    }
    return circular_mean(lags);
}

double fit_decay(const std::vector<Peak>& envelope) {
    if (envelope.size() < 5) {
        throw InputError("decay fit needs at least 5 envelope points");
    }
    double st = 0.0;
    double sy = 0.0;
    for (const auto& p : envelope) {
        if (!(p.amplitude > 0.0)) {
            throw InputError("decay fit needs positive amplitudes");
        }
        st += p.t;
        sy += std::log(p.amplitude);
    }
    const double n = static_cast<double>(envelope.size());
    const double tm = st / n;
    const double ym = sy / n;
    double stt = 0.0;
    double sty = 0.0;
    for (const auto& p : envelope) {
        stt += (p.t - tm) * (p.t - tm);
        sty += (p.t - tm) * (std::log(p.amplitude) - ym);
    }
    const double span = envelope.back().t - envelope.front().t;
    if (!(span > 0.0) || stt == 0.0) {
        throw InputError("decay fit needs distinct times");
    }
    const double slope = sty / stt;
    return std::abs(slope) < 1.0 / (100.0 * span) ? 0.0 : -slope;
}

SyncReport sync_report(const TimeSeries& series, std::pair<int, int> pair, const SyncTolerances& tol) {
    const auto [ka, kb] = pair;
    if (ka < 0 || kb < 0 || ka >= series.n_dof() || kb >= series.n_dof()) {
        throw InputError("sync pair out of range");
    }
    if (tol.periods < 1) {
        throw InputError("sync needs at least one period");
    }
    const auto& a = series.charge[static_cast<std::size_t>(ka)];
    const auto& b = series.charge[static_cast<std::size_t>(kb)];
    const auto& t = series.times;
    const auto ca = zero_crossings(a, t);
    const auto cb = zero_crossings(b, t);
    const auto k = static_cast<std::size_t>(tol.periods);
    if (ca.size() < k + 1) {
        throw InputError("series too short: " + std::to_string(ca.size()) + " zero crossings for " +
                         std::to_string(tol.periods) + " periods");
    }

    SyncReport report;
    std::vector<double> spacing;
    for (std::size_t i = 0; i + 1 < ca.size(); ++i) {
        spacing.push_back(ca[i + 1] - ca[i]);
    }
    report.period = median(spacing);

    std::vector<bool> strict;
    std::vector<bool> phased;
    std::size_t sample = 0;
    for (std::size_t w = 0; w + 1 < ca.size(); ++w) {
        PeriodMetrics pm;
        pm.start = ca[w];
        while (sample < t.size() && t[sample] < ca[w]) {
            ++sample;
        }
        std::size_t ia = sample;
        std::size_t ib = sample;
        std::size_t j = sample;
        for (; j < t.size() && t[j] < ca[w + 1]; ++j) {
            if (std::abs(a[j]) > std::abs(a[ia])) {
                ia = j;
            }
            if (std::abs(b[j]) > std::abs(b[ib])) {
                ib = j;
            }
        }
        if (j == sample) {
            continue;
        }
        pm.peak_a = refine(a, t, ia).amplitude;
        pm.peak_b = refine(b, t, ib).amplitude;
        const double tb = cb.empty() ? std::numeric_limits<double>::quiet_NaN() : nearest(cb, ca[w]);
        pm.lag = std::abs(tb - ca[w]) < ca[w + 1] - ca[w] ? wrap(2.0 * kPi * (tb - ca[w]) / (ca[w + 1] - ca[w]))
                                                          : std::numeric_limits<double>::quiet_NaN();
        const bool in_phase = std::abs(pm.lag) < tol.phase_tol;
        const double ratio = pm.peak_a > 0.0 ? pm.peak_b / pm.peak_a : std::numeric_limits<double>::infinity();
        phased.push_back(in_phase);
        strict.push_back(in_phase && std::abs(ratio - 1.0) < tol.amp_tol);
        report.per_period.push_back(pm);
    }
    const std::size_t windows = report.per_period.size();
    if (windows < k) {
        throw InputError("series too short for the synchronization window");
    }

    const auto first_run = [&](const std::vector<bool>& flags) -> std::optional<std::size_t> {
        std::size_t run = 0;
        for (std::size_t i = 0; i < flags.size(); ++i) {
            run = flags[i] ? run + 1 : 0;
            if (run == k) {
                return i + 1 - k;
            }
        }
        return std::nullopt;
    };
    // phase-only lock also asks for settled peaks: each varies by less than
    // amp_tol / 5 across the run
    const auto settled_at = [&](std::size_t i) {
        if (i + k > windows) {
            return false;
        }
        double lo_a = report.per_period[i].peak_a;
        double hi_a = lo_a;
        double lo_b = report.per_period[i].peak_b;
        double hi_b = lo_b;
        for (std::size_t j = i; j < i + k; ++j) {
            lo_a = std::min(lo_a, report.per_period[j].peak_a);
            hi_a = std::max(hi_a, report.per_period[j].peak_a);
            lo_b = std::min(lo_b, report.per_period[j].peak_b);
            hi_b = std::max(hi_b, report.per_period[j].peak_b);
        }
        return hi_a - lo_a < 0.2 * tol.amp_tol * hi_a && hi_b - lo_b < 0.2 * tol.amp_tol * hi_b;
    };
    std::vector<bool> locked(windows);
    for (std::size_t i = 0; i < windows; ++i) {
        locked[i] = phased[i] && (strict[i] || settled_at(i));
    }
    const auto strict_start = first_run(strict);
    const auto phase_start = first_run(locked);
    report.strict_sync = strict_start.has_value();
    report.phase_sync = phase_start.has_value();
    if (strict_start) {
        report.transient_time = report.per_period[*strict_start].start - t.front();
    }
    if (phase_start) {
        report.phase_sync_time = report.per_period[*phase_start].start - t.front();
    }

    const std::size_t steady = strict_start ? *strict_start : phase_start ? *phase_start : windows - k;
    double sum_a = 0.0;
    double sum_b = 0.0;
    std::vector<double> lags;
    for (std::size_t i = steady; i < steady + k; ++i) {
        sum_a += report.per_period[i].peak_a;
        sum_b += report.per_period[i].peak_b;
        if (!std::isnan(report.per_period[i].lag)) {
            lags.push_back(report.per_period[i].lag);
        }
    }
    const double n = static_cast<double>(k);
    report.steady_amplitudes = {sum_a / n, sum_b / n};
    report.amplitude_ratio = sum_a > 0.0 ? sum_b / sum_a : 0.0;
    report.phase_lag = lags.empty() ? std::numeric_limits<double>::quiet_NaN() : circular_mean(lags);

    std::vector<Peak> envelope;
    for (std::size_t i = steady; i < windows; ++i) {
        const double mean = 0.5 * (report.per_period[i].peak_a + report.per_period[i].peak_b);
        if (mean > 0.0) {
            envelope.push_back({report.per_period[i].start, mean});
        }
    }
    report.decay_rate = envelope.size() >= 5 ? fit_decay(envelope) : 0.0;
    return report;
}

}  // namespace khsim
