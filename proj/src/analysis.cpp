// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#include "qmem/analysis.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/NumericalDiff>
#include <unsupported/Eigen/LevenbergMarquardt>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qmem/error.hpp"
#include "qmem/rng.hpp"

namespace qmem::analysis {

using detail::require;
using std::numbers::ln2;
using std::numbers::pi;

namespace {

std::int64_t to_ps(double s)
{
    return std::llround(s * 1e12);
}

std::vector<double> smooth3(const std::vector<double>& v)
{
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::size_t lo = i == 0 ? 0 : i - 1;
        std::size_t hi = std::min(v.size() - 1, i + 1);
        double sum = 0;
        for (std::size_t j = lo; j <= hi; ++j)
            sum += v[j];
        out[i] = sum / static_cast<double>(hi - lo + 1);
    }
    return out;
}

// Mean of the lowest tenth of the values (at least one).
double lowest_decile_mean(const std::vector<double>& v, const std::vector<double>* err,
                          double* err_mean)
{
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::size_t n = std::max<std::size_t>(1, v.size() / 10);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<long>(n), idx.end(),
                      [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    double sum = 0, esum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += v[idx[i]];
        if (err)
            esum += (*err)[idx[i]];
    }
    if (err_mean)
        *err_mean = esum / static_cast<double>(n);
    return sum / static_cast<double>(n);
}

std::vector<double> poisson_errors(const CoincidenceHistogram& h)
{
    std::vector<double> e;
    e.reserve(h.counts.size());
    for (std::uint64_t c : h.counts)
        e.push_back(std::sqrt(std::max<double>(static_cast<double>(c), 1.0)));
    return e;
}

std::vector<double> as_double(const CoincidenceHistogram& h)
{
    return {h.counts.begin(), h.counts.end()};
}

void check_curve(const std::vector<double>& taus, const std::vector<double>& values,
                 const std::vector<double>& errors)
{
    require(taus.size() == values.size() && taus.size() == errors.size(),
            "curve: taus, values and errors differ in length");
    for (std::size_t i = 1; i < taus.size(); ++i)
        require(taus[i] > taus[i - 1], "curve: taus must increase");
}

// Model parameters: floor, A, τ_peak [ns], ln ν+ [MHz], ln ν- [MHz].
double model(const Eigen::VectorXd& x, double tau_ns)
{
    double dt = tau_ns - x[2];
    double nu = std::exp(dt >= 0 ? x[3] : x[4]);
    return x[0] + x[1] * std::exp(-2 * pi * nu * std::abs(dt) * 1e-3);
}

struct Residuals {
    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    using QRSolver = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

    const std::vector<double>* taus_ns;
    const std::vector<double>* ys;
    const std::vector<double>* errors;

    int inputs() const { return 5; }
    int values() const { return static_cast<int>(taus_ns->size()); }

    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const
    {
        for (int i = 0; i < values(); ++i)
            f[i] = ((*ys)[i] - model(x, (*taus_ns)[i])) / (*errors)[i];
        return 0;
    }
};

// Distance from the peak to where the smoothed curve first drops to `level`.
double half_width(const std::vector<double>& taus, const std::vector<double>& v,
                  std::size_t peak, double level, int dir)
{
    long i = static_cast<long>(peak);
    long n = static_cast<long>(v.size());
    while (i + dir >= 0 && i + dir < n && v[i] > level)
        i += dir;
    return std::abs(taus[i] - taus[peak]);
}

}  // namespace

std::uint64_t CoincidenceHistogram::total() const
{
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::vector<std::int64_t> channel_times(const std::vector<TimeTag>& tags, Channel c)
{
    std::vector<std::int64_t> t;
    for (const TimeTag& tag : tags)
        if (tag.channel == c)
            t.push_back(tag.time_ps);
    return t;
}

CoincidenceHistogram histogram(const std::vector<std::int64_t>& a,
                               const std::vector<std::int64_t>& b,
                               double bin_width_s, double tau_min_s,
                               double tau_max_s, double duration_s)
{
    require(bin_width_s > 0, "histogram: bin width must be > 0");
    require(tau_max_s > tau_min_s, "histogram: empty tau range");
    require(duration_s > 0, "histogram: duration must be > 0");
    const std::int64_t bin = to_ps(bin_width_s);
    const std::int64_t lo = to_ps(tau_min_s);
    const std::int64_t hi = to_ps(tau_max_s);
    require(bin > 0, "histogram: bin width below 1 ps");
    require((hi - lo) % bin == 0, "histogram: range is not a whole number of bins");
    const auto nbins = static_cast<std::size_t>((hi - lo) / bin);

    CoincidenceHistogram h;
    h.bin_width_s = bin * 1e-12;
    h.duration_s = duration_s;
    h.singles = {a.size(), b.size(), a.size() / duration_s, b.size() / duration_s};
    if (a.empty() || b.empty())
        return h;
    h.counts.assign(nbins, 0);
    h.taus.resize(nbins);
    for (std::size_t k = 0; k < nbins; ++k)
        h.taus[k] = (lo + (static_cast<double>(k) + 0.5) * bin) * 1e-12;

    std::size_t j = 0;
    for (std::int64_t ta : a) {
        while (j < b.size() && b[j] < ta + lo)
            ++j;
        for (std::size_t k = j; k < b.size() && b[k] < ta + hi; ++k)
            ++h.counts[static_cast<std::size_t>((b[k] - ta - lo) / bin)];
    }
    return h;
}

CoincidenceHistogram histogram(const std::vector<TimeTag>& tags, Channel a,
                               Channel b, double bin_width_s, double tau_min_s,
                               double tau_max_s, double duration_s)
{
    return histogram(channel_times(tags, a), channel_times(tags, b), bin_width_s,
                     tau_min_s, tau_max_s, duration_s);
}

CoincidenceHistogram rebin2(const CoincidenceHistogram& hist)
{
    CoincidenceHistogram out = hist;
    out.bin_width_s = 2 * hist.bin_width_s;
    out.counts.clear();
    out.taus.clear();
    for (std::size_t k = 0; k + 1 < hist.counts.size(); k += 2) {
        out.counts.push_back(hist.counts[k] + hist.counts[k + 1]);
        out.taus.push_back(0.5 * (hist.taus[k] + hist.taus[k + 1]));
    }
    return out;
}

WindowCounts window_counts(const CoincidenceHistogram& hist, double window_s,
                           double center_s)
{
    require(window_s > 0, "window: width must be > 0");
    require(!hist.taus.empty(), "window: empty histogram");
    const double half = window_s / 2;
    const double eps = 1e-3 * hist.bin_width_s;
    require(center_s - half >= hist.taus.front() - hist.bin_width_s / 2 - eps
                && center_s + half <= hist.taus.back() + hist.bin_width_s / 2 + eps,
            "window: outside the histogram range");
    WindowCounts w;
    double sum_t = 0, sum_t2 = 0;
    for (std::size_t k = 0; k < hist.taus.size(); ++k) {
        double d = hist.taus[k] - center_s;
        if (d < -half - eps || d >= half - eps)
            continue;
        auto c = static_cast<double>(hist.counts[k]);
        w.coincidences += hist.counts[k];
        sum_t += c * hist.taus[k];
        sum_t2 += c * hist.taus[k] * hist.taus[k];
    }
    if (w.coincidences > 0) {
        auto n = static_cast<double>(w.coincidences);
        w.mean_tau_s = sum_t / n;
        double var = std::max(0.0, sum_t2 / n - w.mean_tau_s * w.mean_tau_s);
        w.mean_tau_error_s = std::sqrt(var / n);
    }
    return w;
}

WitnessResult g2_windowed(const CoincidenceHistogram& hist, double window_s,
                          double center_s)
{
    require(hist.singles.count_a > 0 && hist.singles.count_b > 0,
            "g2: a channel has no singles");
    const double half = window_s / 2;
    const double eps = 1e-3 * hist.bin_width_s;
    std::size_t bins = 0;
    for (double t : hist.taus)
        if (t - center_s >= -half - eps && t - center_s < half - eps)
            ++bins;
    require(bins > 0, "g2: window holds no bins");
    WindowCounts w = window_counts(hist, window_s, center_s);

    const double width = static_cast<double>(bins) * hist.bin_width_s;
    const auto na = static_cast<double>(hist.singles.count_a);
    const auto nb = static_cast<double>(hist.singles.count_b);
    const auto c = static_cast<double>(w.coincidences);
    const double scale = hist.duration_s / (na * nb * width);
    WitnessResult r;
    r.value = c * scale;
    r.statistical_error = c > 0 ? r.value * std::sqrt(1 / c + 1 / na + 1 / nb) : scale;
    r.classical_bound = 2;
    r.violated = r.value > r.classical_bound;
    return r;
}

WitnessResult g2_sidebands(const CoincidenceHistogram& hist, double window_s,
                           double center_s, int n_side, bool preceding_only)
{
    require(n_side >= 1, "g2 sidebands: need at least one side window");
    require(!hist.counts.empty(), "g2 sidebands: empty histogram");
    auto peak = static_cast<double>(window_counts(hist, window_s, center_s).coincidences);
    double ref = 0;
    if (preceding_only) {
        for (int j = 2; j <= n_side + 1; ++j)
            ref += static_cast<double>(
                window_counts(hist, window_s, center_s - j * window_s).coincidences);
    } else {
        for (int j = 2; j <= n_side + 1; ++j)
            for (int sign : {-1, 1})
                ref += static_cast<double>(
                    window_counts(hist, window_s, center_s + sign * j * window_s)
                        .coincidences);
    }
    const double n_ref = preceding_only ? n_side : 2.0 * n_side;
    const double level = std::max(ref, 1.0) / n_ref;

    WitnessResult r;
    r.value = peak / level;
    r.statistical_error = r.value * std::sqrt((peak > 0 ? 1 / peak : 0) + 1 / std::max(ref, 1.0));
    if (peak == 0)
        r.statistical_error = 1 / level;
    r.classical_bound = 2;
    r.violated = r.value > r.classical_bound;
    return r;
}

ExponentialFit fit_two_sided_exponential(const CoincidenceHistogram& hist)
{
    // Count-based weights bias low-count tails; reweight with the fitted
    // model (Pearson weights) a few times.
    std::vector<double> y = as_double(hist);
    std::vector<double> err = poisson_errors(hist);
    ExponentialFit fit = fit_two_sided_exponential(hist.taus, y, err);
    for (int pass = 0; pass < 3; ++pass) {
        for (std::size_t i = 0; i < y.size(); ++i) {
            double t = hist.taus[i] - fit.tau_peak_s;
            double nu = t >= 0 ? fit.nu_plus_hz : fit.nu_minus_hz;
            double m = fit.floor + fit.amplitude * std::exp(-2 * pi * nu * std::abs(t));
            err[i] = std::sqrt(std::max(m, 0.25));
        }
        fit = fit_two_sided_exponential(hist.taus, y, err);
    }
    return fit;
}

ExponentialFit fit_two_sided_exponential(const std::vector<double>& taus,
                                         const std::vector<double>& values,
                                         const std::vector<double>& errors)
{
    check_curve(taus, values, errors);
    require(taus.size() >= 8, "fit: need at least 8 points");
    for (double e : errors)
        require(e > 0, "fit: errors must be > 0");

    std::vector<double> sm = smooth3(values);
    double floor_err = 0;
    const double floor = lowest_decile_mean(sm, &errors, &floor_err);
    const auto peak = static_cast<std::size_t>(
        std::max_element(sm.begin(), sm.end()) - sm.begin());
    require(values[peak] - floor > 3 * errors[peak] && sm[peak] - floor > 3 * floor_err,
            "fit: no significant peak above the floor");

    const double amp = sm[peak] - floor;
    const double level = floor + amp / 2;
    const double bin = taus.size() > 1 ? taus[1] - taus[0] : 1e-9;
    double wp = std::max(half_width(taus, sm, peak, level, +1), bin);
    double wm = std::max(half_width(taus, sm, peak, level, -1), bin);

    std::vector<double> taus_ns(taus.size());
    std::transform(taus.begin(), taus.end(), taus_ns.begin(),
                   [](double t) { return t * 1e9; });
    Eigen::VectorXd x(5);
    x << floor, amp, taus[peak] * 1e9, std::log(ln2 / (2 * pi * wp) * 1e-6),
        std::log(ln2 / (2 * pi * wm) * 1e-6);

    Residuals fn{&taus_ns, &values, &errors};
    Eigen::NumericalDiff<Residuals> diff(fn);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Residuals>> lm(diff);
    lm.setMaxfev(4000);
    lm.minimize(x);

    Eigen::VectorXd f(fn.values());
    fn(x, f);
    Eigen::MatrixXd jac(fn.values(), 5);
    diff.df(x, jac);
    const double dof = std::max(1, fn.values() - 5);
    const double chi2 = f.squaredNorm() / dof;
    Eigen::MatrixXd cov = (jac.transpose() * jac).completeOrthogonalDecomposition().pseudoInverse();
    cov *= std::max(1.0, chi2);

    ExponentialFit r;
    r.floor = x[0];
    r.amplitude = x[1];
    r.tau_peak_s = x[2] * 1e-9;
    r.nu_plus_hz = std::exp(x[3]) * 1e6;
    r.nu_minus_hz = std::exp(x[4]) * 1e6;
    r.nu_plus_error_hz = r.nu_plus_hz * std::sqrt(std::max(0.0, cov(3, 3)));
    r.nu_minus_error_hz = r.nu_minus_hz * std::sqrt(std::max(0.0, cov(4, 4)));
    r.chi2_per_dof = chi2;
    require(r.amplitude > 0 && std::isfinite(r.nu_plus_hz) && std::isfinite(r.nu_minus_hz),
            "fit: did not converge to a peak");
    r.fwhm_s = ln2 / (2 * pi * r.nu_plus_hz) + ln2 / (2 * pi * r.nu_minus_hz);
    if (r.amplitude > r.floor) {
        double half = (r.floor + r.amplitude) / 2;
        double l = std::log(r.amplitude / (half - r.floor)) / (2 * pi);
        r.fwhm_with_floor_s = l / r.nu_plus_hz + l / r.nu_minus_hz;
    }
    return r;
}

double oscillation_period(const CoincidenceHistogram& hist)
{
    return oscillation_period(hist.taus, as_double(hist), poisson_errors(hist));
}

double oscillation_period(const std::vector<double>& taus,
                          const std::vector<double>& values,
                          const std::vector<double>& errors)
{
    check_curve(taus, values, errors);
    require(taus.size() >= 5, "oscillation: curve too short");
    std::vector<double> sm = smooth3(values);
    double noise = 0;
    const double floor = lowest_decile_mean(sm, &errors, &noise);
    // Weak side lobes of a mode cluster must not pass as comb peaks.
    const double top = *std::max_element(sm.begin(), sm.end());
    const double threshold = std::max(floor + 3 * noise, floor + 0.25 * (top - floor));

    std::vector<std::size_t> cand;
    for (std::size_t i = 1; i + 1 < sm.size(); ++i)
        if (sm[i] > sm[i - 1] && sm[i] >= sm[i + 1] && sm[i] > threshold)
            cand.push_back(i);
    require(cand.size() >= 3, "oscillation: fewer than three peaks");
    std::sort(cand.begin(), cand.end(),
              [&](std::size_t a, std::size_t b) { return sm[a] > sm[b]; });

    // Suppress side lobes: nothing within 0.6 of the spacing of the two
    // highest peaks from an already accepted, higher peak.
    const double min_gap = 0.6 * std::abs(taus[cand[0]] - taus[cand[1]]);
    std::vector<double> peaks;
    for (std::size_t i : cand) {
        bool clear = std::all_of(peaks.begin(), peaks.end(), [&](double t) {
            return std::abs(t - taus[i]) >= min_gap;
        });
        if (clear)
            peaks.push_back(taus[i]);
    }
    require(peaks.size() >= 3, "oscillation: fewer than three resolved peaks");
    std::sort(peaks.begin(), peaks.end());

    std::vector<double> gaps;
    for (std::size_t i = 1; i < peaks.size(); ++i)
        gaps.push_back(peaks[i] - peaks[i - 1]);
    std::vector<double> sorted = gaps;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2),
                     sorted.end());
    const double typical = sorted[sorted.size() / 2];
    // Gaps spanning a missed peak count as several periods.
    double span = 0, periods = 0;
    for (double g : gaps) {
        span += g;
        periods += std::max(1.0, std::round(g / typical));
    }
    return span / periods;
}

double full_width_half_maximum(const std::vector<double>& taus,
                               const std::vector<double>& values)
{
    require(taus.size() == values.size() && taus.size() >= 3,
            "fwhm: need at least three points");
    const auto peak = static_cast<std::size_t>(
        std::max_element(values.begin(), values.end()) - values.begin());
    const double half = values[peak] / 2;
    auto crossing = [&](int dir) {
        long i = static_cast<long>(peak);
        long n = static_cast<long>(values.size());
        while (i + dir >= 0 && i + dir < n && values[i + dir] > half)
            i += dir;
        require(i + dir >= 0 && i + dir < n, "fwhm: curve does not fall to half maximum");
        double y0 = values[i], y1 = values[i + dir];
        return taus[i] + (y0 - half) / (y0 - y1) * (taus[i + dir] - taus[i]);
    };
    return crossing(+1) - crossing(-1);
}

std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>
hbt_split(const std::vector<TimeTag>& tags, Channel c, std::uint64_t seed)
{
    std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> arms;
    std::uint64_t index = 0;
    for (const TimeTag& t : tags) {
        if (t.channel != c)
            continue;
        CounterRng rng(seed, RngStream::split, index++ * 4 + static_cast<std::uint64_t>(c));
        (rng.uniform() < 0.5 ? arms.first : arms.second).push_back(t.time_ps);
    }
    return arms;
}

WitnessResult g2_auto(const std::vector<TimeTag>& tags, Channel c,
                      double window_s, double duration_s, std::uint64_t seed)
{
    auto [a, b] = hbt_split(tags, c, seed);
    CoincidenceHistogram h =
        histogram(a, b, window_s, -window_s / 2, window_s / 2, duration_s);
    return g2_windowed(h, window_s, 0);
}

WitnessResult cauchy_schwarz_from_tags(const std::vector<TimeTag>& tags,
                                       double window_s, double duration_s,
                                       std::uint64_t seed)
{
    WitnessResult si = g2_windowed(histogram(tags, Channel::idler, Channel::signal,
                                             window_s, -window_s / 2, window_s / 2,
                                             duration_s),
                                   window_s, 0);
    WitnessResult ss = g2_auto(tags, Channel::signal, window_s, duration_s, seed);
    WitnessResult ii = g2_auto(tags, Channel::idler, window_s, duration_s, seed);
    require(ss.value > 0 && ii.value > 0,
            "cauchy-schwarz: no autocorrelation coincidences in the window");

    WitnessResult r;
    r.value = si.value * si.value / (ss.value * ii.value);
    double rel_si = si.statistical_error / si.value;
    double rel_ss = ss.statistical_error / ss.value;
    double rel_ii = ii.statistical_error / ii.value;
    r.statistical_error = r.value * std::sqrt(4 * rel_si * rel_si + rel_ss * rel_ss
                                              + rel_ii * rel_ii);
    r.classical_bound = 1;
    r.violated = r.value > r.classical_bound;
    return r;
}

Estimate echo_efficiency(const CoincidenceHistogram& memory_run,
                         const CoincidenceHistogram& reference, double window_s,
                         double echo_delay_s)
{
    auto ref = static_cast<double>(window_counts(reference, window_s, 0).coincidences);
    require(ref > 0, "echo efficiency: no reference coincidences");
    auto echo = static_cast<double>(
        window_counts(memory_run, window_s, echo_delay_s).coincidences);
    double v = echo / ref;
    return {v, std::sqrt(std::max(v * (1 - v), 1 / ref) / ref)};
}

double franson_fringe(double phase_s, double phase_i, double visibility)
{
    require(visibility >= 0 && visibility <= 1, "franson: visibility must lie in [0,1]");
    return (1 + visibility * std::cos(phase_s + phase_i)) / 2;
}

WitnessResult chsh_from_visibility(double visibility, double visibility_error)
{
    require(visibility >= 0 && visibility <= 1, "chsh: visibility must lie in [0,1]");
    require(visibility_error >= 0, "chsh: error must be >= 0");
    WitnessResult r;
    r.value = 2 * std::numbers::sqrt2 * visibility;
    r.statistical_error = 2 * std::numbers::sqrt2 * visibility_error;
    r.classical_bound = 2;
    // Compared on V so the flip sits exactly at 1/√2.
    r.violated = visibility > 1 / std::numbers::sqrt2;
    return r;
}

Concurrence concurrence(double visibility, double p00, double p01, double p10,
                        double p11)
{
    require(visibility >= 0 && visibility <= 1,
            "concurrence: visibility must lie in [0,1]");
    for (double p : {p00, p01, p10, p11})
        require(p >= 0 && p <= 1, "concurrence: probabilities must lie in [0,1]");
    require(p00 + p01 + p10 + p11 <= 1 + 1e-9, "concurrence: probabilities sum above 1");
    double raw = visibility * (p10 + p01) - std::sqrt(2 * p00 * p11);
    return {std::max(0.0, raw), raw};
}

double mu1(double noise_prob_per_window, double eta_total)
{
    require(eta_total > 0, "mu1: efficiency must be > 0");
    require(noise_prob_per_window >= 0, "mu1: noise probability must be >= 0");
    return noise_prob_per_window / eta_total;
}

HeraldCompatibility herald_compatibility(double mu1, double eta_herald,
                                         double threshold)
{
    require(eta_herald > 0 && eta_herald <= 1,
            "herald compatibility: efficiency must lie in (0,1]");
    require(mu1 >= 0, "herald compatibility: mu1 must be >= 0");
    double ratio = mu1 / eta_herald;
    return {ratio, ratio < threshold};
}

}  // namespace qmem::analysis
