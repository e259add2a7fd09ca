// Copyright 2026 The kpo-aqec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kpo/fit.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace kpo::fit {

namespace {

struct Model {
    double a = 0.0;
    double k = 0.0;  // rate in scaled time
    double c = 0.0;
};

double cost(const std::vector<double>& s, std::span<const double> y, const Model& m) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double r = m.a * std::exp(-m.k * s[i]) + m.c - y[i];
        sum += r * r;
    }
    return sum;
}

// Offset from three samples at the start, middle and end, assuming the
// middle sits halfway in scaled time (exact for uniform grids).
double three_point_offset(const std::vector<double>& s, std::span<const double> y) {
    const std::size_t n = s.size();
    const std::size_t mid = n / 2;
    const double y0 = y[0];
    const double y1 = y[mid];
    const double y2 = y[n - 1];
    const double denom = y0 - 2.0 * y1 + y2;
    if (std::abs(s[mid] - 0.5) > 0.05 || std::abs(denom) < 1e-14 * (std::abs(y0) + 1.0)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    // Geometric sequence: (y0 - c)(y2 - c) = (y1 - c)^2.
    return (y0 * y2 - y1 * y1) / denom;
}

Model seed(const std::vector<double>& s, std::span<const double> y) {
    const double lo = *std::min_element(y.begin(), y.end());
    const double hi = *std::max_element(y.begin(), y.end());
    const bool decaying = y.front() >= y.back();
    double c = three_point_offset(s, y);
    // The offset must lie outside the data range on the asymptote side.
    if (!std::isfinite(c) || (decaying ? c >= lo : c <= hi)) {
        c = decaying ? lo - 1e-3 * (hi - lo) : hi + 1e-3 * (hi - lo);
        if (decaying && lo > 0.0) c = std::min(c, 0.0);
    }
    const double sign = decaying ? 1.0 : -1.0;

    // log(sign (y - c)) = log|A| - k s
    double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double v = sign * (y[i] - c);
        if (!(v > 0.0)) continue;
        const double ly = std::log(v);
        sw += 1.0;
        sx += s[i];
        sy += ly;
        sxx += s[i] * s[i];
        sxy += s[i] * ly;
    }
    Model m;
    m.c = c;
    const double det = sw * sxx - sx * sx;
    if (sw < 2.0 || std::abs(det) < 1e-300) {
        m.a = y.front() - c;
        m.k = 1.0;
        return m;
    }
    const double slope = (sw * sxy - sx * sy) / det;
    m.k = -slope;
    m.a = sign * std::exp((sy - slope * sx) / sw);
    return m;
}

}  // namespace

ExponentialFit fit_exponential(std::span<const double> t, std::span<const double> y,
                               const FitOptions& options) {
    const std::size_t n = t.size();
    if (n != y.size()) throw Error(ErrorKind::invalid_argument, "fit: t and y differ in length");
    if (n < 8) throw Error(ErrorKind::invalid_argument, "fit: need at least 8 samples");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(t[i]) || !std::isfinite(y[i])) {
            throw Error(ErrorKind::invalid_argument, "fit: non-finite sample");
        }
        if (i > 0 && !(t[i] > t[i - 1])) {
            throw Error(ErrorKind::invalid_argument, "fit: times must increase");
        }
    }

    const double t0 = t.front();
    const double span = t.back() - t0;
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = (t[i] - t0) / span;

    ExponentialFit out;
    const double lo = *std::min_element(y.begin(), y.end());
    const double hi = *std::max_element(y.begin(), y.end());
    if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) {
        // No decay to fit.
        double mean = 0.0;
        for (double v : y) mean += v;
        out.offset = mean / static_cast<double>(n);
        out.converged = true;
        double r2 = 0.0;
        for (double v : y) r2 += (v - out.offset) * (v - out.offset);
        out.residual = std::sqrt(r2 / static_cast<double>(n));
        return out;
    }

    Model m = seed(s, y);
    const Model start = m;
    double f = cost(s, y, m);
    double lambda = 1e-3;
    bool converged = false;
    int it = 0;
    for (; it < options.max_iterations && !converged; ++it) {
        Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
        Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
        for (std::size_t i = 0; i < n; ++i) {
            const double e = std::exp(-m.k * s[i]);
            const double r = m.a * e + m.c - y[i];
            const Eigen::Vector3d g(e, -m.a * s[i] * e, 1.0);
            jtj += g * g.transpose();
            jtr += g * r;
        }
        bool improved = false;
        while (lambda < 1e16) {
            Eigen::Matrix3d lhs = jtj;
            for (int d = 0; d < 3; ++d) lhs(d, d) += lambda * std::max(jtj(d, d), 1e-300);
            const Eigen::Vector3d delta = lhs.ldlt().solve(-jtr);
            const Model trial{m.a + delta(0), m.k + delta(1), m.c + delta(2)};
            const double ft = cost(s, y, trial);
            if (std::isfinite(ft) && ft <= f) {
                const double change = std::abs(delta(0)) / (std::abs(m.a) + 1e-300) +
                                      std::abs(delta(1)) / (std::abs(m.k) + 1e-300) +
                                      std::abs(delta(2)) / (std::abs(m.c) + std::abs(m.a) + 1e-300);
                const double df = f - ft;
                m = trial;
                f = ft;
                lambda = std::max(lambda * 0.1, 1e-12);
                improved = true;
                if (change < options.step_tolerance || df <= 1e-30 * (f + 1e-300)) converged = true;
                break;
            }
            lambda *= 10.0;
        }
        // No downhill direction left: at a minimum to working precision.
        if (!improved) converged = true;
    }

    if (!converged || !std::isfinite(m.k)) m = start;
    out.converged = converged && std::isfinite(m.k);
    out.iterations = it;
    out.rate = m.k / span;
    out.amplitude = m.a * std::exp(out.rate * t0);
    out.offset = m.c;
    out.residual = std::sqrt(cost(s, y, m) / static_cast<double>(n));
    return out;
}

ExponentialFit fit_exponential(const lindblad::TimeSeries& series, std::string_view channel,
                               double t_min, const FitOptions& options) {
    const std::vector<double>& values = series.channel(channel);
    std::vector<double> t, y;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        if (series.times[i] < t_min) continue;
        t.push_back(series.times[i]);
        y.push_back(values[i]);
    }
    return fit_exponential(t, y, options);
}

}  // namespace kpo::fit
