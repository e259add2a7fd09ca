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

#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta pair with FSAL and PI step-size
// control, for complex matrix-valued ODEs y' = f(t, y).

#include <algorithm>
#include <cmath>
#include <string>

#include "kpo/fock.hpp"

namespace kpo::lindblad {

struct StepControl {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double initial_step = 0.0;  // 0: automatic
    double max_step = 0.0;      // 0: unbounded
    long max_steps = 500'000'000;
};

struct StepStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evaluations = 0;
};

template <class Rhs>
class Dopri5 {
public:
    Dopri5(Rhs rhs, StepControl control) : rhs_(std::move(rhs)), ctl_(control) {}

    const StepStats& stats() const { return stats_; }
    double step_size() const { return h_; }

    /// Advance (t, y) to exactly t_end.
    void integrate_to(double& t, Matrix& y, double t_end) {
        if (t_end <= t) return;
        if (!fsal_valid_) {
            eval(t, y, k1_);
            fsal_valid_ = true;
            if (h_ <= 0.0) h_ = ctl_.initial_step > 0.0 ? ctl_.initial_step : initial_step(t, y);
        }
        while (t < t_end) {
            const double remaining = t_end - t;
            const double min_step = 1e-14 * std::max(std::abs(t), std::abs(t_end));
            // Sample grids built by accumulation can leave a rounding-sized gap.
            if (remaining <= min_step) {
                t = t_end;
                break;
            }
            bool clipped = false;
            double h = h_;
            if (ctl_.max_step > 0.0) h = std::min(h, ctl_.max_step);
            if (h >= remaining) {
                clipped = h > remaining;
                h = remaining;
            }
            if (h < min_step) {
                throw Error(ErrorKind::step_underflow,
                            "step size " + std::to_string(h) + " s underflowed at t = " +
                                std::to_string(t) + " s");
            }
            if (stats_.accepted + stats_.rejected >= ctl_.max_steps) {
                throw Error(ErrorKind::step_underflow,
                            "step budget exhausted at t = " + std::to_string(t) + " s");
            }

            const double err = attempt(t, y, h);
            if (err <= 1.0) {
                ++stats_.accepted;
                t = (h == remaining) ? t_end : t + h;
                y.swap(y_new_);
                k1_.swap(k7_);
                const double fac = std::clamp(
                    kSafety * std::pow(std::max(err, 1e-10), -kAlpha) * std::pow(err_prev_, kBeta),
                    kMinFactor, last_rejected_ ? 1.0 : kMaxFactor);
                err_prev_ = std::max(err, 1e-4);
                // A step shortened only to land on t_end keeps the previous proposal.
                const double proposal = h * fac;
                h_ = clipped ? std::max(h_, proposal) : proposal;
                last_rejected_ = false;
            } else {
                ++stats_.rejected;
                h_ = h * std::max(kMinFactor, kSafety * std::pow(err, -0.2));
                last_rejected_ = true;
            }
        }
    }

private:
    static constexpr double kSafety = 0.9;
    static constexpr double kAlpha = 0.2 - 0.04 * 0.75;
    static constexpr double kBeta = 0.04;
    static constexpr double kMinFactor = 0.2;
    static constexpr double kMaxFactor = 10.0;

    void eval(double t, const Matrix& y, Matrix& out) {
        ++stats_.rhs_evaluations;
        rhs_(t, y, out);
    }

    // RMS of error / (atol + rtol * max(|y|, |y_new|)) over real components.
    double error_norm(const Matrix& y, const Matrix& y_new, const Matrix& e) const {
        double s = 0.0;
        const auto n = y.size();
        const cplx* py = y.data();
        const cplx* pn = y_new.data();
        const cplx* pe = e.data();
        for (Eigen::Index i = 0; i < n; ++i) {
            // sqrt(norm) rather than abs(): hypot is several times slower here.
            const double sc = ctl_.abs_tol + ctl_.rel_tol * std::sqrt(std::max(std::norm(py[i]),
                                                                              std::norm(pn[i])));
            const double re = pe[i].real() / sc;
            const double im = pe[i].imag() / sc;
            s += re * re + im * im;
        }
        return std::sqrt(s / (2.0 * static_cast<double>(n)));
    }

    double rms_scaled(const Matrix& v, const Matrix& y) const {
        double s = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            const double sc = ctl_.abs_tol + ctl_.rel_tol * std::sqrt(std::norm(y.data()[i]));
            s += std::norm(v.data()[i]) / (sc * sc);
        }
        return std::sqrt(s / (2.0 * static_cast<double>(v.size())));
    }

    double initial_step(double t, const Matrix& y) {
        const double d0 = rms_scaled(y, y);
        const double d1 = rms_scaled(k1_, y);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        tmp_ = y + h0 * k1_;
        eval(t + h0, tmp_, k2_);
        const double d2 = rms_scaled(k2_ - k1_, y) / h0;
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        return std::min(100.0 * h0, h1);
    }

    double attempt(double t, const Matrix& y, double h) {
        // Dormand-Prince coefficients.
        constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        constexpr double a21 = 1.0 / 5;
        constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                         a54 = -212.0 / 729;
        constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                         a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                         a75 = -2187.0 / 6784, a76 = 11.0 / 84;
        constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                         e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

        tmp_ = y + (h * a21) * k1_;
        eval(t + c2 * h, tmp_, k2_);
        tmp_ = y + h * (a31 * k1_ + a32 * k2_);
        eval(t + c3 * h, tmp_, k3_);
        tmp_ = y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
        eval(t + c4 * h, tmp_, k4_);
        tmp_ = y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
        eval(t + c5 * h, tmp_, k5_);
        tmp_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
        eval(t + h, tmp_, k6_);
        y_new_ = y + h * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
        eval(t + h, y_new_, k7_);
        tmp_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
        const double err = error_norm(y, y_new_, tmp_);
        if (!std::isfinite(err)) return 1e10;
        return err;
    }

    Rhs rhs_;
    StepControl ctl_;
    StepStats stats_;
    double h_ = 0.0;
    double err_prev_ = 1e-4;
    bool fsal_valid_ = false;
    bool last_rejected_ = false;
    Matrix k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, y_new_;
};

}  // namespace kpo::lindblad
