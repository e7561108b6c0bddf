#include "canal/filters.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <vector>

#include "canal/errors.hpp"

namespace canal {

namespace {

using cplx = std::complex<double>;

std::vector<cplx> poly_from_roots(const std::vector<cplx>& roots) {
    std::vector<cplx> p{1.0};
    for (const cplx& r : roots) {
        std::vector<cplx> q(p.size() + 1, 0.0);
        for (std::size_t k = 0; k < p.size(); ++k) {
            q[k] += p[k];
            q[k + 1] -= p[k] * r;
        }
        p = std::move(q);
    }
    return p;
}

}  // namespace

IIRFilterCoeffs design_butterworth(int order, double cutoff_rad_s, double sample_period_s) {
    if (order != 3) throw config_error("only third-order Butterworth designs are supported");
    if (sample_period_s <= 0.0) throw config_error("sample period must be positive");
    const double nyquist = std::numbers::pi / sample_period_s;
    if (!(cutoff_rad_s > 0.0) || cutoff_rad_s >= nyquist) {
        throw config_error("cutoff must lie strictly between 0 and the Nyquist rate");
    }

    // Analog prototype poles, evenly spaced on the left half of the circle
    // of radius cutoff_rad_s.
    const int n = order;
    std::vector<cplx> pa(n);
    for (int k = 1; k <= n; ++k) {
        const double theta =
            std::numbers::pi / 2.0 + (2.0 * k - 1.0) * std::numbers::pi / (2.0 * n);
        pa[k - 1] = cutoff_rad_s * std::exp(cplx(0.0, theta));
    }

    // Partial fractions of the unit-DC prototype, then z-domain residue sum:
    // H(z) = T * sum_k r_k / (1 - exp(p_k T) z^-1).
    cplx dc_num = 1.0;
    for (const cplx& p : pa) dc_num *= -p;
    std::vector<cplx> residues(n);
    for (int i = 0; i < n; ++i) {
        cplx denom = 1.0;
        for (int j = 0; j < n; ++j) {
            if (j != i) denom *= pa[i] - pa[j];
        }
        residues[i] = dc_num / denom;
    }
    std::vector<cplx> zpoles(n);
    for (int i = 0; i < n; ++i) zpoles[i] = std::exp(pa[i] * sample_period_s);

    std::vector<cplx> den = poly_from_roots(zpoles);
    std::vector<cplx> num(n, 0.0);
    for (int i = 0; i < n; ++i) {
        std::vector<cplx> others;
        for (int j = 0; j < n; ++j) {
            if (j != i) others.push_back(zpoles[j]);
        }
        const std::vector<cplx> q = poly_from_roots(others);
        for (std::size_t k = 0; k < q.size(); ++k) num[k] += residues[i] * q[k];
    }

    IIRFilterCoeffs out;
    out.cutoff_rad_s = cutoff_rad_s;
    out.sample_period_s = sample_period_s;
    double bsum = 0.0, asum = 0.0;
    for (int k = 0; k <= n; ++k) {
        out.a[static_cast<std::size_t>(k)] = den[static_cast<std::size_t>(k)].real();
        asum += out.a[static_cast<std::size_t>(k)];
    }
    for (int k = 0; k < n; ++k) {
        out.b[static_cast<std::size_t>(k)] = sample_period_s * num[static_cast<std::size_t>(k)].real();
        bsum += out.b[static_cast<std::size_t>(k)];
    }
    out.b[3] = 0.0;
    const double scale = asum / bsum;  // exact unit DC gain
    for (double& bk : out.b) bk *= scale;
    return out;
}

double filter_step(IIRFilterState& state, const IIRFilterCoeffs& c, double x) {
    const double y = c.b[0] * x + state.s[0];
    state.s[0] = c.b[1] * x - c.a[1] * y + state.s[1];
    state.s[1] = c.b[2] * x - c.a[2] * y + state.s[2];
    state.s[2] = c.b[3] * x - c.a[3] * y;
    return y;
}

double magnitude_db(const IIRFilterCoeffs& c, double omega_rad_s) {
    const cplx zinv = std::exp(cplx(0.0, -omega_rad_s * c.sample_period_s));
    cplx num = 0.0, den = 0.0, zp = 1.0;
    for (int k = 0; k <= 3; ++k) {
        num += c.b[static_cast<std::size_t>(k)] * zp;
        den += c.a[static_cast<std::size_t>(k)] * zp;
        zp *= zinv;
    }
    return 20.0 * std::log10(std::abs(num / den));
}

std::string export_filter_coeffs(const IIRFilterCoeffs& c) {
    std::ostringstream out;
    char buf[64];
    auto row = [&](const char* name, const std::array<double, 4>& xs) {
        out << name << ":";
        for (double x : xs) {
            std::snprintf(buf, sizeof buf, " %.17g", x);
            out << buf;
        }
        out << "\n";
    };
    row("b", c.b);
    row("a", c.a);
    std::snprintf(buf, sizeof buf, "cutoff_rad_s: %.17g\n", c.cutoff_rad_s);
    out << buf;
    std::snprintf(buf, sizeof buf, "sample_period_s: %.17g\n", c.sample_period_s);
    out << buf;
    return out.str();
}

IIRFilterCoeffs import_filter_coeffs(const std::string& text) {
    IIRFilterCoeffs c;
    std::istringstream in(text);
    std::string key;
    bool got_b = false, got_a = false;
    while (in >> key) {
        if (key == "b:") {
            for (double& x : c.b) in >> x;
            got_b = true;
        } else if (key == "a:") {
            for (double& x : c.a) in >> x;
            got_a = true;
        } else if (key == "cutoff_rad_s:") {
            in >> c.cutoff_rad_s;
        } else if (key == "sample_period_s:") {
            in >> c.sample_period_s;
        } else {
            throw config_error("unknown key in filter coefficient text: " + key);
        }
        if (!in) throw config_error("malformed filter coefficient text");
    }
    if (!got_b || !got_a) throw config_error("filter coefficient text missing b or a row");
    return c;
}

double kalman_stationary_variance(double r1, double r2) {
    if (r1 < 0.0 || r2 < 0.0) throw config_error("noise variances must be >= 0");
    if (r1 == 0.0 && r2 == 0.0) throw config_error("at least one noise variance must be positive");
    return (r1 + std::sqrt(r1 * r1 + 4.0 * r1 * r2)) / 2.0;
}

double kalman_gain(double r1, double r2) {
    const double p = kalman_stationary_variance(r1, r2);
    if (p == 0.0) return 0.0;  // r1 == 0: pure model trust
    return p / (p + r2);
}

LevelEstimator::LevelEstimator(const KalmanParams& params, double initial_level)
    : params_(params), gain_(kalman_gain(params.r1, params.r2)), prior_(initial_level) {
    params_.model.validate();
}

KalmanUpdate LevelEstimator::update(double y_meas, double u_in_lagged, double u_out_lagged,
                                    double d_lagged) {
    const double posterior = prior_ + gain_ * (y_meas - prior_);
    prior_ = posterior + params_.model.b * u_in_lagged -
             params_.model.c * (u_out_lagged - d_lagged);
    return {posterior, prior_};
}

}  // namespace canal
