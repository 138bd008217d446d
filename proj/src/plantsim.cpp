#include "frfid/plantsim.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

#include "frfid/rng.hpp"

namespace frfid {

TransferFunction TransferFunction::create(std::vector<double> num,
                                          std::vector<double> den, double dt) {
    if (num.empty() || den.empty())
        throw std::invalid_argument("transfer function: empty coefficients");
    if (den[0] == 0.0)
        throw std::invalid_argument("transfer function: leading denominator coefficient is zero");
    if (!(dt > 0.0))
        throw std::invalid_argument("transfer function: dt must be positive");
    const double a0 = den[0];
    for (auto& c : num) c /= a0;
    for (auto& c : den) c /= a0;
    return TransferFunction{std::move(num), std::move(den), dt};
}

std::vector<double> TransferFunction::pole_magnitudes() const {
    // Roots of den[0] z^{d} + den[1] z^{d-1} + ... via the companion matrix.
    std::size_t degree = den.size() - 1;
    while (degree > 0 && den[degree] == 0.0) --degree;
    if (degree == 0) return {};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(
        static_cast<Eigen::Index>(degree), static_cast<Eigen::Index>(degree));
    for (std::size_t i = 0; i < degree; ++i)
        companion(0, static_cast<Eigen::Index>(i)) = -den[i + 1] / den[0];
    for (std::size_t i = 1; i < degree; ++i)
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    const auto eig = companion.eigenvalues();
    std::vector<double> mags(degree);
    for (std::size_t i = 0; i < degree; ++i)
        mags[i] = std::abs(eig(static_cast<Eigen::Index>(i)));
    return mags;
}

bool TransferFunction::is_stable() const {
    for (double m : pole_magnitudes())
        if (m >= 1.0) return false;
    return true;
}

double TransferFunction::spectral_radius() const {
    double r = 0.0;
    for (double m : pole_magnitudes()) r = std::max(r, m);
    return r;
}

cplx TransferFunction::response(double omega) const {
    const cplx zinv = std::exp(cplx{0.0, -omega * dt});
    cplx n = 0.0, d = 0.0, zk = 1.0;
    for (std::size_t i = 0; i < std::max(num.size(), den.size()); ++i) {
        if (i < num.size()) n += num[i] * zk;
        if (i < den.size()) d += den[i] * zk;
        zk *= zinv;
    }
    if (std::abs(d) < 1e-300)
        throw std::domain_error("transfer function: pole on the unit circle at requested frequency");
    return n / d;
}

std::vector<double> simulate_lti(const TransferFunction& model,
                                 std::span<const double> input) {
    if (input.empty()) throw std::invalid_argument("simulate_lti: empty input");
    const auto& b = model.num;
    const auto& a = model.den;
    std::vector<double> y(input.size(), 0.0);
    for (std::size_t n = 0; n < input.size(); ++n) {
        double acc = 0.0;
        for (std::size_t k = 0; k < b.size() && k <= n; ++k)
            acc += b[k] * input[n - k];
        for (std::size_t k = 1; k < a.size() && k <= n; ++k)
            acc -= a[k] * y[n - k];
        y[n] = acc;  // a[0] == 1
    }
    return y;
}

std::vector<double> slow_sample(std::span<const double> fast_record,
                                std::size_t factor) {
    return downsample(fast_record, factor);
}

std::vector<double> add_noise(std::span<const double> slow_record,
                              const NoiseModel& noise,
                              std::vector<double>* realization) {
    std::vector<double> e(slow_record.size());
    Rng rng(noise.seed);
    for (auto& v : e) v = noise.sigma * rng.gauss();
    std::vector<double> v = simulate_lti(noise.filter, e);
    std::vector<double> out(slow_record.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = slow_record[i] + v[i];
    if (realization != nullptr) *realization = std::move(v);
    return out;
}

std::size_t steady_state_periods(const TransferFunction& model,
                                 std::size_t period_length) {
    if (period_length == 0)
        throw std::invalid_argument("steady_state_periods: empty period");
    const double rho = model.spectral_radius();
    if (rho >= 1.0)
        throw std::invalid_argument("steady_state_periods: model is not stable");
    if (rho == 0.0) return 1;  // FIR settles within one period
    const double per_period = static_cast<double>(period_length) * std::log(rho);
    const std::size_t p =
        static_cast<std::size_t>(std::ceil(std::log(1e-12) / per_period));
    return std::max<std::size_t>(p, 1);
}

std::vector<double> simulate_steady_state(const TransferFunction& model,
                                          std::span<const double> input_period) {
    const std::size_t n = input_period.size();
    const std::size_t discard = steady_state_periods(model, n);
    std::vector<double> u;
    u.reserve((discard + 1) * n);
    for (std::size_t p = 0; p <= discard; ++p)
        u.insert(u.end(), input_period.begin(), input_period.end());
    auto y = simulate_lti(model, u);
    return std::vector<double>(y.end() - static_cast<std::ptrdiff_t>(n), y.end());
}

}  // namespace frfid
