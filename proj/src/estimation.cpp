#include "doppler/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "doppler/constants.hpp"

namespace doppler {

double FitResult::parameter(std::string_view name) const
{
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name)
            return parameters[i];
    throw ValidationError(fmt::format("fit has no parameter '{}'", name));
}

double FitResult::standard_error(std::string_view name) const
{
    if (!standard_errors)
        throw RuntimeFailure("standard errors are only available for converged fits");
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name)
            return (*standard_errors)[i];
    throw ValidationError(fmt::format("fit has no parameter '{}'", name));
}

FitResult levenberg_marquardt(const ScalarModel& model, std::span<const double> x,
                              std::span<const double> y, std::optional<std::span<const double>> sigma,
                              std::vector<std::string> names, std::vector<double> initial,
                              const LeastSquaresOptions& options)
{
    using Eigen::MatrixXd;
    using Eigen::VectorXd;

    const auto n = static_cast<Eigen::Index>(x.size());
    const auto p = static_cast<Eigen::Index>(initial.size());
    if (y.size() != x.size() || (sigma && sigma->size() != x.size()))
        throw ValidationError("least squares: x, y and sigma must have equal length");
    if (names.size() != initial.size())
        throw ValidationError("least squares: one name per parameter");
    if (n < p)
        throw ValidationError("least squares: fewer data points than parameters");
    if (sigma)
        for (double s : *sigma)
            if (!(s > 0.0))
                throw ValidationError("least squares: uncertainties must be positive");

    // Parameters are optimized in units of their starting magnitude.
    VectorXd scale(p);
    for (Eigen::Index j = 0; j < p; ++j)
        scale[j] = initial[j] != 0.0 ? std::abs(initial[j]) : 1.0;

    std::vector<double> work(initial);
    auto weight = [&](Eigen::Index i) { return sigma ? (*sigma)[i] : 1.0; };
    auto residuals = [&](const VectorXd& q, VectorXd& r) {
        for (Eigen::Index j = 0; j < p; ++j)
            work[j] = q[j] * scale[j];
        for (Eigen::Index i = 0; i < n; ++i)
            r[i] = (y[i] - model(x[i], work)) / weight(i);
        return r.allFinite();
    };
    auto jacobian = [&](const VectorXd& q, const VectorXd& r0, MatrixXd& jac) {
        VectorXd r(n);
        for (Eigen::Index j = 0; j < p; ++j) {
            VectorXd qh = q;
            const double h = options.relative_step * std::max(std::abs(q[j]), 1e-3);
            qh[j] += h;
            residuals(qh, r);
            // Residuals are y - f, so the model Jacobian is -(dr/dq).
            jac.col(j) = -(r - r0) / h;
        }
    };

    VectorXd q = VectorXd::Ones(p);
    for (Eigen::Index j = 0; j < p; ++j)
        if (initial[j] == 0.0)
            q[j] = 0.0;
    VectorXd r(n);
    if (!residuals(q, r))
        throw ValidationError("least squares: model is not finite at the initial parameters");
    double cost = r.squaredNorm();

    MatrixXd jac(n, p);
    double lambda = options.initial_damping;
    FitResult out;
    out.names = std::move(names);
    bool converged = false;
    int iter = 0;

    for (; iter < options.max_iterations && !converged; ++iter) {
        jacobian(q, r, jac);
        const MatrixXd jtj = jac.transpose() * jac;
        const VectorXd jtr = jac.transpose() * r;
        bool accepted = false;
        while (!accepted) {
            MatrixXd a = jtj;
            for (Eigen::Index j = 0; j < p; ++j)
                a(j, j) += lambda * std::max(jtj(j, j), 1e-300);
            const VectorXd delta = a.ldlt().solve(jtr);
            const double rel_step =
                (delta.array().abs() / q.array().abs().max(1e-12)).maxCoeff();
            bool too_far = false;
            if (options.max_relative_change > 0.0)
                for (Eigen::Index j = 0; j < p; ++j)
                    too_far = too_far || std::abs(delta[j]) >
                                             options.max_relative_change * std::max(std::abs(q[j]), 1e-3);
            if (too_far && delta.allFinite()) {
                lambda *= 10.0;
                if (lambda > 1e20)
                    break;
                continue;
            }
            VectorXd q_new = q + delta;
            VectorXd r_new(n);
            const bool finite = delta.allFinite() && residuals(q_new, r_new);
            const double cost_new = finite ? r_new.squaredNorm() : std::numeric_limits<double>::infinity();
            if (cost_new < cost) {
                q = q_new;
                r = r_new;
                cost = cost_new;
                lambda = std::max(lambda / 10.0, 1e-12);
                accepted = true;
                converged = rel_step < options.tolerance;
            } else {
                if (finite && rel_step < options.tolerance) {
                    // No representable improvement left: at the minimum.
                    converged = true;
                    break;
                }
                lambda *= 10.0;
                if (lambda > 1e20)
                    break;
            }
        }
        if (!accepted && !converged)
            break;
    }

    out.iterations = iter;
    out.converged = converged;
    out.parameters.resize(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j)
        out.parameters[j] = q[j] * scale[j];

    double unweighted = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = r[i] * weight(i);
        unweighted += d * d;
    }
    out.residual_norm = std::sqrt(unweighted);

    if (converged) {
        jacobian(q, r, jac);
        const MatrixXd jtj = jac.transpose() * jac;
        Eigen::FullPivLU<MatrixXd> lu(jtj);
        lu.setThreshold(1e-12);
        if (lu.rank() < p)
            throw UnidentifiableError("least squares: parameters are not identifiable from the data");
        MatrixXd cov = lu.inverse();
        if (!sigma && n > p)
            cov *= cost / static_cast<double>(n - p);
        cov = scale.asDiagonal() * cov * scale.asDiagonal();
        std::vector<double> se(static_cast<std::size_t>(p));
        std::vector<double> flat(static_cast<std::size_t>(p * p));
        for (Eigen::Index j = 0; j < p; ++j) {
            se[j] = std::sqrt(cov(j, j));
            for (Eigen::Index k = 0; k < p; ++k)
                flat[j * p + k] = cov(j, k);
        }
        out.standard_errors = std::move(se);
        out.covariance = std::move(flat);
    }
    return out;
}

FitResult fit_exponential(std::span<const double> t, std::span<const double> temperature,
                          const LeastSquaresOptions& options)
{
    if (t.size() != temperature.size())
        throw ValidationError("exponential fit: time and temperature lengths differ");
    if (t.size() < 4)
        throw ValidationError("exponential fit needs at least 4 samples");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1]))
            throw ValidationError("exponential fit: times must be strictly increasing");

    const auto [lo, hi] = std::minmax_element(temperature.begin(), temperature.end());
    const double mean_abs = 0.5 * (std::abs(*lo) + std::abs(*hi));
    if (*hi - *lo <= 1e-12 * mean_abs)
        throw UnidentifiableError("exponential fit: constant trace, tau is unidentifiable");

    // Time is measured from the first sample internally.
    const double t_start = t.front();
    const double window = t.back() - t_start;
    std::vector<double> shifted(t.begin(), t.end());
    for (double& v : shifted)
        v -= t_start;

    auto model = [](double s, std::span<const double> p) {
        return p[0] + (p[1] - p[0]) * std::exp(-s / p[2]);
    };
    auto fit = levenberg_marquardt(model, shifted, temperature, std::nullopt,
                                   {"T_inf", "T0", "tau"},
                                   {temperature.back(), temperature.front(), window / 3.0}, options);

    const double t_inf = fit.parameters[0];
    const double t_first = fit.parameters[1];
    const double tau = fit.parameters[2];
    const double e = std::exp(t_start / tau);
    fit.parameters[1] = t_inf + (t_first - t_inf) * e;
    if (fit.covariance) {
        // Propagate to the value at t = 0.
        Eigen::Matrix3d cov;
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                cov(j, k) = (*fit.covariance)[j * 3 + k];
        Eigen::Matrix3d g = Eigen::Matrix3d::Identity();
        g(1, 0) = 1.0 - e;
        g(1, 1) = e;
        g(1, 2) = -(t_first - t_inf) * e * t_start / (tau * tau);
        const Eigen::Matrix3d c = g * cov * g.transpose();
        for (int j = 0; j < 3; ++j) {
            (*fit.standard_errors)[j] = std::sqrt(c(j, j));
            for (int k = 0; k < 3; ++k)
                (*fit.covariance)[j * 3 + k] = c(j, k);
        }
    }
    return fit;
}

FitResult fit_exponential(const TemperatureTrace& trace, Axis axis, double t_begin, double t_end,
                          const LeastSquaresOptions& options)
{
    std::vector<double> t;
    std::vector<double> temp;
    for (const auto& s : trace.samples) {
        if (s.t < t_begin || s.t > t_end)
            continue;
        t.push_back(s.t);
        temp.push_back(axis == Axis::z ? s.temperature_z : s.temperature_y);
    }
    return fit_exponential(t, temp, options);
}

namespace {

struct Columns {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> err;
    bool weighted = false;
};

Columns split(std::span<const ScanPoint> points)
{
    Columns c;
    c.weighted = !points.empty() && points.front().y_err.has_value();
    for (const auto& p : points) {
        if (!(p.x > 0.0) || !(p.y > 0.0))
            throw ValidationError("scan points need x > 0 and y > 0");
        if (p.y_err.has_value() != c.weighted)
            throw ValidationError("scan points must either all carry y_err or none");
        if (p.y_err && !(*p.y_err > 0.0))
            throw ValidationError("scan point y_err must be positive");
        c.x.push_back(p.x);
        c.y.push_back(p.y);
        if (p.y_err)
            c.err.push_back(*p.y_err);
    }
    return c;
}

}  // namespace

FitResult fit_intensity_scan(std::span<const ScanPoint> points, double kappa,
                             double polarizing_detuning, const AtomSpecies& species,
                             const LeastSquaresOptions& options)
{
    if (points.size() < 3)
        throw ValidationError("intensity scan fit needs at least 3 points");
    const auto c = split(points);
    const auto [lo, hi] = std::minmax_element(c.x.begin(), c.x.end());
    if (*hi < 3.0 * *lo)
        throw ValidationError("intensity scan must span at least a factor 3 in intensity");

    const auto derived = derive_constants(species);
    const double base = detuning_factor(polarizing_detuning) * derived.doppler_temperature / 2.0;
    const double per_r = 1.0 / (derived.recoil_energy * species.linewidth);

    auto model = [=](double intensity, std::span<const double> p) {
        return (p[0] + 0.3 * (1.0 + kappa) + p[1] * per_r / intensity) / p[0] * base;
    };

    // kappa_y from the highest intensity, R from the lowest.
    const auto i_hi = static_cast<std::size_t>(hi - c.x.begin());
    const auto i_lo = static_cast<std::size_t>(lo - c.x.begin());
    const double ratio_hi = c.y[i_hi] / base;
    double kappa_y0 = ratio_hi > 1.0 ? 0.3 * (1.0 + kappa) / (ratio_hi - 1.0) : 0.1;
    double r0 = (c.y[i_lo] / base * kappa_y0 - kappa_y0 - 0.3 * (1.0 + kappa)) * c.x[i_lo] / per_r;
    if (!(r0 > 0.0))
        r0 = 1e-3 * c.x[i_lo] / per_r;

    std::optional<std::span<const double>> sigma;
    if (c.weighted)
        sigma = std::span<const double>(c.err);
    return levenberg_marquardt(model, c.x, c.y, sigma, {"kappa_y", "R"}, {kappa_y0, r0}, options);
}

std::optional<double> OdScanModel::evaluate(double optical_density, const AtomSpecies& species) const
{
    return steady_state_vs_od(kappa_y_star, kappa_star, optical_density, heating_rate, intensity,
                              polarizing_detuning, species);
}

OdScanModel od_scan_model(double kappa_y_at_ref, double kappa_at_ref, double od_ref,
                          double heating_rate, double intensity, double polarizing_detuning)
{
    if (!(od_ref > 0.0))
        throw ValidationError("reference optical density must be positive");
    return {kappa_y_at_ref / od_ref, kappa_at_ref / od_ref, heating_rate, intensity,
            polarizing_detuning};
}

FitResult refit_od_scan(std::span<const ScanPoint> points, const OdScanModel& model,
                        const AtomSpecies& species, const LeastSquaresOptions& options)
{
    if (points.empty())
        throw ValidationError("optical density refit needs at least 1 point");
    const auto c = split(points);
    auto f = [&](double od, std::span<const double> p) {
        OdScanModel m = model;
        m.kappa_y_star = p[0];
        return m.evaluate(od, species).value_or(std::numeric_limits<double>::infinity());
    };
    std::optional<std::span<const double>> sigma;
    if (c.weighted)
        sigma = std::span<const double>(c.err);
    return levenberg_marquardt(f, c.x, c.y, sigma, {"kappa_y_star"}, {model.kappa_y_star}, options);
}

std::vector<ScanPoint> read_scan_csv(std::istream& in)
{
    std::vector<ScanPoint> points;
    std::string line;
    bool header = false;
    int x_col = -1, y_col = -1, err_col = -1;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line.front() == '#')
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (!header) {
            for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
                if (cells[i] == "x")
                    x_col = i;
                else if (cells[i] == "y")
                    y_col = i;
                else if (cells[i] == "y_err")
                    err_col = i;
            }
            if (x_col < 0 || y_col < 0)
                throw ValidationError(
                    fmt::format("scan CSV line {}: header must name columns x and y", line_no));
            header = true;
            continue;
        }
        auto number = [&](int col) {
            if (col >= static_cast<int>(cells.size()))
                throw ValidationError(fmt::format("scan CSV line {}: missing column", line_no));
            try {
                std::size_t used = 0;
                const double v = std::stod(cells[col], &used);
                if (used != cells[col].size())
                    throw std::invalid_argument("trailing characters");
                return v;
            } catch (const std::exception&) {
                throw ValidationError(
                    fmt::format("scan CSV line {}: '{}' is not a number", line_no, cells[col]));
            }
        };
        ScanPoint p{number(x_col), number(y_col), std::nullopt};
        if (err_col >= 0 && err_col < static_cast<int>(cells.size()) && !cells[err_col].empty())
            p.y_err = number(err_col);
        points.push_back(p);
    }
    if (!header)
        throw ValidationError("scan CSV has no header");
    return points;
}

void write_scan_csv(std::ostream& out, std::span<const ScanPoint> points)
{
    const bool with_err = !points.empty() && points.front().y_err.has_value();
    out << (with_err ? "x,y,y_err\n" : "x,y\n");
    for (const auto& p : points) {
        if (with_err)
            fmt::print(out, "{:.12g},{:.12g},{:.12g}\n", p.x, p.y, p.y_err.value_or(0.0));
        else
            fmt::print(out, "{:.12g},{:.12g}\n", p.x, p.y);
    }
}

}  // namespace doppler
