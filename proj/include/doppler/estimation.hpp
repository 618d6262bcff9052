#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "doppler/atom_physics.hpp"
#include "doppler/cooling_dynamics.hpp"
#include "doppler/errors.hpp"

namespace doppler {

/// The data cannot constrain the requested parameters.
class UnidentifiableError : public RuntimeFailure {
  public:
    using RuntimeFailure::RuntimeFailure;
};

/// One point of an intensity or optical-density scan: x dimensionless, y in K.
struct ScanPoint {
    double x = 0.0;
    double y = 0.0;
    std::optional<double> y_err;
};

struct FitResult {
    std::vector<std::string> names;
    std::vector<double> parameters;
    /// Present iff the fit converged.
    std::optional<std::vector<double>> standard_errors;
    /// Row-major covariance, present iff converged.
    std::optional<std::vector<double>> covariance;
    double residual_norm = 0.0;  // unweighted, in the units of y
    bool converged = false;
    int iterations = 0;

    double parameter(std::string_view name) const;
    double standard_error(std::string_view name) const;
};

struct LeastSquaresOptions {
    int max_iterations = 200;
    double relative_step = 1e-7;  // forward-difference Jacobian
    double tolerance = 1e-8;      // relative parameter change
    double initial_damping = 1e-3;
    /// Largest accepted change of a parameter per iteration, as a fraction of
    /// its current magnitude; larger steps are damped further. 0 disables.
    double max_relative_change = 0.5;
};

using ScalarModel = std::function<double(double x, std::span<const double> parameters)>;

/// Damped Gauss-Newton (Levenberg-Marquardt) for y ~ model(x, p). With
/// `sigma` the fit is weighted and the covariance is absolute; without it the
/// covariance is scaled by the reduced chi-square.
FitResult levenberg_marquardt(const ScalarModel& model, std::span<const double> x,
                              std::span<const double> y, std::optional<std::span<const double>> sigma,
                              std::vector<std::string> names, std::vector<double> initial,
                              const LeastSquaresOptions& options = {});

/// Fits T(t) = T_inf + (T0 - T_inf) exp(-t / tau) to samples in
/// [t_begin, t_end]. Parameters: "T_inf", "T0" (value at t = 0), "tau".
FitResult fit_exponential(std::span<const double> t, std::span<const double> temperature,
                          const LeastSquaresOptions& options = {});
FitResult fit_exponential(const TemperatureTrace& trace, Axis axis, double t_begin, double t_end,
                          const LeastSquaresOptions& options = {});

/// Radial steady state vs intensity with an extra heating rate, kappa and
/// detuning held fixed. Parameters: "kappa_y", "R" (J/s).
FitResult fit_intensity_scan(std::span<const ScanPoint> points, double kappa,
                             double polarizing_detuning, const AtomSpecies& species,
                             const LeastSquaresOptions& options = {});

/// Radial steady state vs radial optical density with per-OD coefficients
/// normalized at a reference optical density.
struct OdScanModel {
    double kappa_y_star = 0.0;
    double kappa_star = 0.0;
    double heating_rate = 0.0;  // J/s
    double intensity = 0.0;
    double polarizing_detuning = -0.5;

    std::optional<double> evaluate(double optical_density, const AtomSpecies& species) const;
};

OdScanModel od_scan_model(double kappa_y_at_ref, double kappa_at_ref, double od_ref,
                          double heating_rate, double intensity, double polarizing_detuning);

/// Refits kappa_y_star only. Parameter: "kappa_y_star".
FitResult refit_od_scan(std::span<const ScanPoint> points, const OdScanModel& model,
                        const AtomSpecies& species, const LeastSquaresOptions& options = {});

/// Reads `x,y[,y_err]` CSV; '#' lines are comments, the first other line is
/// the header.
std::vector<ScanPoint> read_scan_csv(std::istream& in);
void write_scan_csv(std::ostream& out, std::span<const ScanPoint> points);

}  // namespace doppler
