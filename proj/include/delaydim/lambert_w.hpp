#pragma once

#include <complex>
#include <optional>

namespace delaydim {

/// Branch `branch` of the complex Lambert W function, i.e. the solution of
/// w e^w = z on that branch. Evaluated by Halley iteration from the branch
/// asymptotics; returns nullopt when the iteration does not converge or when
/// the value is -infinity (z = 0 on a nonprincipal branch).
std::optional<std::complex<double>> lambert_w(std::complex<double> z, int branch);

/// Same, with z given through its principal logarithm. Used when |z| would
/// overflow a double (z = -sigma tau e^{a tau} for stiff modes).
std::optional<std::complex<double>> lambert_w_from_log(std::complex<double> log_z, int branch);

}  // namespace delaydim
