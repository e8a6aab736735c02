#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace depstat::num {

/// Tolerances and subdivision budget for the adaptive 1-D integrator.
struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    std::size_t max_subdivisions = 2000;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
            throw std::domain_error("QuadratureSpec: tolerances must be positive");
        if (max_subdivisions < 16)
            throw std::domain_error("QuadratureSpec: max_subdivisions must be >= 16");
    }
};

/// Thrown when the integrator exhausts its subdivision budget; carries the
/// error estimate it actually achieved.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_tolerance(achieved) {}
    double achieved_tolerance;
};

/// Adaptive Gauss-Kronrod (G7,K15) integration of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& q = {});

}  // namespace depstat::num
