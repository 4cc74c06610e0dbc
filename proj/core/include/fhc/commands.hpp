#pragma once

#include <string>

#include "fhc/model.hpp"
#include "fhc/run_io.hpp"

namespace fhc::cmd {

/// exit codes: 0 success, 2 config error, 3 numerical-gate failure, 4 verification failure
struct Outcome {
    int exit_code = 0;
    std::string message;
};

ModelParams params_from_config(const io::RunConfig& cfg);

/// smooth compactly supported bump exp(-1/(1-z^2)), z = (u-center)/width
double bump(double u, double center, double width);

Outcome simulate(io::RunConfig cfg);
Outcome covariance(io::RunConfig cfg);
Outcome pde(io::RunConfig cfg);
Outcome kernels_table(io::RunConfig cfg);
Outcome converge(io::RunConfig cfg);
Outcome verify(io::RunConfig cfg);

}  // namespace fhc::cmd
