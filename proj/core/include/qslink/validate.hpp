#pragma once

#include <string>
#include <vector>

#include "qslink/channel.hpp"

namespace qslink {

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0;
    double tolerance = 0;
    std::string detail;
};

// Fixed-seed oracle suite cross-checking the closed forms against quadrature
// and Monte Carlo: hit-probability approximation vs. quadrature, Gamma-Gamma
// moments and KS, CLT quality (documented floor, plus the near-deterministic
// fading regime), binomial vs. Poisson thinning, background mean, estimator
// STD vs. the analytic bracket, outage vs. the analytic law, validity guard.
std::vector<CheckResult> run_validation_suite(const LinkModel& model);

} // namespace qslink
