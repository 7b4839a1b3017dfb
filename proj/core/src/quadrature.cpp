#include "qslink/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include "qslink/errors.hpp"

namespace qslink {

void GaussLegendre::TableDeleter::operator()(void* t) const {
    gsl_integration_glfixed_table_free(static_cast<gsl_integration_glfixed_table*>(t));
}

GaussLegendre::GaussLegendre(int order) : order_(order) {
    if (order < 1) throw numeric_error("GaussLegendre: order must be >= 1");
    auto* t = gsl_integration_glfixed_table_alloc(static_cast<size_t>(order));
    if (!t) throw numeric_error("GaussLegendre: table allocation failed");
    table_.reset(t);
}

GaussLegendre::~GaussLegendre() = default;

void GaussLegendre::point(double a, double b, int i, double* x, double* w) const {
    gsl_integration_glfixed_point(a, b, static_cast<size_t>(i), x, w,
                                  static_cast<gsl_integration_glfixed_table*>(table_.get()));
}

} // namespace qslink
