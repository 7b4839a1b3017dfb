#pragma once

#include <memory>
#include <vector>

namespace qslink {

// Fixed-order Gauss-Legendre rule; nodes/weights from GSL's glfixed tables.
class GaussLegendre {
public:
    explicit GaussLegendre(int order); // order >= 1
    GaussLegendre(const GaussLegendre&) = delete;
    GaussLegendre& operator=(const GaussLegendre&) = delete;
    GaussLegendre(GaussLegendre&&) noexcept = default;
    GaussLegendre& operator=(GaussLegendre&&) noexcept = default;
    ~GaussLegendre();

    int order() const { return order_; }

    // Node i mapped onto [a, b]; weight includes the interval scaling.
    void point(double a, double b, int i, double* x, double* w) const;

    template <typename F>
    double integrate(F&& f, double a, double b) const {
        double acc = 0;
        for (int i = 0; i < order_; ++i) {
            double x, w;
            point(a, b, i, &x, &w);
            acc += w * f(x);
        }
        return acc;
    }

private:
    int order_;
    struct TableDeleter {
        void operator()(void* t) const;
    };
    std::unique_ptr<void, TableDeleter> table_;
};

} // namespace qslink
