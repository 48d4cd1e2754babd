#include "ckns/grid.hpp"

#include <algorithm>
#include <cmath>

namespace ckns {

double ScalarField::min() const {
    double m = v.empty() ? 0.0 : v[0];
    for (double x : v) m = std::min(m, x);
    return m;
}

double ScalarField::max() const {
    double m = v.empty() ? 0.0 : v[0];
    for (double x : v) m = std::max(m, x);
    return m;
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

bool ScalarField::finite() const {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

double VectorField::max_norm() const {
    double m = 0.0;
    const auto n = comp[0].size();
    for (std::size_t i = 0; i < n; ++i) {
        const double s = comp[0][i] * comp[0][i] + comp[1][i] * comp[1][i] + comp[2][i] * comp[2][i];
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

bool VectorField::finite() const {
    for (const auto& c : comp)
        for (double x : c)
            if (!std::isfinite(x)) return false;
    return true;
}

void require_finite(const ScalarField& f, const char* what) {
    if (!f.finite()) throw Error(std::string("non-finite values in ") + what);
}

void require_finite(const VectorField& f, const char* what) {
    if (!f.finite()) throw Error(std::string("non-finite values in ") + what);
}

} // namespace ckns
