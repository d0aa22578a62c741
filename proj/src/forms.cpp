#include "lindex/forms.hpp"

#include <cmath>

namespace lindex {

bool CurvatureMatrix::is_valid(double eps) const {
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const auto& w = (*this)(i, j);
            if (!w.is_zero() && !w.is_homogeneous(2)) return false;
            const FormPolynomial<cplx> sum = w + (*this)(j, i);
            for (const auto& [s, c] : sum.coefficients())
                if (std::abs(c) > eps) return false;
        }
    return true;
}

} // namespace lindex
