#include "lindex/clifford.hpp"

#include <sstream>

namespace lindex {

SupertraceAudit supertrace_audit(int n) {
    SupertraceAudit audit;
    audit.dimension = n;
    if (n % 2 != 0 || n < 2 || n > 8) {
        audit.detail = "even n in [2,8] required";
        return audit;
    }
    using K = GaussianRational;
    const std::uint32_t top = (std::uint32_t(1) << n) - 1;
    const K expected_top = supertrace_top_value<K>(n);
    for (std::uint32_t s = 0; s <= top; ++s) {
        const auto mono = CliffordElement<K>::monomial(n, s);
        const K str = supertrace(mono);
        const K want = (s == top) ? expected_top : K(0);
        const K mat_str = matrix_supertrace(matrix_representation(mono), n);
        ++audit.monomials_checked;
        if (!(str == want) || !(mat_str == want)) {
            std::ostringstream os;
            os << "monomial mask " << s << ": supertrace " << str.str() << " (matrix "
               << mat_str.str() << "), expected " << want.str();
            audit.detail = os.str();
            return audit;
        }
    }
    audit.pass = true;
    std::ostringstream os;
    os << "all " << audit.monomials_checked << " monomials exact; top value "
       << expected_top.str();
    audit.detail = os.str();
    return audit;
}

} // namespace lindex
