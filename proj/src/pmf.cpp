#include "disaster/pmf.hpp"

namespace disaster {

double PmfTable::total() const {
    CompensatedSum s;
    for (double m : masses) s += m;
    return s.value();
}

std::string to_string(Provenance p) { return p == Provenance::Analytic ? "analytic" : "simulated"; }

}  // namespace disaster
