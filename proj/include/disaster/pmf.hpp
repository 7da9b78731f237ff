#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace disaster {

enum class Provenance { Analytic, Simulated };

// Truncated pmf on {support_start, support_start+1, ...}.  `tail_mass_bound`
// covers finite values beyond the table; `defect` is the mass at infinity of a
// defective law (never folded into the masses).
struct PmfTable {
    std::int64_t support_start = 0;
    std::vector<double> masses;
    bool normalized = false;
    double tail_mass_bound = 0.0;
    double defect = 0.0;
    Provenance provenance = Provenance::Analytic;

    double at(std::int64_t x) const {
        std::int64_t i = x - support_start;
        return i >= 0 && i < static_cast<std::int64_t>(masses.size()) ? masses[i] : 0.0;
    }
    std::int64_t last() const { return support_start + static_cast<std::int64_t>(masses.size()) - 1; }
    double total() const;
};

std::string to_string(Provenance p);

// Neumaier compensated accumulator.
class CompensatedSum {
public:
    void add(double v) {
        double t = sum_ + v;
        if (!std::isfinite(t)) {
            sum_ = t;
            comp_ = 0.0;
            return;
        }
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double v) {
        add(v);
        return *this;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace disaster
