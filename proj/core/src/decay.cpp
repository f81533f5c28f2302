#include "kgc/decay.hpp"

#include <cmath>
#include <string>

#include "kgc/error.hpp"

namespace kgc {

DecayFunction DecayFunction::exponential(double base) {
    if (!(base > 0.0 && base < 1.0)) {
        throw Error(ErrorKind::ConfigError,
                    "exponential decay base must be in (0,1), got " + std::to_string(base));
    }
    return DecayFunction(DecayKind::Exponential, base, {});
}

DecayFunction DecayFunction::power_law(double exponent) {
    if (!(exponent > 0.0)) {
        throw Error(ErrorKind::ConfigError,
                    "power-law decay exponent must be > 0, got " + std::to_string(exponent));
    }
    return DecayFunction(DecayKind::PowerLaw, exponent, {});
}

DecayFunction DecayFunction::table(std::vector<double> values) {
    if (values.empty()) {
        throw Error(ErrorKind::ConfigError, "decay table must not be empty");
    }
    double previous = 1.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double v = values[i];
        if (!(v > 0.0 && v <= 1.0)) {
            throw Error(ErrorKind::ConfigError, "decay table value at h=" + std::to_string(i + 1) +
                                                    " is outside (0,1]");
        }
        if (v > previous) {
            throw Error(ErrorKind::ConfigError, "decay table must be nonincreasing (violated at h=" +
                                                    std::to_string(i + 1) + ")");
        }
        previous = v;
    }
    return DecayFunction(DecayKind::Table, 0.0, std::move(values));
}

double DecayFunction::value(int hops) const {
    if (hops < 1) {
        throw Error(ErrorKind::HopOutOfRange, "hop count must be >= 1, got " + std::to_string(hops));
    }
    switch (kind_) {
        case DecayKind::Exponential: {
            // Repeated multiplication keeps powers of dyadic bases exact
            // (0.5^7 == 1/128 bit-for-bit) and is deterministic across libms.
            double f = 1.0;
            for (int i = 0; i < hops; ++i) f *= param_;
            return f;
        }
        case DecayKind::PowerLaw:
            return std::pow(static_cast<double>(hops), -param_);
        case DecayKind::Table:
            if (static_cast<std::size_t>(hops) > values_.size()) {
                throw Error(ErrorKind::HopOutOfRange,
                            "decay table covers h <= " + std::to_string(values_.size()) +
                                ", got h = " + std::to_string(hops));
            }
            return values_[static_cast<std::size_t>(hops) - 1];
    }
    return 0.0;
}

} // namespace kgc
