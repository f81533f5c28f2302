#ifndef KGC_DECAY_HPP
#define KGC_DECAY_HPP

#include <vector>

namespace kgc {

enum class DecayKind { Exponential, PowerLaw, Table };

// Nonincreasing map from hop count h >= 1 to a strength in (0,1].
// Exponential(b): f(h) = b^h. PowerLaw(a): f(h) = h^(-a).
// Table(v): f(h) = v[h-1], v nonincreasing.
class DecayFunction {
public:
    static DecayFunction exponential(double base);       // requires 0 < base < 1
    static DecayFunction power_law(double exponent);     // requires exponent > 0
    static DecayFunction table(std::vector<double> values);

    // f(h); throws HopOutOfRange for Table kind beyond the table.
    double value(int hops) const;

    DecayKind kind() const { return kind_; }
    double base() const { return param_; }
    double exponent() const { return param_; }
    const std::vector<double>& values() const { return values_; }

    friend bool operator==(const DecayFunction&, const DecayFunction&) = default;

private:
    DecayFunction(DecayKind kind, double param, std::vector<double> values)
        : kind_(kind), param_(param), values_(std::move(values)) {}

    DecayKind kind_ = DecayKind::Exponential;
    double param_ = 0.5;
    std::vector<double> values_;
};

} // namespace kgc

#endif
