#pragma once

#include "cpnet/rng.hpp"

#include <string>
#include <string_view>

namespace cpnet {

enum class DriverKind {
    Brownian,
    CompoundPoisson,     // centered Gaussian jumps, unit variance per unit time
    BrownianPlusJumps,   // independent Brownian part tops the variance up to one
};

/// Mean-zero, unit-variance Levy driver. For every kind an increment over dt has
/// mean 0 and variance dt.
struct DriverSpec {
    DriverKind kind = DriverKind::Brownian;
    double jump_intensity = 0.0;   // jumps per unit time
    double jump_size_scale = 0.0;  // standard deviation of one jump (BrownianPlusJumps only)

    static DriverSpec brownian() { return {}; }
    static DriverSpec compound_poisson(double intensity) { return {DriverKind::CompoundPoisson, intensity, 0.0}; }
    static DriverSpec brownian_plus_jumps(double intensity, double jump_scale) {
        return {DriverKind::BrownianPlusJumps, intensity, jump_scale};
    }

    void validate() const;
    bool is_gaussian() const noexcept { return kind == DriverKind::Brownian; }
};

std::string_view to_string(DriverKind kind);
DriverKind parse_driver_kind(std::string_view name);

/// Draws unit-sigma increments for one (path, agent) stream.
class IncrementSampler {
public:
    IncrementSampler(const DriverSpec& spec, double dt);
    double operator()(rng::Stream& stream) const;

private:
    DriverKind kind_;
    double sqrt_dt_;
    double brownian_scale_;  // sqrt(dt * brownian variance share)
    double jump_scale_;
    double no_jump_prob_;    // exp(-lambda dt)
    double mean_jumps_;      // lambda dt
};

}  // namespace cpnet
