#include "cpnet/driver.hpp"

#include "cpnet/error.hpp"

#include <cmath>

namespace cpnet {

void DriverSpec::validate() const {
    switch (kind) {
    case DriverKind::Brownian:
        return;
    case DriverKind::CompoundPoisson:
        require(std::isfinite(jump_intensity) && jump_intensity > 0.0, "compound-poisson driver needs jump_intensity > 0");
        return;
    case DriverKind::BrownianPlusJumps:
        require(std::isfinite(jump_intensity) && jump_intensity > 0.0,
                "brownian-plus-jumps driver needs jump_intensity > 0");
        require(std::isfinite(jump_size_scale) && jump_size_scale > 0.0,
                "brownian-plus-jumps driver needs jump_size_scale > 0");
        require(jump_intensity * jump_size_scale * jump_size_scale <= 1.0,
                "jump variance rate intensity*scale^2 exceeds the unit total variance");
        return;
    }
}

std::string_view to_string(DriverKind kind) {
    switch (kind) {
    case DriverKind::Brownian: return "brownian";
    case DriverKind::CompoundPoisson: return "compound-poisson";
    case DriverKind::BrownianPlusJumps: return "brownian-plus-jumps";
    }
    return "unknown";
}

DriverKind parse_driver_kind(std::string_view name) {
    if (name == "brownian") return DriverKind::Brownian;
    if (name == "compound-poisson" || name == "compound-poisson-normalized") return DriverKind::CompoundPoisson;
    if (name == "brownian-plus-jumps") return DriverKind::BrownianPlusJumps;
    fail(ErrorKind::InvalidArgument, "unknown driver kind '" + std::string(name) + "'");
}

IncrementSampler::IncrementSampler(const DriverSpec& spec, double dt)
    : kind_(spec.kind), sqrt_dt_(std::sqrt(dt)), brownian_scale_(0.0), jump_scale_(0.0), no_jump_prob_(1.0),
      mean_jumps_(0.0) {
    spec.validate();
    require(dt > 0.0 && std::isfinite(dt), "time step must be positive");
    switch (kind_) {
    case DriverKind::Brownian:
        brownian_scale_ = sqrt_dt_;
        break;
    case DriverKind::CompoundPoisson:
        jump_scale_ = 1.0 / std::sqrt(spec.jump_intensity);
        break;
    case DriverKind::BrownianPlusJumps: {
        jump_scale_ = spec.jump_size_scale;
        const double jump_var = spec.jump_intensity * jump_scale_ * jump_scale_;
        brownian_scale_ = std::sqrt(std::max(0.0, 1.0 - jump_var) * dt);
        break;
    }
    }
    if (kind_ != DriverKind::Brownian) {
        mean_jumps_ = spec.jump_intensity * dt;
        no_jump_prob_ = std::exp(-mean_jumps_);
    }
}

double IncrementSampler::operator()(rng::Stream& stream) const {
    if (kind_ == DriverKind::Brownian) return brownian_scale_ * stream.normal();

    double inc = brownian_scale_ > 0.0 ? brownian_scale_ * stream.normal() : 0.0;
    // Poisson count by inversion of the CDF.
    const double u = stream.uniform();
    double p = no_jump_prob_;
    double cdf = p;
    int jumps = 0;
    while (u > cdf && jumps < 10000) {
        ++jumps;
        p *= mean_jumps_ / jumps;
        cdf += p;
    }
    for (int k = 0; k < jumps; ++k) inc += jump_scale_ * stream.normal();
    return inc;
}

}  // namespace cpnet
