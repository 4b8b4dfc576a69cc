#include <cmath>
#include <limits>
#include <numbers>

#include "ghostsnr/model.hpp"

namespace ghostsnr {

MaskSpec MaskSpec::disk(double radius, Vec2 center) { return MaskSpec(Shape::Disk, radius, center); }

MaskSpec MaskSpec::gaussian_spot(double waist, Vec2 center) { return MaskSpec(Shape::GaussianSpot, waist, center); }

MaskSpec MaskSpec::uniform(double value) { return MaskSpec(Shape::Uniform, value, {}); }

std::string to_string(MaskSpec::Shape s) {
    switch (s) {
        case MaskSpec::Shape::Disk: return "disk";
        case MaskSpec::Shape::GaussianSpot: return "gaussian";
        case MaskSpec::Shape::Uniform: return "uniform";
    }
    return "?";
}

double MaskSpec::transmissivity_at(Vec2 p) const {
    const double d2 = norm2({p.x - center_.x, p.y - center_.y});
    switch (shape_) {
        case Shape::Disk: return d2 <= size_ * size_ ? 1.0 : 0.0;
        case Shape::GaussianSpot: return std::exp(-d2 / (size_ * size_));
        case Shape::Uniform: return size_;
    }
    return 0.0;
}

double MaskSpec::effective_area() const {
    switch (shape_) {
        case Shape::Disk: return std::numbers::pi * size_ * size_;
        case Shape::GaussianSpot: return std::numbers::pi * size_ * size_ / 4.0;
        case Shape::Uniform: return size_ == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return 0.0;
}

double MaskSpec::power_area() const {
    switch (shape_) {
        case Shape::Disk: return std::numbers::pi * size_ * size_;
        case Shape::GaussianSpot: return std::numbers::pi * size_ * size_ / 2.0;
        case Shape::Uniform: return size_ == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return 0.0;
}

bool MaskSpec::has_finite_area() const {
    const double a = effective_area();
    return std::isfinite(a) && a > 0.0;
}

MaskSpec MaskSpec::scaled(double unit) const {
    if (shape_ == Shape::Uniform) return *this;
    return MaskSpec(shape_, size_ / unit, {center_.x / unit, center_.y / unit});
}

void MaskSpec::validate() const {
    switch (shape_) {
        case Shape::Disk:
            if (!(size_ > 0.0) || !std::isfinite(size_)) throw ConfigError("mask.size", "disk radius must be positive");
            break;
        case Shape::GaussianSpot:
            if (!(size_ > 0.0) || !std::isfinite(size_)) throw ConfigError("mask.size", "spot waist must be positive");
            break;
        case Shape::Uniform:
            if (!(size_ >= 0.0 && size_ <= 1.0)) throw ConfigError("mask.value", "uniform transmission must lie in [0, 1]");
            break;
    }
    if (!std::isfinite(center_.x) || !std::isfinite(center_.y)) throw ConfigError("mask.center", "must be finite");
}

}  // namespace ghostsnr
