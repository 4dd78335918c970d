#include "cvxseg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cvxseg {

std::string to_string(SynthShape shape) {
    switch (shape) {
        case SynthShape::disk: return "disk";
        case SynthShape::ellipse: return "ellipse";
        case SynthShape::crescent: return "crescent";
        case SynthShape::occluded_disk: return "occluded-disk";
        case SynthShape::low_contrast_disk: return "low-contrast-disk";
    }
    return "?";
}

std::optional<SynthShape> synth_shape_from_string(const std::string& name) {
    if (name == "disk") return SynthShape::disk;
    if (name == "ellipse") return SynthShape::ellipse;
    if (name == "crescent") return SynthShape::crescent;
    if (name == "occluded-disk") return SynthShape::occluded_disk;
    if (name == "low-contrast-disk") return SynthShape::low_contrast_disk;
    return std::nullopt;
}

double GaussianSampler::uniform01() {
    // 53-bit mantissa draw in (0, 1]; never 0, so log() below stays finite.
    const std::uint64_t bits = rng_() >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1p-53;
}

double GaussianSampler::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

SynthScene synth_scene(SynthShape shape, int width, int height, double sigma,
                       std::uint64_t seed) {
    if (width < 8 || height < 8)
        throw std::invalid_argument("synth_scene: scene needs at least 8x8 pixels");
    if (sigma < 0.0) throw std::invalid_argument("synth_scene: sigma must be nonnegative");

    const double cx = 0.5 * (width - 1);
    const double cy = 0.5 * (height - 1);
    const double radius = 0.25 * std::min(width, height);

    SynthScene scene;
    scene.image = Image(width, height, 1);
    scene.truth = BinaryMask(width, height);

    auto in_disk = [&](double m, double n, double ox, double oy, double r) {
        const double dm = m - (cx + ox), dn = n - (cy + oy);
        return dm * dm + dn * dn <= r * r;
    };

    for (int n = 0; n < height; ++n) {
        for (int m = 0; m < width; ++m) {
            bool object = false;
            double value = 0.75;
            switch (shape) {
                case SynthShape::disk:
                    object = in_disk(m, n, 0, 0, radius);
                    value = object ? 0.25 : 0.75;
                    break;
                case SynthShape::ellipse: {
                    const double dm = (m - cx) / (0.35 * width * 0.5);
                    const double dn = (n - cy) / (0.22 * height * 0.5);
                    object = dm * dm + dn * dn <= 1.0;
                    value = object ? 0.25 : 0.75;
                    break;
                }
                case SynthShape::crescent:
                    object = in_disk(m, n, 0, 0, radius) &&
                             !in_disk(m, n, 0.55 * radius, 0, 0.7 * radius);
                    value = object ? 0.25 : 0.75;
                    break;
                case SynthShape::occluded_disk: {
                    object = in_disk(m, n, 0, 0, radius);
                    value = object ? 0.25 : 0.75;
                    // Vertical bar through the disk's middle; the truth keeps
                    // the full disk underneath.
                    if (std::abs(m - cx) <= 0.225 * radius) value = 0.5;
                    break;
                }
                case SynthShape::low_contrast_disk:
                    object = in_disk(m, n, 0, 0, radius);
                    value = object ? 0.45 : 0.55;
                    break;
            }
            scene.truth(m, n) = object ? 0 : 1;
            scene.image(m, n) = value;
        }
    }

    if (sigma > 0.0) {
        GaussianSampler noise(seed);
        for (double& v : scene.image.values())
            v = std::clamp(v + sigma * noise.next(), 0.0, 1.0);
    }
    return scene;
}

}  // namespace cvxseg
