#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "cvxseg/forces.hpp"
#include "cvxseg/sdf.hpp"

namespace cvxseg {

/// Built-in test scenes.  All are gray images in [0, 1] with a ground-truth
/// object mask; "crescent" is the canonical nonconvex case, "occluded-disk"
/// hides part of the disk under a bar of intermediate intensity (the truth
/// stays the full disk).
enum class SynthShape { disk, ellipse, crescent, occluded_disk, low_contrast_disk };

std::string to_string(SynthShape shape);
std::optional<SynthShape> synth_shape_from_string(const std::string& name);

struct SynthScene {
    Image image;
    BinaryMask truth;
};

/// Deterministic Gaussian sampler (mt19937_64 + Box-Muller); the C++
/// standard does not pin std::normal_distribution's algorithm, this does.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}
    double next();

private:
    double uniform01();
    std::mt19937_64 rng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Renders the scene at the requested size, then adds clamped i.i.d.
/// Gaussian noise with standard deviation sigma.  Identical arguments give
/// identical buffers on every platform.
SynthScene synth_scene(SynthShape shape, int width, int height, double sigma,
                       std::uint64_t seed);

}  // namespace cvxseg
