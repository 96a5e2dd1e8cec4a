#pragma once

#include <string>

#include "tgvc/ddim.hpp"

namespace tgvc {

/// A self-contained simulator setup: the denoiser target (16 canonical
/// frames), the clean keyframe latents, and the transmitted trajectories for
/// a clip of `length` frames.
struct ToyScene {
    ToyDenoiser denoiser;
    KeyLatents keys;
    SparseTrajectorySet sparse;
    int length = 16;
};

/// Scenes:
///   blob     - one blob whose target motion follows the transmitted
///              trajectory; guidance and prior agree.
///   two-blob - two blobs moving in opposite directions; the keyframes hold
///              them at their endpoint positions but the denoiser target
///              keeps the interior frames empty, contradicting the
///              transmitted trajectories.
///   shear    - rows translate by row-dependent amounts; trajectories follow
///              the shear field.
ToyScene make_scene(const std::string& name, int length);

}  // namespace tgvc
