#pragma once

#include <cstddef>
#include <vector>

#include "owl/vec3.hpp"

namespace owl {

// Sampled relative motion of one tracked point, camera frame.
//
// rel_positions[k] is the range vector r (camera -> point). rel_velocities[k]
// is the relative translational velocity t of the camera with respect to the
// point, expressed in the camera frame; for a stationary point and a
// non-rotating camera this is simply the camera velocity. The camera-frame
// rate of change of r is -t - Omega x r, so with zero camera rotation
// rel_velocities[k] == -d/dt rel_positions[k].
struct Track {
    int point_id{0};
    std::vector<double> times;
    std::vector<Vec3> rel_positions;
    std::vector<Vec3> rel_velocities;

    std::size_t size() const { return times.size(); }
};

} // namespace owl
