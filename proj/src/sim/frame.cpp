#include "sdv/sim/frame.hpp"

#include <string>

#include "sdv/core/errors.hpp"

namespace sdv {

bool SensorFrame::has_map(std::size_t source, std::size_t reference) const noexcept {
  for (const auto& m : stereo_maps) {
    if (m.source == source && m.reference == reference) return true;
  }
  return false;
}

const StereoMap& SensorFrame::map(std::size_t source, std::size_t reference) const {
  for (const auto& m : stereo_maps) {
    if (m.source == source && m.reference == reference) return m;
  }
  throw DomainError("frame has no disparity map DM_{" + std::to_string(source) + "," +
                    std::to_string(reference) + "}");
}

StereoMap& SensorFrame::map(std::size_t source, std::size_t reference) {
  const auto& self = *this;
  return const_cast<StereoMap&>(self.map(source, reference));
}

void SensorFrame::validate() const {
  rig.validate();
  if (attack_truth.size() != rig.sensor_count())
    throw InvariantError("attack truth length differs from sensor count");
  for (const auto& m : stereo_maps) {
    if (!rig.is_camera(m.source) || !rig.is_camera(m.reference) || m.source >= m.reference)
      throw InvariantError("stereo map names an invalid camera pair");
    const CameraModel& ref = rig.camera(m.reference);
    for (const DisparityMap* dm : {&m.estimated, &m.ground_truth}) {
      if (dm->width() != ref.image_width || dm->height() != ref.image_height)
        throw InvariantError("stereo map dimensions differ from the reference image");
    }
  }
}

}  // namespace sdv
