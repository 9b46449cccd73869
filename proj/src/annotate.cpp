#include "dvkit/metadata.hpp"

namespace dvkit::metadata {

Annotations annotate(const DemoRecord& record, const AnnotateConfig& config) {
  Annotations out;
  if (record.annotations) {
    out.motion = record.annotations->motion;
    out.table_color = record.annotations->table_color;
  }
  if (config.lexicon && config.embeddings && !record.instructions.empty()) {
    try {
      out.target_object = extract_target_object(record.instructions, *config.lexicon,
                                                 *config.embeddings, config.cluster_cut);
    } catch (const NoVerbFound&) {
    } catch (const NoObjectFound&) {
    }
  }
  out.object_position = extract_object_position(record.steps);
  out.receptacle_position = extract_receptacle_position(record.steps);
  try {
    out.camera_bin = bin_camera_pose(record.camera_extrinsics.pos, config.table_center, config.bins);
  } catch (const DegeneratePose&) {
  }
  if (config.annotator && out.target_object) {
    try {
      out.object_color =
          canonical_color(config.annotator->raw_color(record, *out.target_object));
    } catch (const AnnotatorUnavailable&) {
    } catch (const UnrecognizedColor&) {
    }
  }
  return out;
}

}  // namespace dvkit::metadata
