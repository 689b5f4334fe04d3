/*
Copyright 2026 The xinpaint Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef XINPAINT_DEGRADE_HPP_
#define XINPAINT_DEGRADE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "xinpaint/core/error.hpp"
#include "xinpaint/core/image.hpp"

namespace xinpaint {

// input = gt * (1 - mask): masked pixels become 0 in every channel.
inline ImageBuffer apply_mask(const ImageBuffer& gt, const MaskGrid& mask) {
  require_same_dims(gt, mask, "apply_mask");
  const int c = gt.channels();
  std::vector<double> out(gt.data().begin(), gt.data().end());
  const auto cells = mask.cells();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i]) {
      for (int k = 0; k < c; ++k) out[i * c + k] = 0.0;
    }
  }
  return ImageBuffer(gt.width(), gt.height(), c, std::move(out));
}

// output = input + pred * mask. Known pixels come from input, masked ones from
// pred. The input must already be zero on every masked cell; anything else
// means the input and mask were not paired by apply_mask.
inline ImageBuffer compose_output(const ImageBuffer& input,
                                  const ImageBuffer& pred,
                                  const MaskGrid& mask) {
  require_same_dims(input, mask, "compose_output");
  if (!input.same_shape(pred)) {
    throw DimensionMismatch("compose_output: input is " + input.shape() +
                            " but prediction is " + pred.shape());
  }
  const int c = input.channels();
  const auto in = input.data();
  const auto pr = pred.data();
  const auto cells = mask.cells();
  std::vector<double> out(in.begin(), in.end());
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!cells[i]) continue;
    for (int k = 0; k < c; ++k) {
      if (in[i * c + k] != 0.0) ++nonzero;
      out[i * c + k] = pr[i * c + k];
    }
  }
  if (nonzero > 0) {
    throw InvalidArgument("compose_output: input is nonzero on " +
                          std::to_string(nonzero) +
                          " masked sample(s); input and mask are mis-paired");
  }
  return ImageBuffer(input.width(), input.height(), c, std::move(out));
}

// Everything a Track 1 (image + mask) or Track 2 (image + mask + semantic
// map) participant receives for one image.
struct DegradedRecord {
  ImageBuffer input;
  MaskGrid mask;
  std::optional<SemanticMap> semantic;

  int track() const { return semantic ? 2 : 1; }
};

inline DegradedRecord degrade_pair(const ImageBuffer& gt,
                                   const std::optional<SemanticMap>& semantic,
                                   const MaskGrid& mask, int track) {
  if (track != 1 && track != 2) {
    throw InvalidArgument("track must be 1 or 2, got " + std::to_string(track));
  }
  if (track == 2 && !semantic) {
    throw InvalidArgument("track 2 record requires a semantic map");
  }
  if (track == 1 && semantic) {
    throw InvalidArgument("track 1 record must not carry a semantic map");
  }
  if (semantic && (semantic->width() != gt.width() ||
                   semantic->height() != gt.height())) {
    throw DimensionMismatch(
        "degrade_pair: image is " + shape_string(gt.width(), gt.height()) +
        " but semantic map is " +
        shape_string(semantic->width(), semantic->height()));
  }
  return DegradedRecord{apply_mask(gt, mask), mask, semantic};
}

}  // namespace xinpaint

#endif  // XINPAINT_DEGRADE_HPP_
