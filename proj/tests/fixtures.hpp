//------------------------------------------------------------------------------
//
//   Copyright 2026 The regunc Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#pragma once

#include "regunc/core.hpp"

namespace regunc::testing {

// 3x3 field with only the centre voxel in-mask. Offset index 2 is the zero
// displacement; the centre carries label 50 and its 4-neighbours label 200.
inline TransformDistField MismatchField()
{
  DisplacementSpace space({{-1, 0}, {0, -1}, {0, 0}, {1, 0}, {0, 1}});
  TransformDistField field(3, 3, space);
  field.Set(1, 1, VoxelTransformDist({0.2, 0.2, 0.25, 0.2, 0.15}));
  return field;
}

inline LabelMap MismatchLabels()
{
  return LabelMap(3, 3, {0, 200, 0, 200, 50, 200, 0, 200, 0});
}

// 3x3 field over the radius-1 square space with a nearly flat distribution
// peaked at the zero displacement. Every voxel is "tumor" except the
// bottom-right corner.
inline TransformDistField FlatTumorField()
{
  TransformDistField field(3, 3, DisplacementSpace::Square(1));
  std::vector<double> probs(9, 0.106875);
  probs[4] = 0.145;
  field.Set(1, 1, VoxelTransformDist(probs));
  return field;
}

inline LabelMap FlatTumorLabels()
{
  return LabelMap(3, 3, {1, 1, 1, 1, 1, 1, 1, 1, 2}, {{1, "tumor"}, {2, "other tissue"}});
}

}  // namespace regunc::testing
