// Copyright 2026 The pose3d Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POSE3D_POSE3D_HPP_
#define POSE3D_POSE3D_HPP_

#include "pose3d/config.hpp"
#include "pose3d/dataset.hpp"
#include "pose3d/error.hpp"
#include "pose3d/image.hpp"
#include "pose3d/inference.hpp"
#include "pose3d/layers.hpp"
#include "pose3d/loss.hpp"
#include "pose3d/network.hpp"
#include "pose3d/optimizer.hpp"
#include "pose3d/parallel.hpp"
#include "pose3d/pipeline.hpp"
#include "pose3d/preprocess.hpp"
#include "pose3d/rng.hpp"
#include "pose3d/sample.hpp"
#include "pose3d/synthetic.hpp"
#include "pose3d/tensor.hpp"
#include "pose3d/trainer.hpp"
#include "pose3d/weights_io.hpp"

#endif  // POSE3D_POSE3D_HPP_
