/* Copyright 2026 The drivenet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License. */

#pragma once

// Umbrella header: the whole library.

#include "drivenet/augment/otc.hpp"
#include "drivenet/augment/pipeline.hpp"
#include "drivenet/config/experiment.hpp"
#include "drivenet/dataio/flow.hpp"
#include "drivenet/dataio/image_io.hpp"
#include "drivenet/dataio/manifest.hpp"
#include "drivenet/dataio/sampling.hpp"
#include "drivenet/dataio/split.hpp"
#include "drivenet/dataio/synthetic.hpp"
#include "drivenet/eval/ablation.hpp"
#include "drivenet/eval/inference.hpp"
#include "drivenet/eval/kfold.hpp"
#include "drivenet/eval/metrics.hpp"
#include "drivenet/eval/report.hpp"
#include "drivenet/net/checkpoint.hpp"
#include "drivenet/net/isda.hpp"
#include "drivenet/net/model.hpp"
#include "drivenet/train/trainer.hpp"
