// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "copyaug/basic_aug.hpp"
#include "copyaug/dataset_io.hpp"
#include "copyaug/error.hpp"
#include "copyaug/image.hpp"
#include "copyaug/patch_ops.hpp"
#include "copyaug/pipeline.hpp"
#include "copyaug/rng.hpp"
#include "copyaug/schedule.hpp"
#include "copyaug/source_buffer.hpp"
