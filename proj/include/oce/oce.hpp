#pragma once

#include "oce/core/error.hpp"
#include "oce/core/manifest.hpp"
#include "oce/core/parallel.hpp"
#include "oce/core/random.hpp"
#include "oce/core/seed.hpp"
#include "oce/core/tensor.hpp"
#include "oce/core/tensor_io.hpp"
#include "oce/core/types.hpp"
#include "oce/eval/config.hpp"
#include "oce/eval/fold_plan.hpp"
#include "oce/eval/metrics.hpp"
#include "oce/eval/prepare.hpp"
#include "oce/eval/protocol.hpp"
#include "oce/eval/report.hpp"
#include "oce/nn/adam.hpp"
#include "oce/nn/checkpoint.hpp"
#include "oce/nn/conv.hpp"
#include "oce/nn/dense_block.hpp"
#include "oce/nn/grad_check.hpp"
#include "oce/nn/inputs.hpp"
#include "oce/nn/layers.hpp"
#include "oce/nn/network.hpp"
#include "oce/nn/train.hpp"
#include "oce/phasepipe.hpp"
#include "oce/shallow/linreg.hpp"
#include "oce/shallow/scaler.hpp"
#include "oce/shallow/svr.hpp"
#include "oce/velocity.hpp"
#include "oce/wavesim.hpp"
