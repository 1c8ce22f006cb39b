#pragma once

#include "reactnet/adam.hpp"
#include "reactnet/checkpoint.hpp"
#include "reactnet/distmat.hpp"
#include "reactnet/embeddings.hpp"
#include "reactnet/error.hpp"
#include "reactnet/gradcheck.hpp"
#include "reactnet/inference.hpp"
#include "reactnet/lanczos.hpp"
#include "reactnet/loss.hpp"
#include "reactnet/metrics.hpp"
#include "reactnet/net.hpp"
#include "reactnet/ops.hpp"
#include "reactnet/render.hpp"
#include "reactnet/subblocks.hpp"
#include "reactnet/synthetic.hpp"
#include "reactnet/tensor.hpp"
#include "reactnet/train.hpp"
