#pragma once

// Umbrella header for the hydronet library: SCADA data handling, missing-value
// imputation, EMD/HHT signal analysis, neural forecasting, and residual-based
// anomaly detection for water-distribution pressure management.

#include "hydronet/cli.hpp"
#include "hydronet/common.hpp"
#include "hydronet/config.hpp"
#include "hydronet/csv.hpp"
#include "hydronet/detect.hpp"
#include "hydronet/emd.hpp"
#include "hydronet/encode.hpp"
#include "hydronet/events.hpp"
#include "hydronet/fft.hpp"
#include "hydronet/forecaster.hpp"
#include "hydronet/forest.hpp"
#include "hydronet/fusion.hpp"
#include "hydronet/hilbert.hpp"
#include "hydronet/imf_matrix.hpp"
#include "hydronet/minmax.hpp"
#include "hydronet/nn_graph.hpp"
#include "hydronet/nn_io.hpp"
#include "hydronet/nn_layers.hpp"
#include "hydronet/nn_train.hpp"
#include "hydronet/series.hpp"
#include "hydronet/spline.hpp"
#include "hydronet/stats.hpp"
#include "hydronet/supervised.hpp"
#include "hydronet/svg.hpp"
#include "hydronet/synth.hpp"
#include "hydronet/tensor.hpp"
#include "hydronet/timestamp.hpp"
