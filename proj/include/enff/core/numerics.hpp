/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <vector>

#include "enff/core/types.hpp"

namespace enff {

/// Turns log-weights into normalised weights in place and returns log(sum exp).
double softmax_inplace(Eigen::ArrayXd& logw);

double log_sum_exp(const Eigen::ArrayXd& logw);

/// Sample mean and covariance of the columns of X (1/N normalisation).
StateVec column_mean(const Matrix& X);
Matrix sample_covariance(const Matrix& X, const Matrix& Y);

/// Stacks member vectors as rows of an N x d matrix.
Matrix stack_rows(const std::vector<StateVec>& v);

}  // namespace enff
