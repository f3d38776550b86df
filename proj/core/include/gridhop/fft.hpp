#pragma once

#include "gridhop/model.hpp"

namespace gridhop {

// Forward DFT of every row, zero-padded to n_out columns:
//   out(m, k) = sum_s in(m, s) * exp(-j2pi k s / n_out)
// i.e. column k holds the correlations <in(m), a(k * n_samples / n_out)>.
CMat fft_rows(const CMat& in, int n_out);

// Forward DFT down every column, zero-padded to n_out rows.
CMat fft_cols(const CMat& in, int n_out);

// Zero-padded 2D forward DFT (rows and columns together); one planned
// transform, much cheaper than composing fft_rows and fft_cols.
CMat fft_2d(const CMat& in, int n_rows_out, int n_cols_out);

// fft_rows with the result split into real/imaginary planes of shape
// (rows x n_out), column-major: bin k's per-row values are contiguous in
// re.col(k) / im.col(k). This is the layout the hop scan streams over.
void fft_rows_split(const CMat& in, int n_out, Eigen::MatrixXd& re,
                    Eigen::MatrixXd& im);

}  // namespace gridhop
