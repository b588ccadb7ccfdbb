#pragma once

#include <array>

#include "cmlptr/tensor.hpp"

namespace cmlptr {

/// (n-1) x n first-order difference matrix: 1 on the diagonal, -1 on the
/// superdiagonal.
Matrix diff_matrix(Index n);

Matrix identity_matrix(Index n);

/// Mode-n unfolding: I_n rows; the column index enumerates the remaining two
/// modes with the lower-numbered one varying fastest.
Matrix unfold(const Tensor3& t, int mode);
Tensor3 fold(const Matrix& m, int mode, const Shape3& shape);

/// t x_mode m. m.cols() must equal the extent of `mode`; that extent becomes m.rows().
Tensor3 mode_n_product(const Tensor3& t, const Matrix& m, int mode);

/// Generic permutation with MATLAB `permute` semantics: output dimension d is
/// input dimension order[d] (orders are 1-based).
Tensor3 permute(const Tensor3& t, const std::array<int, 3>& order);

/// P_n(t) = permute(t, [3-n, 3, n]), n in {1, 2}.
Tensor3 permute_p(const Tensor3& t, int n);
Tensor3 inverse_permute_p(const Tensor3& t, int n);

/// sqrt(|t x_1 D|_F^2 + |t x_2 D|_F^2)
double tv_norm(const Tensor3& t);
/// |t x_1 D|_1 + |t x_2 D|_1, entrywise absolute sums.
double atv_norm(const Tensor3& t);

}  // namespace cmlptr
