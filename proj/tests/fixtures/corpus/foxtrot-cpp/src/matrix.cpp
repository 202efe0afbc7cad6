#include <vector>

namespace linalg {

/// A dense row-major matrix of doubles.
/// Rows and columns are fixed at construction time.
class Matrix {
 public:
  /**
   * \brief Create a matrix of the given shape filled with zeros.
   * \param rows number of rows
   * \param cols number of columns
   */
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  /// Returns a reference to the element at row r and column c.
  double& at(int r, int c) { return data_[r * cols_ + c]; }

  int rows() const { return rows_; }

 private:
  int rows_;
  int cols_;
  std::vector<double> data_;
};

/**
 * \brief Multiply two matrices and return the product matrix.
 * \param a left operand
 * \param b right operand
 * \return the product a times b
 */
Matrix multiply(Matrix& a, Matrix& b) {
  Matrix out(a.rows(), a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    // accumulate the dot product for each output cell
    for (int j = 0; j < a.rows(); ++j) out.at(i, j) += a.at(i, j) * b.at(j, i);
  }
  return out;
}

}  // namespace linalg
