#pragma once

// Dense exact linear algebra over the rationals: matrices, reduced row
// echelon form, rank, nullspaces and a small phase-one simplex for
// nonnegative feasibility.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ergoscope/error.hpp"
#include "ergoscope/rational.hpp"

namespace ergoscope {

  using Vector = std::vector<Rational>;

  class Matrix {
   public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    Matrix(std::size_t rows, std::size_t cols, std::vector<Rational> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
      if (data_.size() != rows * cols) {
        throw InvalidInput("matrix data does not match its shape");
      }
    }

    static Matrix identity(std::size_t n) {
      Matrix m(n, n);
      for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1;
      }
      return m;
    }

    static Matrix zero(std::size_t n) {
      return Matrix(n, n);
    }

    static Matrix filled(std::size_t rows, std::size_t cols, Rational value) {
      return Matrix(rows, cols, std::vector<Rational>(rows * cols, value));
    }

    std::size_t rows() const noexcept {
      return rows_;
    }
    std::size_t cols() const noexcept {
      return cols_;
    }
    bool is_square() const noexcept {
      return rows_ == cols_;
    }

    Rational& operator()(std::size_t i, std::size_t j) {
      return data_[i * cols_ + j];
    }
    Rational const& operator()(std::size_t i, std::size_t j) const {
      return data_[i * cols_ + j];
    }

    std::span<Rational const> row(std::size_t i) const {
      return {data_.data() + i * cols_, cols_};
    }

    std::vector<Rational> const& data() const noexcept {
      return data_;
    }

    Matrix transpose() const {
      Matrix t(cols_, rows_);
      for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
          t(j, i) = (*this)(i, j);
        }
      }
      return t;
    }

    Matrix& operator+=(Matrix const& other) {
      check_same_shape(other);
      for (std::size_t k = 0; k < data_.size(); ++k) {
        data_[k] += other.data_[k];
      }
      return *this;
    }

    Matrix& operator-=(Matrix const& other) {
      check_same_shape(other);
      for (std::size_t k = 0; k < data_.size(); ++k) {
        data_[k] -= other.data_[k];
      }
      return *this;
    }

    Matrix& operator*=(Rational const& scalar) {
      for (auto& x : data_) {
        x *= scalar;
      }
      return *this;
    }

    friend Matrix operator+(Matrix lhs, Matrix const& rhs) {
      return lhs += rhs;
    }
    friend Matrix operator-(Matrix lhs, Matrix const& rhs) {
      return lhs -= rhs;
    }
    friend Matrix operator*(Matrix lhs, Rational const& s) {
      return lhs *= s;
    }
    friend Matrix operator*(Rational const& s, Matrix rhs) {
      return rhs *= s;
    }

    friend Matrix operator*(Matrix const& a, Matrix const& b) {
      if (a.cols_ != b.rows_) {
        throw InvalidInput("matrix product with incompatible shapes");
      }
      Matrix c(a.rows_, b.cols_);
      for (std::size_t i = 0; i < a.rows_; ++i) {
        for (std::size_t k = 0; k < a.cols_; ++k) {
          Rational const& aik = a(i, k);
          if (aik == 0) {
            continue;
          }
          for (std::size_t j = 0; j < b.cols_; ++j) {
            if (b(k, j) != 0) {
              c(i, j) += aik * b(k, j);
            }
          }
        }
      }
      return c;
    }

    friend Vector operator*(Matrix const& a, Vector const& v) {
      if (a.cols_ != v.size()) {
        throw InvalidInput("matrix-vector product with incompatible shapes");
      }
      Vector out(a.rows_);
      for (std::size_t i = 0; i < a.rows_; ++i) {
        for (std::size_t j = 0; j < a.cols_; ++j) {
          if (a(i, j) != 0 && v[j] != 0) {
            out[i] += a(i, j) * v[j];
          }
        }
      }
      return out;
    }

    friend bool operator==(Matrix const& a, Matrix const& b) {
      return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    // Lexicographic on (shape, entries); used only for canonical ordering.
    friend bool operator<(Matrix const& a, Matrix const& b) {
      if (a.rows_ != b.rows_) {
        return a.rows_ < b.rows_;
      }
      if (a.cols_ != b.cols_) {
        return a.cols_ < b.cols_;
      }
      return a.data_ < b.data_;
    }

    /// Largest absolute entry; the norm used for every defect and distance.
    Rational max_abs_entry() const {
      Rational best = 0;
      for (auto const& x : data_) {
        Rational a = abs(x);
        if (a > best) {
          best = a;
        }
      }
      return best;
    }

    bool is_row_stochastic() const {
      if (!is_square()) {
        return false;
      }
      for (std::size_t i = 0; i < rows_; ++i) {
        Rational sum = 0;
        for (std::size_t j = 0; j < cols_; ++j) {
          if ((*this)(i, j) < 0) {
            return false;
          }
          sum += (*this)(i, j);
        }
        if (sum != 1) {
          return false;
        }
      }
      return true;
    }

    bool is_column_stochastic() const {
      return transpose().is_row_stochastic();
    }

    bool is_diagonal() const {
      for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
          if (i != j && (*this)(i, j) != 0) {
            return false;
          }
        }
      }
      return true;
    }

    /// Submatrix on the given row and column index sets (in that order).
    Matrix restrict_to(std::span<std::size_t const> idx) const {
      Matrix r(idx.size(), idx.size());
      for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = 0; b < idx.size(); ++b) {
          r(a, b) = (*this)(idx[a], idx[b]);
        }
      }
      return r;
    }

   private:
    void check_same_shape(Matrix const& other) const {
      if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw InvalidInput("matrix shapes differ");
      }
    }

    std::size_t           rows_ = 0;
    std::size_t           cols_ = 0;
    std::vector<Rational> data_;
  };

  /// Square matrix acting on functions (rows) and, transposed, on measures.
  using OperatorMatrix = Matrix;

  inline Matrix power(Matrix const& m, unsigned exponent) {
    Matrix result = Matrix::identity(m.rows());
    Matrix base   = m;
    while (exponent != 0) {
      if (exponent & 1U) {
        result = result * base;
      }
      exponent >>= 1U;
      if (exponent != 0) {
        base = base * base;
      }
    }
    return result;
  }

  inline Rational dot(Vector const& a, Vector const& b) {
    if (a.size() != b.size()) {
      throw InvalidInput("dot product of vectors of different length");
    }
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] != 0 && b[i] != 0) {
        s += a[i] * b[i];
      }
    }
    return s;
  }

  inline Rational max_abs_distance(Vector const& a, Vector const& b) {
    if (a.size() != b.size()) {
      throw InvalidInput("distance of vectors of different length");
    }
    Rational best = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      Rational d = abs(a[i] - b[i]);
      if (d > best) {
        best = d;
      }
    }
    return best;
  }

  struct EchelonForm {
    Matrix                   reduced;
    std::vector<std::size_t> pivot_columns;
  };

  /// Gauss-Jordan elimination; pivots are normalised to 1.
  inline EchelonForm rref(Matrix m) {
    std::vector<std::size_t> pivots;
    std::size_t              r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
      std::size_t p = r;
      while (p < m.rows() && m(p, c) == 0) {
        ++p;
      }
      if (p == m.rows()) {
        continue;
      }
      if (p != r) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
          std::swap(m(p, j), m(r, j));
        }
      }
      Rational inv = 1 / m(r, c);
      for (std::size_t j = c; j < m.cols(); ++j) {
        m(r, j) *= inv;
      }
      for (std::size_t i = 0; i < m.rows(); ++i) {
        if (i == r || m(i, c) == 0) {
          continue;
        }
        Rational f = m(i, c);
        for (std::size_t j = c; j < m.cols(); ++j) {
          if (m(r, j) != 0) {
            m(i, j) -= f * m(r, j);
          }
        }
      }
      pivots.push_back(c);
      ++r;
    }
    return {std::move(m), std::move(pivots)};
  }

  inline std::size_t rank(Matrix const& m) {
    return rref(m).pivot_columns.size();
  }

  /// Rank of the matrix whose rows are the given vectors.
  inline std::size_t rank_of_rows(std::vector<Vector> const& rows,
                                  std::size_t                width) {
    if (rows.empty()) {
      return 0;
    }
    std::vector<Rational> data;
    data.reserve(rows.size() * width);
    for (auto const& v : rows) {
      if (v.size() != width) {
        throw InvalidInput("row vectors of inconsistent width");
      }
      data.insert(data.end(), v.begin(), v.end());
    }
    return rank(Matrix(rows.size(), width, std::move(data)));
  }

  /// Canonical nullspace basis: one vector per free column, with a 1 in that
  /// column and zeros in the other free columns.
  inline std::vector<Vector> nullspace(Matrix const& m) {
    auto [red, pivots] = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : pivots) {
      is_pivot[c] = true;
    }
    std::vector<Vector> basis;
    for (std::size_t free = 0; free < m.cols(); ++free) {
      if (is_pivot[free]) {
        continue;
      }
      Vector v(m.cols());
      v[free] = 1;
      for (std::size_t r = 0; r < pivots.size(); ++r) {
        v[pivots[r]] = -red(r, free);
      }
      basis.push_back(std::move(v));
    }
    return basis;
  }

  /// Finds x >= 0 with A x = b, or nothing if the system is infeasible.
  ///
  /// Phase one of the simplex method on the equality system after removing
  /// linearly dependent rows; Bland's rule guarantees termination.
  inline std::optional<Vector> nonnegative_solution(Matrix const& a,
                                                    Vector const& b) {
    if (a.rows() != b.size()) {
      throw InvalidInput("constraint matrix and right-hand side differ");
    }
    std::size_t const n = a.cols();
    // Augment, reduce, drop zero rows; inconsistent rows mean infeasible.
    Matrix aug(a.rows(), n + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        aug(i, j) = a(i, j);
      }
      aug(i, n) = b[i];
    }
    auto [red, pivots] = rref(std::move(aug));
    if (!pivots.empty() && pivots.back() == n) {
      return std::nullopt;
    }
    std::size_t const m = pivots.size();
    if (m == 0) {
      return Vector(n, Rational(0));
    }
    // Tableau columns: n originals, m artificials, rhs.
    std::size_t const width = n + m + 1;
    Matrix            t(m, width);
    for (std::size_t i = 0; i < m; ++i) {
      bool flip = red(i, n) < 0;
      for (std::size_t j = 0; j < n; ++j) {
        t(i, j) = flip ? Rational(-red(i, j)) : red(i, j);
      }
      t(i, n + i)     = 1;
      t(i, width - 1) = flip ? Rational(-red(i, n)) : red(i, n);
    }
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
      basis[i] = n + i;
    }
    // Reduced costs of "minimise sum of artificials".
    auto reduced_cost = [&](std::size_t j) {
      Rational c = j >= n && j < n + m ? Rational(1) : Rational(0);
      for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] >= n) {
          c -= t(i, j);
        }
      }
      return c;
    };
    while (true) {
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < n + m; ++j) {
        if (std::find(basis.begin(), basis.end(), j) != basis.end()) {
          continue;
        }
        if (reduced_cost(j) < 0) {
          enter = j;
          break;
        }
      }
      if (!enter) {
        break;
      }
      std::optional<std::size_t> leave;
      Rational                   best_ratio;
      for (std::size_t i = 0; i < m; ++i) {
        if (t(i, *enter) > 0) {
          Rational ratio = t(i, width - 1) / t(i, *enter);
          if (!leave || ratio < best_ratio
              || (ratio == best_ratio && basis[i] < basis[*leave])) {
            leave      = i;
            best_ratio = ratio;
          }
        }
      }
      if (!leave) {
        // Unbounded direction cannot occur for a bounded-below objective.
        throw InvariantViolation("phase-one simplex reported unboundedness");
      }
      std::size_t const r   = *leave;
      Rational          inv = 1 / t(r, *enter);
      for (std::size_t j = 0; j < width; ++j) {
        t(r, j) *= inv;
      }
      for (std::size_t i = 0; i < m; ++i) {
        if (i == r || t(i, *enter) == 0) {
          continue;
        }
        Rational f = t(i, *enter);
        for (std::size_t j = 0; j < width; ++j) {
          if (t(r, j) != 0) {
            t(i, j) -= f * t(r, j);
          }
        }
      }
      basis[r] = *enter;
    }
    Rational objective = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] >= n) {
        objective += t(i, width - 1);
      }
    }
    if (objective != 0) {
      return std::nullopt;
    }
    Vector x(n, Rational(0));
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < n) {
        x[basis[i]] = t(i, width - 1);
      }
    }
    return x;
  }

}  // namespace ergoscope
