#pragma once

// A small modelling layer for linear matrix inequalities: named decision
// blocks, matrix-valued affine expressions over them, and lowering to the
// conic standard form consumed by a ConicSolver.

#include <Eigen/Dense>

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "actdeg/conic.hpp"
#include "actdeg/errors.hpp"

namespace actdeg {

/// Matrix-valued affine function of the scalar decision vector x:
///   E(x) = constant + sum_k x_k * coefficient_k.
class AffineExpr {
 public:
  AffineExpr() = default;
  AffineExpr(int rows, int cols) : constant_(Eigen::MatrixXd::Zero(rows, cols)) {}

  static AffineExpr zeros(int rows, int cols) { return AffineExpr(rows, cols); }
  static AffineExpr constant(const Eigen::MatrixXd& m) {
    AffineExpr e(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    e.constant_ = m;
    return e;
  }
  static AffineExpr identity(int n) { return constant(Eigen::MatrixXd::Identity(n, n)); }

  int rows() const { return static_cast<int>(constant_.rows()); }
  int cols() const { return static_cast<int>(constant_.cols()); }
  const Eigen::MatrixXd& constant_part() const { return constant_; }
  const std::map<int, Eigen::MatrixXd>& terms() const { return terms_; }

  void add_term(int var, const Eigen::MatrixXd& coef) {
    if (coef.rows() != rows() || coef.cols() != cols()) throw InvalidInput("affine term shape mismatch");
    auto it = terms_.find(var);
    if (it == terms_.end())
      terms_.emplace(var, coef);
    else
      it->second += coef;
  }

  Eigen::MatrixXd evaluate(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd v = constant_;
    for (const auto& [k, c] : terms_) v += x(k) * c;
    return v;
  }

  AffineExpr transpose() const {
    AffineExpr r = constant(constant_.transpose());
    for (const auto& [k, c] : terms_) r.terms_.emplace(k, c.transpose());
    return r;
  }

  /// Exact (bitwise) symmetry of every coefficient.
  bool is_symmetric() const {
    if (rows() != cols()) return false;
    if (constant_ != constant_.transpose()) return false;
    for (const auto& [k, c] : terms_)
      if (c != c.transpose()) return false;
    return true;
  }

  AffineExpr trace() const {
    if (rows() != cols()) throw InvalidInput("trace of a non-square expression");
    AffineExpr r(1, 1);
    r.constant_(0, 0) = constant_.trace();
    for (const auto& [k, c] : terms_) r.terms_.emplace(k, Eigen::MatrixXd::Constant(1, 1, c.trace()));
    return r;
  }

  /// Diagonal matrix from a column-vector expression.
  AffineExpr diag() const {
    if (cols() != 1) throw InvalidInput("diag expects a column vector");
    const int n = rows();
    AffineExpr r(n, n);
    r.constant_ = constant_.col(0).asDiagonal();
    for (const auto& [k, c] : terms_) r.terms_.emplace(k, Eigen::MatrixXd(c.col(0).asDiagonal()));
    return r;
  }

  AffineExpr& operator+=(const AffineExpr& o) {
    check_same_shape(o);
    constant_ += o.constant_;
    for (const auto& [k, c] : o.terms_) add_term(k, c);
    return *this;
  }
  AffineExpr& operator-=(const AffineExpr& o) { return *this += -o; }
  AffineExpr& operator*=(double a) {
    constant_ *= a;
    for (auto& [k, c] : terms_) c *= a;
    return *this;
  }

  friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
  friend AffineExpr operator-(AffineExpr a) { return a *= -1.0; }
  friend AffineExpr operator*(double s, AffineExpr a) { return a *= s; }
  friend AffineExpr operator*(const Eigen::MatrixXd& m, const AffineExpr& a) {
    if (m.cols() != a.rows()) throw InvalidInput("left product shape mismatch");
    AffineExpr r = constant(m * a.constant_);
    for (const auto& [k, c] : a.terms_) r.terms_.emplace(k, m * c);
    return r;
  }
  friend AffineExpr operator*(const AffineExpr& a, const Eigen::MatrixXd& m) {
    if (a.cols() != m.rows()) throw InvalidInput("right product shape mismatch");
    AffineExpr r = constant(a.constant_ * m);
    for (const auto& [k, c] : a.terms_) r.terms_.emplace(k, c * m);
    return r;
  }

  /// Block assembly; every row of blocks must agree in height and every
  /// column in width.
  static AffineExpr blocks(const std::vector<std::vector<AffineExpr>>& grid) {
    if (grid.empty() || grid[0].empty()) throw InvalidInput("empty block grid");
    std::vector<int> heights, widths;
    for (const auto& row : grid) {
      if (row.size() != grid[0].size()) throw InvalidInput("ragged block grid");
      heights.push_back(row[0].rows());
    }
    for (const auto& blk : grid[0]) widths.push_back(blk.cols());
    int R = 0, C = 0;
    for (int h : heights) R += h;
    for (int w : widths) C += w;
    AffineExpr out(R, C);
    int r0 = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      int c0 = 0;
      for (std::size_t j = 0; j < grid[i].size(); ++j) {
        const auto& blk = grid[i][j];
        if (blk.rows() != heights[i] || blk.cols() != widths[j]) throw InvalidInput("block size mismatch");
        out.constant_.block(r0, c0, blk.rows(), blk.cols()) = blk.constant_;
        for (const auto& [k, c] : blk.terms_) {
          Eigen::MatrixXd full = Eigen::MatrixXd::Zero(R, C);
          full.block(r0, c0, blk.rows(), blk.cols()) = c;
          out.add_term(k, full);
        }
        c0 += widths[j];
      }
      r0 += heights[i];
    }
    return out;
  }

 private:
  void check_same_shape(const AffineExpr& o) const {
    if (o.rows() != rows() || o.cols() != cols()) throw InvalidInput("affine expression shape mismatch");
  }

  Eigen::MatrixXd constant_;
  std::map<int, Eigen::MatrixXd> terms_;
};

enum class BlockShape { symmetric, full, vector, scalar };

struct DecisionBlock {
  std::string name;
  BlockShape shape;
  int rows;
  int cols;
  int offset;  ///< first scalar index in x
  int count;   ///< number of scalars
};

enum class ConstraintKind { psd, nsd, nonnegative, second_order };

struct Constraint {
  std::string name;
  ConstraintKind kind;
  AffineExpr expr;  ///< the matrix (psd/nsd), the vector (nonnegative) or [t; u] (second_order)
};

/// Decision-variable registry plus constraint list and a linear objective.
class LmiProblem {
 public:
  DecisionBlock add_symmetric(const std::string& name, int n) { return add_block(name, BlockShape::symmetric, n, n, n * (n + 1) / 2); }
  DecisionBlock add_matrix(const std::string& name, int r, int c) { return add_block(name, BlockShape::full, r, c, r * c); }
  DecisionBlock add_vector(const std::string& name, int n) { return add_block(name, BlockShape::vector, n, 1, n); }
  DecisionBlock add_scalar(const std::string& name) { return add_block(name, BlockShape::scalar, 1, 1, 1); }

  bool has(const std::string& name) const { return index_.count(name) != 0; }

  const DecisionBlock& block(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw InvalidInput("unknown decision block '" + name + "'");
    return blocks_[it->second];
  }

  /// The block as an affine expression of x.
  AffineExpr var(const std::string& name) const {
    const auto& b = block(name);
    AffineExpr e(b.rows, b.cols);
    int k = b.offset;
    switch (b.shape) {
      case BlockShape::symmetric:
        for (int j = 0; j < b.cols; ++j)
          for (int i = j; i < b.rows; ++i) {
            Eigen::MatrixXd c = Eigen::MatrixXd::Zero(b.rows, b.cols);
            c(i, j) = 1.0;
            c(j, i) = 1.0;
            e.add_term(k++, c);
          }
        break;
      case BlockShape::full:
      case BlockShape::vector:
      case BlockShape::scalar:
        for (int j = 0; j < b.cols; ++j)
          for (int i = 0; i < b.rows; ++i) {
            Eigen::MatrixXd c = Eigen::MatrixXd::Zero(b.rows, b.cols);
            c(i, j) = 1.0;
            e.add_term(k++, c);
          }
        break;
    }
    return e;
  }

  /// Value of a decision block at x.
  Eigen::MatrixXd value(const std::string& name, const Eigen::VectorXd& x) const { return var(name).evaluate(x); }

  /// Packs named block values into a decision vector (inverse of value()).
  void assign(const std::string& name, const Eigen::MatrixXd& v, Eigen::VectorXd& x) const {
    const auto& b = block(name);
    if (v.rows() != b.rows || v.cols() != b.cols) throw InvalidInput("assigned value has the wrong shape for '" + name + "'");
    int k = b.offset;
    if (b.shape == BlockShape::symmetric) {
      for (int j = 0; j < b.cols; ++j)
        for (int i = j; i < b.rows; ++i) x(k++) = v(i, j);
    } else {
      for (int j = 0; j < b.cols; ++j)
        for (int i = 0; i < b.rows; ++i) x(k++) = v(i, j);
    }
  }

  int num_variables() const { return num_vars_; }
  const std::vector<DecisionBlock>& decision_blocks() const { return blocks_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const AffineExpr& objective() const { return objective_; }

  const Constraint& constraint(const std::string& name) const {
    for (const auto& c : constraints_)
      if (c.name == name) return c;
    throw InvalidInput("unknown constraint '" + name + "'");
  }

  /// expr >= 0 in the semidefinite sense.
  void add_psd(const std::string& name, const AffineExpr& expr) { add_matrix_constraint(name, ConstraintKind::psd, expr); }
  /// expr <= 0 in the semidefinite sense.
  void add_nsd(const std::string& name, const AffineExpr& expr) { add_matrix_constraint(name, ConstraintKind::nsd, expr); }
  /// Elementwise expr >= 0 for a column-vector (or scalar) expression.
  void add_nonnegative(const std::string& name, const AffineExpr& expr) {
    if (expr.cols() != 1) throw InvalidInput("nonnegativity constraint '" + name + "' must be a column vector");
    check_refs(name, expr);
    constraints_.push_back({name, ConstraintKind::nonnegative, expr});
  }
  /// ||u||_2 <= t.
  void add_second_order(const std::string& name, const AffineExpr& t, const AffineExpr& u) {
    if (t.rows() != 1 || t.cols() != 1 || u.cols() != 1) throw InvalidInput("second-order constraint '" + name + "' has the wrong shape");
    auto e = AffineExpr::blocks({{t}, {u}});
    check_refs(name, e);
    constraints_.push_back({name, ConstraintKind::second_order, e});
  }

  void set_objective(const AffineExpr& obj) {
    if (obj.rows() != 1 || obj.cols() != 1) throw InvalidInput("objective must be scalar");
    check_refs("objective", obj);
    objective_ = obj;
  }

  double objective_value(const Eigen::VectorXd& x) const { return objective_.evaluate(x)(0, 0); }

  /// Lowers to  min c'x  s.t.  b - A x in K. The objective constant is dropped.
  ConicProblem to_conic() const {
    ConicProblem p;
    const int n = num_vars_;
    p.c = Eigen::VectorXd::Zero(n);
    for (const auto& [k, c] : objective_.terms()) p.c(k) = c(0, 0);

    std::vector<const Constraint*> lin, soc, sdp;
    for (const auto& c : constraints_) {
      if (c.kind == ConstraintKind::nonnegative)
        lin.push_back(&c);
      else if (c.kind == ConstraintKind::second_order)
        soc.push_back(&c);
      else
        sdp.push_back(&c);
    }
    int rows = 0;
    int nlin = 0;
    for (auto* c : lin) nlin += c->expr.rows();
    rows += nlin;
    for (auto* c : soc) rows += c->expr.rows();
    for (auto* c : sdp) rows += svec::size(c->expr.rows());
    p.A = Eigen::MatrixXd::Zero(rows, n);
    p.b = Eigen::VectorXd::Zero(rows);

    int r = 0;
    if (nlin > 0) p.cones.push_back({ConeKind::nonnegative, nlin});
    for (auto* c : lin) {
      const int h = c->expr.rows();
      p.b.segment(r, h) = c->expr.constant_part().col(0);
      for (const auto& [k, m] : c->expr.terms()) p.A.block(r, k, h, 1) = -m.col(0);
      r += h;
    }
    for (auto* c : soc) {
      const int h = c->expr.rows();
      p.cones.push_back({ConeKind::second_order, h});
      p.b.segment(r, h) = c->expr.constant_part().col(0);
      for (const auto& [k, m] : c->expr.terms()) p.A.block(r, k, h, 1) = -m.col(0);
      r += h;
    }
    for (auto* c : sdp) {
      const int d = c->expr.rows();
      const int h = svec::size(d);
      const double sign = c->kind == ConstraintKind::psd ? 1.0 : -1.0;
      p.cones.push_back({ConeKind::psd, d});
      p.b.segment(r, h) = sign * svec::pack(c->expr.constant_part());
      for (const auto& [k, m] : c->expr.terms()) p.A.block(r, k, h, 1) = -sign * svec::pack(m);
      r += h;
    }
    return p;
  }

  /// Plain-text dump: decision blocks with offsets, constraint list with sizes.
  std::string dump() const {
    std::ostringstream os;
    os << "# lmi problem\n";
    os << "variables " << num_vars_ << "\n";
    for (const auto& b : blocks_) {
      os << "block " << b.name << " " << shape_name(b.shape) << " " << b.rows << "x" << b.cols << " offset "
         << b.offset << " count " << b.count << "\n";
    }
    os << "objective";
    for (const auto& [k, c] : objective_.terms()) os << " " << std::setprecision(17) << c(0, 0) << "*x" << k;
    os << "\n";
    for (const auto& c : constraints_) {
      os << "constraint " << c.name << " " << kind_name(c.kind) << " " << c.expr.rows() << "x" << c.expr.cols()
         << " vars";
      for (const auto& [k, m] : c.expr.terms()) os << " " << k;
      os << "\n";
    }
    return os.str();
  }

 private:
  DecisionBlock add_block(const std::string& name, BlockShape shape, int r, int c, int count) {
    if (r <= 0 || c <= 0) throw InvalidInput("decision block '" + name + "' must have positive size");
    if (has(name)) throw InvalidInput("duplicate decision block '" + name + "'");
    index_[name] = blocks_.size();
    blocks_.push_back({name, shape, r, c, num_vars_, count});
    num_vars_ += count;
    return blocks_.back();
  }

  void add_matrix_constraint(const std::string& name, ConstraintKind kind, const AffineExpr& expr) {
    if (!expr.is_symmetric()) throw InvalidInput("matrix inequality '" + name + "' is not symmetric");
    check_refs(name, expr);
    constraints_.push_back({name, kind, expr});
  }

  void check_refs(const std::string& name, const AffineExpr& e) const {
    for (const auto& [k, c] : e.terms())
      if (k < 0 || k >= num_vars_) throw InvalidInput("constraint '" + name + "' references an unregistered variable");
  }

  static const char* shape_name(BlockShape s) {
    switch (s) {
      case BlockShape::symmetric: return "symmetric";
      case BlockShape::full: return "full";
      case BlockShape::vector: return "vector";
      case BlockShape::scalar: return "scalar";
    }
    return "?";
  }
  static const char* kind_name(ConstraintKind k) {
    switch (k) {
      case ConstraintKind::psd: return "psd";
      case ConstraintKind::nsd: return "nsd";
      case ConstraintKind::nonnegative: return "nonnegative";
      case ConstraintKind::second_order: return "second_order";
    }
    return "?";
  }

  std::vector<DecisionBlock> blocks_;
  std::map<std::string, std::size_t> index_;
  std::vector<Constraint> constraints_;
  AffineExpr objective_ = AffineExpr::zeros(1, 1);
  int num_vars_ = 0;
};

}  // namespace actdeg
