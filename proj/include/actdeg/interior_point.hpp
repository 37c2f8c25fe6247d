#pragma once

// Primal-dual interior-point method on the homogeneous self-dual embedding
//
//   A'y + c tau = 0,   s = b tau - A x,   kappa = -c'x - b'y,
//   (s, y) in K x K,   tau, kappa >= 0,
//
// with Nesterov-Todd scaling and a Mehrotra predictor-corrector step. The
// arithmetic type is a template parameter; long double is the default because
// the synthesis programs mix entries spanning ten decades.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "actdeg/conic.hpp"

namespace actdeg {
namespace detail {

template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

/// Nesterov-Todd scaling of one cone block: W s = W^{-T} y = lambda.
template <typename T>
class ConeScaling {
 public:
  ConeScaling(Cone cone, int offset) : cone_(cone), offset_(offset) {}

  const Cone& cone() const { return cone_; }
  int offset() const { return offset_; }
  int size() const { return cone_.size(); }

  /// Recomputes the scaling at (s, y). Returns false if either point is not interior.
  bool update(const Vec<T>& s, const Vec<T>& y) {
    using std::sqrt;
    switch (cone_.kind) {
      case ConeKind::nonnegative: {
        if ((s.array() <= T(0)).any() || (y.array() <= T(0)).any()) return false;
        w_ = (y.array() / s.array()).sqrt();
        lambda_ = (s.array() * y.array()).sqrt();
        return true;
      }
      case ConeKind::second_order: {
        const T js = jnorm_sq(s), jy = jnorm_sq(y);
        if (s(0) <= T(0) || y(0) <= T(0) || js <= T(0) || jy <= T(0)) return false;
        const T aa = sqrt(jy), bb = sqrt(js);
        const T beta = sqrt(aa / bb);
        const T cc = sqrt((y.dot(s) / (aa * bb) + T(1)) / T(2));
        Vec<T> v = (y / aa + jmul(s) / bb) / (T(2) * cc);
        v(0) += T(1);
        v /= sqrt(T(2) * v(0));
        const int k = size();
        Mat<T> J = Mat<T>::Identity(k, k);
        J.diagonal().tail(k - 1).setConstant(T(-1));
        const Mat<T> H = T(2) * v * v.transpose() - J;
        W_ = beta * H;
        Winv_ = (J * H * J) / beta;
        lambda_ = W_ * s;
        return true;
      }
      case ConeKind::psd: {
        const int n = cone_.dim;
        const Mat<T> S = svec::unpack(s, n), Y = svec::unpack(y, n);
        Eigen::LLT<Mat<T>> ls(S), ly(Y);
        if (ls.info() != Eigen::Success || ly.info() != Eigen::Success) return false;
        const Mat<T> Ls = ls.matrixL(), Ly = ly.matrixL();
        Eigen::JacobiSVD<Mat<T>> svd(Ly.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Vec<T> sv = svd.singularValues();
        if ((sv.array() <= T(0)).any()) return false;
        const Mat<T>& V = svd.matrixV();
        const Mat<T>& U = svd.matrixU();
        const Vec<T> isq = sv.array().sqrt().inverse();
        // R = Ls V diag(sv)^{-1/2};  R^{-1} = diag(sv)^{-1/2} U' Ly'
        R_ = Ls * V * isq.asDiagonal();
        Rinv_ = isq.asDiagonal() * U.transpose() * Ly.transpose();
        lambda_ = sv;
        return true;
      }
    }
    return false;
  }

  /// lambda as a vector of the cone's space.
  Vec<T> lambda_vector() const {
    if (cone_.kind == ConeKind::psd) return svec::pack(Mat<T>(lambda_.asDiagonal()));
    return lambda_;
  }

  Vec<T> identity() const {
    Vec<T> e = Vec<T>::Zero(size());
    switch (cone_.kind) {
      case ConeKind::nonnegative: e.setOnes(); break;
      case ConeKind::second_order: e(0) = T(1); break;
      case ConeKind::psd: e = svec::pack(Mat<T>::Identity(cone_.dim, cone_.dim)); break;
    }
    return e;
  }

  Vec<T> apply_W(const Vec<T>& v) const {
    switch (cone_.kind) {
      case ConeKind::nonnegative: return w_.cwiseProduct(v);
      case ConeKind::second_order: return W_ * v;
      case ConeKind::psd: {
        const Mat<T> m = svec::unpack(v, cone_.dim);
        return svec::pack(Mat<T>(Rinv_ * m * Rinv_.transpose()));
      }
    }
    return v;
  }

  Vec<T> apply_Winv(const Vec<T>& v) const {
    switch (cone_.kind) {
      case ConeKind::nonnegative: return v.cwiseQuotient(w_);
      case ConeKind::second_order: return Winv_ * v;
      case ConeKind::psd: {
        const Mat<T> m = svec::unpack(v, cone_.dim);
        return svec::pack(Mat<T>(R_ * m * R_.transpose()));
      }
    }
    return v;
  }

  Vec<T> apply_WinvT(const Vec<T>& v) const {
    switch (cone_.kind) {
      case ConeKind::nonnegative: return v.cwiseQuotient(w_);
      case ConeKind::second_order: return Winv_ * v;  // symmetric
      case ConeKind::psd: {
        const Mat<T> m = svec::unpack(v, cone_.dim);
        return svec::pack(Mat<T>(R_.transpose() * m * R_));
      }
    }
    return v;
  }

  Vec<T> apply_WT(const Vec<T>& v) const {
    switch (cone_.kind) {
      case ConeKind::nonnegative: return w_.cwiseProduct(v);
      case ConeKind::second_order: return W_ * v;  // symmetric
      case ConeKind::psd: {
        const Mat<T> m = svec::unpack(v, cone_.dim);
        return svec::pack(Mat<T>(Rinv_.transpose() * m * Rinv_));
      }
    }
    return v;
  }

  /// W applied to the columns of M.
  Mat<T> scale_rows(const Mat<T>& M) const {
    switch (cone_.kind) {
      case ConeKind::nonnegative: return w_.asDiagonal() * M;
      case ConeKind::second_order: return W_ * M;
      case ConeKind::psd: {
        Mat<T> out(M.rows(), M.cols());
        for (int j = 0; j < M.cols(); ++j) out.col(j) = apply_W(M.col(j));
        return out;
      }
    }
    return M;
  }

  /// Jordan product u o v.
  Vec<T> jordan(const Vec<T>& u, const Vec<T>& v) const {
    switch (cone_.kind) {
      case ConeKind::nonnegative: return u.cwiseProduct(v);
      case ConeKind::second_order: {
        Vec<T> r(size());
        r(0) = u.dot(v);
        r.tail(size() - 1) = u(0) * v.tail(size() - 1) + v(0) * u.tail(size() - 1);
        return r;
      }
      case ConeKind::psd: {
        const Mat<T> U = svec::unpack(u, cone_.dim), V = svec::unpack(v, cone_.dim);
        return svec::pack(Mat<T>((U * V + V * U) / T(2)));
      }
    }
    return u;
  }

  /// Solves lambda o w = r for w.
  Vec<T> jordan_solve(const Vec<T>& r) const {
    switch (cone_.kind) {
      case ConeKind::nonnegative: return r.cwiseQuotient(lambda_);
      case ConeKind::second_order: {
        const int k = size();
        const T l0 = lambda_(0);
        const auto l1 = lambda_.tail(k - 1);
        const T det = l0 * l0 - l1.squaredNorm();
        Vec<T> w(k);
        w(0) = (l0 * r(0) - l1.dot(r.tail(k - 1))) / det;
        w.tail(k - 1) = (r.tail(k - 1) - w(0) * l1) / l0;
        return w;
      }
      case ConeKind::psd: {
        const int n = cone_.dim;
        Mat<T> m = svec::unpack(r, n);
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) m(i, j) *= T(2) / (lambda_(i) + lambda_(j));
        return svec::pack(m);
      }
    }
    return r;
  }

  /// Largest alpha with lambda + alpha d in the cone (infinity if unbounded).
  T max_step(const Vec<T>& d) const {
    using std::abs;
    using std::sqrt;
    const T inf = std::numeric_limits<T>::infinity();
    switch (cone_.kind) {
      case ConeKind::nonnegative: {
        T a = inf;
        for (int i = 0; i < d.size(); ++i)
          if (d(i) < T(0)) a = std::min(a, -lambda_(i) / d(i));
        return a;
      }
      case ConeKind::second_order: {
        const int k = size();
        const T c = jnorm_sq(lambda_);
        const T a = d(0) * d(0) - d.tail(k - 1).squaredNorm();
        const T b = lambda_(0) * d(0) - lambda_.tail(k - 1).dot(d.tail(k - 1));
        T best = inf;
        const T scale = std::max(abs(a), std::max(abs(b), c));
        if (abs(a) <= std::numeric_limits<T>::epsilon() * scale) {
          if (b < T(0)) best = -c / (T(2) * b);
        } else {
          const T disc = b * b - a * c;
          if (disc >= T(0)) {
            const T q = -(b + (b >= T(0) ? sqrt(disc) : -sqrt(disc)));
            for (const T r : {q / a, q != T(0) ? c / q : inf})
              if (r > T(0)) best = std::min(best, r);
          }
        }
        if (d(0) < T(0)) best = std::min(best, -lambda_(0) / d(0));
        return best;
      }
      case ConeKind::psd: {
        const Vec<T> isq = lambda_.array().sqrt().inverse();
        const Mat<T> m = isq.asDiagonal() * svec::unpack(d, cone_.dim) * isq.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Mat<T>> es(m, Eigen::EigenvaluesOnly);
        const T lo = es.eigenvalues().minCoeff();
        return lo >= T(0) ? inf : -T(1) / lo;
      }
    }
    return inf;
  }

  /// Largest alpha with u + alpha d in the cone, for an unscaled interior point u.
  static T max_step_unscaled(const Cone& cone, const Vec<T>& u, const Vec<T>& d) {
    ConeScaling<T> tmp(cone, 0);
    if (cone.kind == ConeKind::psd) {
      Eigen::LLT<Mat<T>> llt(svec::unpack(u, cone.dim));
      const Mat<T> L = llt.matrixL();
      const Mat<T> Li = L.inverse();
      const Mat<T> m = Li * svec::unpack(d, cone.dim) * Li.transpose();
      Eigen::SelfAdjointEigenSolver<Mat<T>> es(Mat<T>((m + m.transpose()) / T(2)), Eigen::EigenvaluesOnly);
      const T lo = es.eigenvalues().minCoeff();
      return lo >= T(0) ? std::numeric_limits<T>::infinity() : -T(1) / lo;
    }
    tmp.lambda_ = u;
    return tmp.max_step(d);
  }

  /// Distance-to-boundary style measure: smallest "eigenvalue" of u.
  static T min_eigenvalue(const Cone& cone, const Vec<T>& u) {
    using std::sqrt;
    switch (cone.kind) {
      case ConeKind::nonnegative: return u.minCoeff();
      case ConeKind::second_order: return u(0) - u.tail(u.size() - 1).norm();
      case ConeKind::psd: {
        Eigen::SelfAdjointEigenSolver<Mat<T>> es(svec::unpack(u, cone.dim), Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
      }
    }
    return T(0);
  }

 private:
  T jnorm_sq(const Vec<T>& v) const { return v(0) * v(0) - v.tail(v.size() - 1).squaredNorm(); }
  Vec<T> jmul(const Vec<T>& v) const {
    Vec<T> r = -v;
    r(0) = v(0);
    return r;
  }

  Cone cone_;
  int offset_;
  Vec<T> w_;
  Mat<T> W_, Winv_;
  Mat<T> R_, Rinv_;
  Vec<T> lambda_;
};

/// Ruiz-style equilibration: A_hat = E A D with E uniform inside each
/// second-order and PSD block so that cone membership is preserved.
template <typename T>
struct Equilibration {
  Vec<T> D, E;
  T cost_scale = T(1), rhs_scale = T(1);

  static Equilibration identity(int n, int m) {
    Equilibration e;
    e.D = Vec<T>::Ones(n);
    e.E = Vec<T>::Ones(m);
    return e;
  }

  static Equilibration compute(const Mat<T>& A, const Vec<T>& b, const Vec<T>& c, const std::vector<Cone>& cones) {
    using std::sqrt;
    const int m = static_cast<int>(A.rows()), n = static_cast<int>(A.cols());
    Equilibration e = identity(n, m);
    Mat<T> S = A;
    const T lo = T(1e-6), hi = T(1e6);
    for (int iter = 0; iter < 25; ++iter) {
      Vec<T> dc(n), er(m);
      for (int j = 0; j < n; ++j) {
        const T v = S.col(j).cwiseAbs().maxCoeff();
        dc(j) = v > T(0) ? T(1) / sqrt(v) : T(1);
      }
      int off = 0;
      for (const auto& k : cones) {
        const int sz = k.size();
        if (k.kind == ConeKind::nonnegative) {
          for (int i = off; i < off + sz; ++i) {
            const T v = S.row(i).cwiseAbs().maxCoeff();
            er(i) = v > T(0) ? T(1) / sqrt(v) : T(1);
          }
        } else {
          const T v = S.middleRows(off, sz).cwiseAbs().maxCoeff();
          er.segment(off, sz).setConstant(v > T(0) ? T(1) / sqrt(v) : T(1));
        }
        off += sz;
      }
      e.D = (e.D.array() * dc.array()).cwiseMax(lo).cwiseMin(hi);
      e.E = (e.E.array() * er.array()).cwiseMax(lo).cwiseMin(hi);
      S = e.E.asDiagonal() * A * e.D.asDiagonal();
    }
    const T cn = (e.D.cwiseProduct(c)).cwiseAbs().maxCoeff();
    const T bn = (e.E.cwiseProduct(b)).cwiseAbs().maxCoeff();
    e.cost_scale = cn > T(0) ? T(1) / cn : T(1);
    e.rhs_scale = bn > T(0) ? T(1) / bn : T(1);
    return e;
  }
};

}  // namespace detail

/// Homogeneous self-dual interior-point conic solver.
template <typename T = long double>
class InteriorPointSolver final : public ConicSolver {
 public:
  std::string name() const override { return "hsde-ipm"; }

  ConicSolution solve(const ConicProblem& problem, const ConicSettings& settings) const override {
    using detail::Mat;
    using detail::Vec;
    using std::abs;
    using std::sqrt;
    problem.check();

    const int n = problem.num_variables();
    const int m = problem.num_rows();
    const Mat<T> A0 = problem.A.template cast<T>();
    const Vec<T> b0 = problem.b.template cast<T>();
    const Vec<T> c0 = problem.c.template cast<T>();

    const auto eq = settings.equilibrate ? detail::Equilibration<T>::compute(A0, b0, c0, problem.cones)
                                         : detail::Equilibration<T>::identity(n, m);
    const Mat<T> A = eq.E.asDiagonal() * A0 * eq.D.asDiagonal();
    const Vec<T> b = eq.rhs_scale * eq.E.cwiseProduct(b0);
    const Vec<T> c = eq.cost_scale * eq.D.cwiseProduct(c0);

    std::vector<detail::ConeScaling<T>> blocks;
    int nu = 0;
    {
      int off = 0;
      for (const auto& k : problem.cones) {
        blocks.emplace_back(k, off);
        off += k.size();
        nu += k.degree();
      }
    }

    Vec<T> x = Vec<T>::Zero(n), s(m), y(m);
    for (auto& blk : blocks) {
      s.segment(blk.offset(), blk.size()) = blk.identity();
      y.segment(blk.offset(), blk.size()) = blk.identity();
    }
    T tau = T(1), kappa = T(1);

    const T bnorm = b0.cwiseAbs().maxCoeff(), cnorm = c0.cwiseAbs().maxCoeff();

    ConicSolution out;
    auto unscale = [&](ConicSolution& sol, const Vec<T>& xs, const Vec<T>& ss, const Vec<T>& ys, T t) {
      sol.x = (eq.D.cwiseProduct(xs) / (eq.rhs_scale * t)).template cast<double>();
      sol.s = (ss.cwiseQuotient(eq.E) / (eq.rhs_scale * t)).template cast<double>();
      sol.y = (eq.E.cwiseProduct(ys) / (eq.cost_scale * t)).template cast<double>();
    };

    const int N = n + m + 1;
    T prev_mu = std::numeric_limits<T>::infinity();
    int stall = 0;
    for (int iter = 0; iter <= settings.max_iterations; ++iter) {
      out.iterations = iter;
      // Unscaled iterate for termination checks.
      const Vec<T> xu = eq.D.cwiseProduct(x) / eq.rhs_scale;
      const Vec<T> su = s.cwiseQuotient(eq.E) / eq.rhs_scale;
      const Vec<T> yu = eq.E.cwiseProduct(y) / eq.cost_scale;
      const T pres = (A0 * xu + su - b0 * tau).cwiseAbs().maxCoeff() / tau / (T(1) + bnorm);
      const T dres = (A0.transpose() * yu + c0 * tau).cwiseAbs().maxCoeff() / tau / (T(1) + cnorm);
      const T pobj = c0.dot(xu) / tau, dobj = -b0.dot(yu) / tau;
      const T gap = abs(pobj - dobj);
      const T mu = (s.dot(y) + tau * kappa) / T(nu + 1);

      out.primal_residual = static_cast<double>(pres);
      out.dual_residual = static_cast<double>(dres);
      out.primal_objective = static_cast<double>(pobj);
      out.dual_objective = static_cast<double>(dobj);
      out.gap = static_cast<double>(gap);
      if (settings.verbose)
        std::fprintf(stderr, "%3d  pobj %+.8Le  dobj %+.8Le  pres %.2Le  dres %.2Le  gap %.2Le  tau %.2Le  kap %.2Le  mu %.2Le\n",
                     iter, (long double)pobj, (long double)dobj, (long double)pres, (long double)dres,
                     (long double)gap, (long double)tau, (long double)kappa, (long double)mu);

      const bool gap_ok = gap <= T(settings.tol_gap_abs) ||
                          gap <= T(settings.tol_gap_rel) * std::min(abs(pobj), abs(dobj));
      if (pres <= T(settings.tol_feas) && dres <= T(settings.tol_feas) && gap_ok) {
        out.status = ConicStatus::optimal;
        unscale(out, x, s, y, tau);
        out.message = "converged";
        return out;
      }
      // Infeasibility certificates on the unscaled data.
      const T by = b0.dot(yu);
      if (by < T(0)) {
        const T r = (A0.transpose() * yu).cwiseAbs().maxCoeff() / (-by);
        if (r <= T(settings.tol_infeas) && tau < T(1e-3) * kappa) {
          out.status = ConicStatus::primal_infeasible;
          out.certificate_residual = static_cast<double>(r);
          out.y = (yu / (-by)).template cast<double>();
          out.x = Eigen::VectorXd::Zero(n);
          out.s = Eigen::VectorXd::Zero(m);
          out.message = "primal infeasibility certificate found";
          return out;
        }
      }
      const T cx = c0.dot(xu);
      if (cx < T(0)) {
        const T r = (A0 * xu + su).cwiseAbs().maxCoeff() / (-cx);
        if (r <= T(settings.tol_infeas) && tau < T(1e-3) * kappa) {
          out.status = ConicStatus::dual_infeasible;
          out.certificate_residual = static_cast<double>(r);
          out.x = (xu / (-cx)).template cast<double>();
          out.s = (su / (-cx)).template cast<double>();
          out.y = Eigen::VectorXd::Zero(m);
          out.message = "dual infeasibility certificate found";
          return out;
        }
      }
      if (iter == settings.max_iterations) break;

      if (mu >= prev_mu * T(0.9999)) {
        if (++stall >= 8) {
          out.status = ConicStatus::numerical_failure;
          out.message = "stalled";
          unscale(out, x, s, y, tau);
          return out;
        }
      } else {
        stall = 0;
      }
      prev_mu = mu;

      for (auto& blk : blocks) {
        if (!blk.update(s.segment(blk.offset(), blk.size()), y.segment(blk.offset(), blk.size()))) {
          out.status = ConicStatus::numerical_failure;
          out.message = "iterate left the cone interior";
          unscale(out, x, s, y, tau);
          return out;
        }
      }

      // Scaled system in (dx, u = W^{-T} dy, dtau):
      //   [ 0    Ah'   c    ] [dx  ]
      //   [ -Ah  I     Wb   ] [u   ]
      //   [ -c'  -Wb'  k/tau] [dtau]
      // with Ah = W A. Keeping W out of the (2,2) block avoids forming
      // W^{-1} W^{-T}, whose spread squares the conditioning.
      Mat<T> Ah(m, n);
      Vec<T> Wb(m);
      for (const auto& blk : blocks) {
        const int o = blk.offset(), sz = blk.size();
        Ah.middleRows(o, sz) = blk.scale_rows(A.middleRows(o, sz));
        Wb.segment(o, sz) = blk.apply_W(b.segment(o, sz));
      }
      Mat<T> K = Mat<T>::Zero(N, N);
      K.block(0, n, n, m) = Ah.transpose();
      K.block(0, n + m, n, 1) = c;
      K.block(n, 0, m, n) = -Ah;
      K.block(n, n, m, m).setIdentity();
      K.block(n, n + m, m, 1) = Wb;
      K.block(n + m, 0, 1, n) = -c.transpose();
      K.block(n + m, n, 1, m) = -Wb.transpose();
      K(n + m, n + m) = kappa / tau;
      // Tiny static regularization on the dx diagonal keeps LU well-posed
      // when A has (near) dependent columns; refinement removes its effect.
      Mat<T> Kreg = K;
      const T reg = T(1e-14) * std::max(T(1), K.cwiseAbs().maxCoeff());
      Kreg.diagonal().head(n).array() += reg;
      const Eigen::PartialPivLU<Mat<T>> lu(Kreg);

      const Vec<T> r1 = A.transpose() * y + c * tau;
      const Vec<T> r2 = b * tau - A * x - s;
      const T r3 = -c.dot(x) - b.dot(y) - kappa;
      Vec<T> Wr2(m);
      for (const auto& blk : blocks)
        Wr2.segment(blk.offset(), blk.size()) = blk.apply_W(r2.segment(blk.offset(), blk.size()));

      struct Direction {
        Vec<T> dx, dy, ds;
        Vec<T> wds, wdy;  ///< W ds and W^{-T} dy
        T dtau, dkappa;
      };
      auto solve_direction = [&](T eta, const Vec<T>& rhs_s, T rhs_k) {
        Vec<T> t(m);
        for (const auto& blk : blocks)
          t.segment(blk.offset(), blk.size()) = blk.jordan_solve(rhs_s.segment(blk.offset(), blk.size()));
        Vec<T> rhs(N);
        rhs.head(n) = -eta * r1;
        rhs.segment(n, m) = -eta * Wr2 + t;
        rhs(n + m) = -eta * r3 + rhs_k / tau;
        Vec<T> sol = lu.solve(rhs);
        for (int k = 0; k < 3; ++k) {
          const Vec<T> res = rhs - K * sol;
          sol += lu.solve(res);
        }
        Direction d;
        d.dx = sol.head(n);
        d.wdy = sol.segment(n, m);
        d.dtau = sol(n + m);
        d.wds = t - d.wdy;
        d.dy.resize(m);
        d.ds.resize(m);
        for (const auto& blk : blocks) {
          const int o = blk.offset(), sz = blk.size();
          d.dy.segment(o, sz) = blk.apply_WT(d.wdy.segment(o, sz));
          d.ds.segment(o, sz) = blk.apply_Winv(d.wds.segment(o, sz));
        }
        d.dkappa = (rhs_k - kappa * d.dtau) / tau;
        return d;
      };
      auto step_length = [&](const Direction& d, Vec<T>& wds, Vec<T>& wdy) {
        T alpha = std::numeric_limits<T>::infinity();
        wds.resize(m);
        wdy.resize(m);
        for (const auto& blk : blocks) {
          const int o = blk.offset(), sz = blk.size();
          wds.segment(o, sz) = d.wds.segment(o, sz);
          wdy.segment(o, sz) = d.wdy.segment(o, sz);
          alpha = std::min(alpha, blk.max_step(wds.segment(o, sz)));
          alpha = std::min(alpha, blk.max_step(wdy.segment(o, sz)));
        }
        if (d.dtau < T(0)) alpha = std::min(alpha, -tau / d.dtau);
        if (d.dkappa < T(0)) alpha = std::min(alpha, -kappa / d.dkappa);
        return alpha;
      };

      Vec<T> lam_sq(m), e(m);
      for (const auto& blk : blocks) {
        const Vec<T> l = blk.lambda_vector();
        lam_sq.segment(blk.offset(), blk.size()) = blk.jordan(l, l);
        e.segment(blk.offset(), blk.size()) = blk.identity();
      }

      // Predictor.
      const Direction aff = solve_direction(T(1), -lam_sq, -tau * kappa);
      Vec<T> wds_a, wdy_a;
      const T alpha_a = std::min(T(1), step_length(aff, wds_a, wdy_a));
      T sigma = T(1) - alpha_a;
      sigma = std::clamp(sigma * sigma * sigma, T(0), T(1));

      // Corrector.
      Vec<T> rhs_s(m);
      for (const auto& blk : blocks) {
        const int o = blk.offset(), sz = blk.size();
        rhs_s.segment(o, sz) = -lam_sq.segment(o, sz) + sigma * mu * e.segment(o, sz) -
                               blk.jordan(wdy_a.segment(o, sz), wds_a.segment(o, sz));
      }
      const T rhs_k = -tau * kappa + sigma * mu - aff.dtau * aff.dkappa;
      const Direction dir = solve_direction(T(1) - sigma, rhs_s, rhs_k);
      Vec<T> wds, wdy;
      const T alpha = std::min(T(1), T(settings.step_fraction) * step_length(dir, wds, wdy));
      if (!(alpha > T(0)) || !std::isfinite(static_cast<double>(alpha))) {
        out.status = ConicStatus::numerical_failure;
        out.message = "no admissible step";
        unscale(out, x, s, y, tau);
        return out;
      }

      x += alpha * dir.dx;
      y += alpha * dir.dy;
      s += alpha * dir.ds;
      tau += alpha * dir.dtau;
      kappa += alpha * dir.dkappa;
    }
    out.status = ConicStatus::max_iterations;
    out.message = "iteration limit reached";
    unscale(out, x, s, y, tau);
    return out;
  }
};

}  // namespace actdeg
