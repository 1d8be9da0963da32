#include "sage/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

namespace sage {
namespace {

// Residual functor shared by both fits. `model(params, x)` returns the
// prediction; parameters are unconstrained reals.
struct CurveResidual {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const std::vector<double>* x;
  const std::vector<double>* y;
  double (*model)(const Eigen::VectorXd&, double);
  int n_params = 3;

  int inputs() const { return n_params; }
  int values() const { return static_cast<int>(x->size()); }
  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& f) const {
    for (std::size_t i = 0; i < x->size(); ++i) f(static_cast<Eigen::Index>(i)) = model(p, (*x)[i]) - (*y)[i];
    return 0;
  }
};

struct LmOutcome {
  Eigen::VectorXd p;
  double rss = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd jtj_inv = Eigen::Matrix3d::Zero();
};

LmOutcome least_squares(const std::vector<double>& x, const std::vector<double>& y,
                        double (*model)(const Eigen::VectorXd&, double),
                        const std::vector<Eigen::VectorXd>& starts) {
  const int np = static_cast<int>(starts.front().size());
  CurveResidual f{&x, &y, model, np};
  Eigen::NumericalDiff<CurveResidual> nd(f);
  LmOutcome best;
  for (const auto& s : starts) {
    Eigen::VectorXd p = s;
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<CurveResidual>> lm(nd);
    lm.parameters.xtol = 1e-10;
    lm.parameters.ftol = 1e-12;
    lm.parameters.maxfev = 4000;
    lm.minimize(p);
    Eigen::VectorXd r(f.values());
    f(p, r);
    const double rss = r.squaredNorm();
    if (std::isfinite(rss) && rss < best.rss) {
      best.p = p;
      best.rss = rss;
    }
  }
  if (best.p.size() == np) {
    Eigen::MatrixXd jac(f.values(), np);
    nd.df(best.p, jac);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
    best.jtj_inv = lu.isInvertible() ? Eigen::MatrixXd(lu.inverse()) : Eigen::MatrixXd::Zero(np, np);
  }
  return best;
}

double gaussian_model(const Eigen::VectorXd& p, double t) {
  const double u = t * std::exp(-p(2));
  return p(0) * std::exp(-u * u) + p(1);
}

double envelope_model(const Eigen::VectorXd& p, double t) {
  const double u = t * std::exp(-p(0));
  return std::exp(-u * u);
}

double rb_model(const Eigen::VectorXd& p, double n) {
  return p(0) * std::exp(n * std::log1p(-std::exp(p(2)))) + p(1);
}

}  // namespace

std::string_view to_string(FitStatus s) {
  switch (s) {
    case FitStatus::kOk: return "ok";
    case FitStatus::kNoDecay: return "no_decay";
    case FitStatus::kFailed: return "failed";
  }
  return "?";
}

FitResult fit_gaussian_decay(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size()) throw InvalidInput("fit: length mismatch");
  if (t.size() < 20) throw InvalidInput("fit_gaussian_decay needs at least 20 samples");
  FitResult r;
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const double scale = std::max(std::abs(*lo), std::abs(*hi));
  const double t_end = *std::max_element(t.begin(), t.end());
  if (scale == 0.0 || (*hi - *lo) < 0.01 * scale) {
    r.status = FitStatus::kNoDecay;
    r.a = 0.0;
    r.b = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    r.rate = t_end;
    return r;
  }
  std::vector<Eigen::VectorXd> starts;
  const double a0 = y.front() - y.back();
  for (int k = 0; k < 8; ++k) {
    Eigen::VectorXd p(3);
    p << a0, y.back(), std::log(t_end * std::pow(10.0, -3.0 + 0.5 * k));
    starts.push_back(p);
  }
  const LmOutcome o = least_squares(t, y, gaussian_model, starts);
  if (o.p.size() != 3) {
    r.status = FitStatus::kFailed;
    return r;
  }
  r.a = o.p(0);
  r.b = o.p(1);
  r.rate = std::exp(o.p(2));
  r.residual_norm = std::sqrt(o.rss);
  const double dof = std::max<double>(1.0, static_cast<double>(t.size()) - 3.0);
  Eigen::Matrix3d cov = o.jtj_inv * (o.rss / dof);
  // third parameter is log T; convert to T
  Eigen::Matrix3d jac = Eigen::Matrix3d::Identity();
  jac(2, 2) = r.rate;
  r.covariance = jac * cov * jac.transpose();
  if (!std::isfinite(r.rate) || r.rate <= 0.0) r.status = FitStatus::kFailed;
  return r;
}

FitResult fit_gaussian_envelope(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size()) throw InvalidInput("fit: length mismatch");
  if (t.size() < 20) throw InvalidInput("fit_gaussian_envelope needs at least 20 samples");
  FitResult r;
  r.a = 1.0;
  const double t_end = *std::max_element(t.begin(), t.end());
  const auto lo = *std::min_element(y.begin(), y.end());
  if (lo > 0.99) {
    r.status = FitStatus::kNoDecay;
    r.rate = t_end;
    return r;
  }
  std::vector<Eigen::VectorXd> starts;
  for (int k = 0; k < 8; ++k) starts.push_back(Eigen::VectorXd::Constant(1, std::log(t_end * std::pow(10.0, -3.0 + 0.5 * k))));
  const LmOutcome o = least_squares(t, y, envelope_model, starts);
  if (o.p.size() != 1) {
    r.status = FitStatus::kFailed;
    return r;
  }
  r.rate = std::exp(o.p(0));
  r.residual_norm = std::sqrt(o.rss);
  const double dof = std::max<double>(1.0, static_cast<double>(t.size()) - 1.0);
  r.covariance(2, 2) = o.jtj_inv(0, 0) * (o.rss / dof) * r.rate * r.rate;
  if (!std::isfinite(r.rate) || r.rate <= 0.0) r.status = FitStatus::kFailed;
  return r;
}

FitResult fit_rb_decay(const std::vector<double>& lengths, const std::vector<double>& y) {
  if (lengths.size() != y.size()) throw InvalidInput("fit: length mismatch");
  if (lengths.size() < 5) throw InvalidInput("fit_rb_decay needs at least 5 sequence lengths");
  FitResult r;
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  if (*hi - *lo < 1e-9) {
    r.rate = 1.0;
    r.a = 0.0;
    r.b = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    return r;
  }
  std::vector<Eigen::VectorXd> starts;
  for (double q : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 1e-5}) {
    Eigen::VectorXd p(3);
    p << y.front() - 0.5, 0.5, std::log(q);
    starts.push_back(p);
  }
  const LmOutcome o = least_squares(lengths, y, rb_model, starts);
  if (o.p.size() != 3) {
    r.status = FitStatus::kFailed;
    return r;
  }
  r.a = o.p(0);
  r.b = o.p(1);
  const double q = std::exp(o.p(2));
  r.rate = 1.0 - q;
  r.residual_norm = std::sqrt(o.rss);
  const double dof = std::max<double>(1.0, static_cast<double>(y.size()) - 3.0);
  Eigen::Matrix3d jac = Eigen::Matrix3d::Identity();
  jac(2, 2) = -q;
  r.covariance = jac * (o.jtj_inv * (o.rss / dof)) * jac.transpose();
  if (!(r.rate > 0.0 && r.rate <= 1.0)) r.status = FitStatus::kFailed;
  return r;
}

DecayMeasurement measure_gaussian_decay(const std::function<Trajectory(const std::vector<double>&)>& trace,
                                        double t_min, double t_max, int n_points) {
  constexpr int kCoarse = 60;
  std::vector<double> coarse(kCoarse);
  for (int i = 0; i < kCoarse; ++i) {
    coarse[static_cast<std::size_t>(i)] = t_min * std::pow(t_max / t_min, static_cast<double>(i) / (kCoarse - 1));
  }
  const Trajectory c = trace(coarse);
  const double start = c.values.front();
  double knee = t_max;
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    if (c.values[i] < start * std::exp(-1.0)) {
      knee = c.times_ns[i];
      break;
    }
  }
  const double span = std::min(3.0 * knee, t_max);
  std::vector<double> fine(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) fine[static_cast<std::size_t>(i)] = span * i / (n_points - 1);
  DecayMeasurement m;
  m.trace = trace(fine);
  m.fit = fit_gaussian_decay(m.trace);
  return m;
}

MakhlinInvariants makhlin_invariants(const Matrix4c& u) {
  if ((u.adjoint() * u - Matrix4c::Identity()).cwiseAbs().maxCoeff() > 1e-8) {
    throw InvalidInput("makhlin_invariants: input is not unitary");
  }
  static const Matrix4c q = [] {
    Matrix4c m;
    m << 1, 0, 0, kI,
         0, kI, 1, 0,
         0, kI, -1, 0,
         1, 0, 0, -kI;
    return Matrix4c(m / std::sqrt(2.0));
  }();
  const Matrix4c mb = q.adjoint() * u * q;
  const Matrix4c m = mb.transpose() * mb;
  const cplx det_conj = std::conj(u.determinant());
  const cplx tr = m.trace();
  const cplx tr2 = (m * m).trace();
  return {tr * tr * det_conj / 16.0, ((tr * tr - tr2) * det_conj / 4.0).real()};
}

double cnot_deviation(const Matrix4c& u) {
  const MakhlinInvariants g = makhlin_invariants(u);
  return std::sqrt(std::norm(g.g1) + (g.g2 - 1.0) * (g.g2 - 1.0));
}

CMatrix polar_unitary(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

double average_gate_fidelity(const CMatrix& m, const CMatrix& target) {
  const double d = static_cast<double>(m.rows());
  const double overlap = std::norm((target.adjoint() * m).trace());
  const double norm = (m.adjoint() * m).trace().real();
  return (overlap + norm) / (d * (d + 1.0));
}

double phase_distance(const CMatrix& u, const CMatrix& v) {
  Eigen::Index r = 0;
  Eigen::Index c = 0;
  v.cwiseAbs().maxCoeff(&r, &c);
  if (std::abs(u(r, c)) == 0.0) return (u - v).cwiseAbs().maxCoeff();
  const cplx phase = v(r, c) / u(r, c);
  return (u * (phase / std::abs(phase)) - v).cwiseAbs().maxCoeff();
}

const Matrix4c& cnot_matrix() {
  static const Matrix4c m = [] {
    Matrix4c c = Matrix4c::Zero();
    c(0, 0) = c(1, 1) = c(2, 3) = c(3, 2) = 1.0;
    return c;
  }();
  return m;
}

namespace {

const std::array<Eigen::Matrix2cd, 4>& paulis() {
  static const std::array<Eigen::Matrix2cd, 4> p = [] {
    std::array<Eigen::Matrix2cd, 4> s;
    s[0] << 1, 0, 0, 1;
    s[1] << 0, 1, 1, 0;
    s[2] << 0, -kI, kI, 0;
    s[3] << 1, 0, 0, -1;
    return s;
  }();
  return p;
}

Matrix4c kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Matrix4c k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return k;
}

}  // namespace

PauliTable pauli_decompose(const Matrix4c& h) {
  PauliTable c{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      c[static_cast<std::size_t>(4 * a + b)] = (kron2(paulis()[a], paulis()[b]).adjoint() * h).trace().real() / 4.0;
    }
  return c;
}

Matrix4c pauli_reconstruct(const PauliTable& c) {
  Matrix4c h = Matrix4c::Zero();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) h += c[static_cast<std::size_t>(4 * a + b)] * kron2(paulis()[a], paulis()[b]);
  return h;
}

std::string pauli_name(int index) {
  static constexpr char kNames[] = "IXYZ";
  return {kNames[index / 4], kNames[index % 4]};
}

EffectiveHamiltonian schrieffer_wolff(const RMatrix& h0, const RMatrix& v, const RMatrix& comp, int order) {
  if (order != 2 && order != 3) throw InvalidInput("schrieffer_wolff: order must be 2 or 3");
  if (comp.cols() != 4) throw InvalidInput("schrieffer_wolff: expects a four-column computational space");
  const double scale = std::max(1e-300, h0.cwiseAbs().maxCoeff());
  const RMatrix h0c = comp.transpose() * h0 * comp;
  const double e0 = h0c.trace() / 4.0;
  if ((h0c - e0 * RMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() > 1e-9 * scale ||
      (h0 * comp - e0 * comp).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw Error("schrieffer_wolff: computational columns are not a degenerate eigenspace of h0");
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> es(h0);
  RMatrix resolvent = RMatrix::Zero(h0.rows(), h0.cols());
  int degenerate = 0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double gap = e0 - es.eigenvalues()(k);
    if (std::abs(gap) < 1e-9 * scale) {
      ++degenerate;
      continue;
    }
    resolvent += es.eigenvectors().col(k) * es.eigenvectors().col(k).transpose() / gap;
  }
  if (degenerate != 4) throw Error("schrieffer_wolff: energy denominator below tolerance outside the qubit space");

  const RMatrix vc = v * comp;          // V C
  const RMatrix rvc = resolvent * vc;   // R V C
  const RMatrix first = comp.transpose() * vc;
  RMatrix heff = first + vc.transpose() * rvc;
  if (order == 3) {
    const RMatrix vrvrv = rvc.transpose() * v * rvc;
    const RMatrix vr2v = rvc.transpose() * rvc;
    heff += vrvrv - 0.5 * (vr2v * first + first * vr2v);
  }
  return {heff.cast<cplx>(), e0};
}

EffectiveHamiltonian exact_block_diagonalization(const RMatrix& h0, const RMatrix& v, const RMatrix& comp) {
  const RMatrix h0c = comp.transpose() * h0 * comp;
  const double e0 = h0c.trace() / static_cast<double>(comp.cols());
  Eigen::SelfAdjointEigenSolver<RMatrix> es(h0 + v);
  const Eigen::Index n = es.eigenvalues().size();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const RMatrix overlap = comp.transpose() * es.eigenvectors();
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return overlap.col(a).squaredNorm() > overlap.col(b).squaredNorm(); });
  order.resize(static_cast<std::size_t>(comp.cols()));
  std::sort(order.begin(), order.end());
  RMatrix w(comp.cols(), comp.cols());
  RVector e(comp.cols());
  for (Eigen::Index k = 0; k < comp.cols(); ++k) {
    w.col(k) = overlap.col(order[static_cast<std::size_t>(k)]);
    e(k) = es.eigenvalues()(order[static_cast<std::size_t>(k)]);
  }
  const RMatrix u = polar_unitary(w.cast<cplx>()).real();
  RMatrix heff = u * e.asDiagonal() * u.transpose();
  heff.diagonal().array() -= e0;
  return {heff.cast<cplx>(), e0};
}

}  // namespace sage
