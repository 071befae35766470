#include "quadspec/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace quadspec {

namespace {

double scaled(double base, const Eigen::MatrixXcd& A) { return base * std::max(1.0, A.norm()); }

// Unitary similarity swapping the two diagonal entries of the upper
// triangular 2x2 block at position p. The rotation sends the eigenvector of
// the trailing eigenvalue to the first coordinate; when the entries are
// (numerically) equal there is nothing to move.
void swap_adjacent(Mat& T, Mat& U, int p) {
  const Complex a = T(p, p), b = T(p, p + 1), d = T(p + 1, p + 1);
  Complex v0 = b, v1 = d - a;
  const double nv = std::hypot(std::abs(v0), std::abs(v1));
  const double scale = std::abs(a) + std::abs(b) + std::abs(d);
  if (nv <= 1e-300 || nv <= 1e-15 * scale) return;
  v0 /= nv;
  v1 /= nv;
  Eigen::Matrix2cd G;
  G << v0, -std::conj(v1), v1, std::conj(v0);
  const Mat rows = G.adjoint() * T.middleRows(p, 2);
  T.middleRows(p, 2) = rows;
  const Mat cols = T.middleCols(p, 2) * G;
  T.middleCols(p, 2) = cols;
  const Mat ucols = U.middleCols(p, 2) * G;
  U.middleCols(p, 2) = ucols;
  T(p + 1, p) = Complex(0.0, 0.0);
}

// Orthonormal basis of the invariant subspace belonging to the eigenvalues
// picked by `sel`, via Schur reordering (bubble the selected eigenvalues to
// the leading positions with adjacent swaps).
Mat leading_invariant_subspace(const Mat& F, const std::function<bool(Complex)>& sel,
                               int expected, const Tolerances& tol) {
  Eigen::ComplexSchur<Mat> schur(F, /*computeU=*/true);
  if (schur.info() != Eigen::Success)
    throw NumericalError("schur decomposition failed");
  Mat T = schur.matrixT();
  Mat U = schur.matrixU();
  const int dim = static_cast<int>(T.rows());

  std::vector<char> s(dim);
  for (int i = 0; i < dim; ++i) s[i] = sel(T(i, i)) ? 1 : 0;

  int k = 0;
  for (int i = 0; i < dim; ++i) {
    if (!s[i]) continue;
    for (int j = i; j > k; --j) {
      swap_adjacent(T, U, j - 1);
      std::swap(s[j - 1], s[j]);
    }
    ++k;
  }
  if (k != expected)
    throw SchurReorderFailure("invariant subspace has unexpected dimension");

  Mat V = U.leftCols(k);
  const double res = (F * V - V * T.topLeftCorner(k, k)).norm();
  if (res > scaled(tol.structure, F))
    throw SchurReorderFailure("reordered Schur block lost invariance");
  return V;
}

RealMat sym_sqrt(const RealMat& S) {
  Eigen::SelfAdjointEigenSolver<RealMat> es(S);
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

RealMat sym_inv_sqrt(const RealMat& S) {
  Eigen::SelfAdjointEigenSolver<RealMat> es(S);
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace

void check_lagrangian(const LagrangianFrame& frame, const QuadraticForm& q,
                      const Tolerances& tol) {
  const int n = q.n();
  const Mat& V = frame.basis;
  if (V.rows() != 2 * n || V.cols() != n)
    throw DimensionMismatch("check_lagrangian: frame must be 2n x n");

  Mat Vn = V;
  for (int c = 0; c < n; ++c) {
    const double nc = Vn.col(c).norm();
    if (nc <= 0.0) throw StructureViolation("check_lagrangian: zero column");
    Vn.col(c) /= nc;
  }
  Eigen::JacobiSVD<Mat> svd(Vn);
  if (svd.singularValues()(n - 1) <= tol.definiteness)
    throw StructureViolation("check_lagrangian: columns dependent after normalization");

  const Mat J = symplectic_matrix(n);
  const Mat iso = Vn.transpose() * J * Vn;
  if (iso.cwiseAbs().maxCoeff() > tol.definiteness)
    throw StructureViolation("check_lagrangian: plane is not isotropic");

  const double qscale = std::max(1.0, q.matrix().norm());
  for (int i = 0; i < n; ++i) {
    if (std::abs(q.evaluate(Vn.col(i))) > tol.definiteness * qscale)
      throw StructureViolation("check_lagrangian: q does not vanish on a basis column");
    for (int j = i + 1; j < n; ++j) {
      const Vec s = Vn.col(i) + Vn.col(j);
      if (std::abs(q.evaluate(s)) > 4.0 * tol.definiteness * qscale)
        throw StructureViolation("check_lagrangian: q does not vanish on a column sum");
    }
  }
}

double positivity(const LagrangianFrame& frame) {
  const Mat& V = frame.basis;
  if (V.rows() % 2 != 0 || V.cols() < 1)
    throw DimensionMismatch("positivity: frame must be 2n x k");
  const int n = static_cast<int>(V.rows()) / 2;
  const Mat J = symplectic_matrix(n);
  // (1/i) sigma(V c, conj(V c)) as a Hermitian form in c.
  const Mat S = V.transpose() * J * V.conjugate();
  const Mat Hraw = S.transpose() / kImagUnit;
  // Materialize before assigning: the adjoint aliases its source.
  const Mat H = (Hraw + Hraw.adjoint()) / 2.0;
  const Mat B = V.adjoint() * V;
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(H, B, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  return ges.eigenvalues().minCoeff();
}

std::vector<Eigenspace> generalized_eigenspaces(const HamiltonMap& fm, const SpectralData& data,
                                                const Tolerances& tol) {
  // Signed cluster centers; selection assigns each Schur diagonal entry to
  // its nearest center, so well separated clusters cannot be confused.
  std::vector<Complex> centers;
  std::vector<int> mult;
  for (const auto& cl : data.clusters) {
    centers.push_back(data.lambdas[cl.front()]);
    mult.push_back(static_cast<int>(cl.size()));
    centers.push_back(-data.lambdas[cl.front()]);
    mult.push_back(static_cast<int>(cl.size()));
  }

  const auto nearest = [&centers](Complex z) {
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (size_t c = 0; c < centers.size(); ++c) {
      const double d = std::abs(z - centers[c]);
      if (d < bd) {
        bd = d;
        best = static_cast<int>(c);
      }
    }
    return best;
  };

  std::vector<Eigenspace> out;
  for (size_t c = 0; c < centers.size(); ++c) {
    const auto sel = [&, c](Complex z) { return nearest(z) == static_cast<int>(c); };
    out.push_back({centers[c], leading_invariant_subspace(fm.F, sel, mult[c], tol)});
  }
  return out;
}

std::pair<LagrangianFrame, LagrangianFrame> stable_manifolds(const HamiltonMap& fm,
                                                             const SpectralData& data,
                                                             const Tolerances& tol) {
  const int n = fm.n;
  if (static_cast<int>(data.lambdas.size()) != n)
    throw DimensionMismatch("stable_manifolds: eigenvalue count must equal n");
  Mat plus = leading_invariant_subspace(
      fm.F, [](Complex z) { return z.imag() > 0.0; }, n, tol);
  Mat minus = leading_invariant_subspace(
      fm.F, [](Complex z) { return z.imag() < 0.0; }, n, tol);
  return {LagrangianFrame{std::move(plus), LagrangianFrame::Label::plus},
          LagrangianFrame{std::move(minus), LagrangianFrame::Label::minus}};
}

Mat graph_matrix(const LagrangianFrame& frame, const Tolerances& tol) {
  const Mat& V = frame.basis;
  if (V.rows() % 2 != 0 || V.rows() != 2 * V.cols())
    throw DimensionMismatch("graph_matrix: frame must be 2n x n");
  const int n = static_cast<int>(V.cols());

  const Mat Y = V.topRows(n);
  const Mat H = V.bottomRows(n);
  Eigen::JacobiSVD<Mat> svd(Y);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(n - 1);
  if (smin <= 1e-10 * std::max(1.0, smax))
    throw VerticalPlane("graph_matrix: plane has no graph representation (y-block singular)");

  // A = H Y^{-1}, via Y^T A^T = H^T.
  Mat A = Y.transpose().colPivHouseholderQr().solve(H.transpose()).transpose();
  const double asym = (A - A.transpose()).norm();
  if (asym > scaled(tol.definiteness, A))
    throw StructureViolation("graph_matrix: graph matrix not symmetric (plane not Lagrangian?)");
  const Mat Asym = (A + A.transpose()) / 2.0;  // materialized: transpose aliases A
  A = Asym;

  // Definiteness of Im A is dictated by which stable manifold this is.
  Eigen::SelfAdjointEigenSolver<RealMat> es(RealMat(A.imag()), Eigen::EigenvaluesOnly);
  const double margin = scaled(tol.definiteness, A);
  if (frame.label == LagrangianFrame::Label::minus) {
    if (es.eigenvalues().maxCoeff() >= -margin)
      throw StructureViolation("graph_matrix: Im A not negative definite on the minus manifold");
  } else {
    if (es.eigenvalues().minCoeff() <= margin)
      throw StructureViolation("graph_matrix: Im A not positive definite on the plus manifold");
  }
  return A;
}

RealMat real_reduction(const Mat& A_minus, const Tolerances& tol) {
  const int n = static_cast<int>(A_minus.rows());
  if (A_minus.cols() != n) throw DimensionMismatch("real_reduction: A_minus must be square");

  const RealMat R = A_minus.real();
  const RealMat P = -A_minus.imag();  // must be positive definite
  Eigen::SelfAdjointEigenSolver<RealMat> es(P, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= scaled(tol.definiteness, A_minus))
    throw NotNegativeDefinite("real_reduction: Im A_minus is not negative definite");

  const RealMat T = sym_sqrt(P);
  const RealMat Tinv = sym_inv_sqrt(P);

  // Scaling after shear: [[T, 0], [0, T^{-1}]] * [[I, 0], [-R, I]].
  RealMat K = RealMat::Zero(2 * n, 2 * n);
  K.topLeftCorner(n, n) = T;
  K.bottomLeftCorner(n, n) = -Tinv * R;
  K.bottomRightCorner(n, n) = Tinv;

  // Sanity: K is symplectic and takes the graph of A_minus to eta = -i y.
  const Mat J = symplectic_matrix(n);
  const Mat Kc = K.cast<Complex>();
  if ((Kc.transpose() * J * Kc - J).norm() > scaled(tol.structure, Kc))
    throw StructureViolation("real_reduction: reduction map lost symplecticity");
  Mat graph(2 * n, n);
  graph.topRows(n) = Mat::Identity(n, n);
  graph.bottomRows(n) = A_minus;
  const Mat img = Kc * graph;
  const Mat target = img.topRows(n) * (-kImagUnit);
  if ((img.bottomRows(n) - target).norm() > scaled(tol.structure, img))
    throw StructureViolation("real_reduction: reduced graph is not eta = -i y");
  return K;
}

FbiMap fbi_map(const Mat& A_plus, const Tolerances& tol) {
  const int n = static_cast<int>(A_plus.rows());
  if (A_plus.cols() != n) throw DimensionMismatch("fbi_map: A_plus must be square");

  const Mat lhs = Mat::Identity(n, n) - kImagUnit * A_plus;
  Eigen::JacobiSVD<Mat> svd(lhs);
  if (svd.singularValues()(n - 1) <= 1e-14 * std::max(1.0, svd.singularValues()(0)))
    throw SingularCayley("fbi_map: I - i A_plus is singular");
  const Mat Braw = lhs.partialPivLu().solve(A_plus);
  const Mat B = (Braw + Braw.transpose()) / 2.0;

  Mat K(2 * n, 2 * n);
  K.topLeftCorner(n, n) = Mat::Identity(n, n);
  K.topRightCorner(n, n) = -kImagUnit * Mat::Identity(n, n);
  K.bottomLeftCorner(n, n) = -B;
  K.bottomRightCorner(n, n) = Mat::Identity(n, n) + kImagUnit * B;

  const Mat J = symplectic_matrix(n);
  if ((K.transpose() * J * K - J).norm() > scaled(tol.structure, K))
    throw StructureViolation("fbi_map: map is not symplectic");

  // {eta = -i y} -> {x = 0}
  Mat gm(2 * n, n);
  gm.topRows(n) = Mat::Identity(n, n);
  gm.bottomRows(n) = -kImagUnit * Mat::Identity(n, n);
  if ((K * gm).topRows(n).norm() > scaled(tol.structure, K))
    throw StructureViolation("fbi_map: minus manifold does not map to {x = 0}");
  // {eta = A_plus y} -> {xi = 0}
  Mat gp(2 * n, n);
  gp.topRows(n) = Mat::Identity(n, n);
  gp.bottomRows(n) = A_plus;
  if ((K * gp).bottomRows(n).norm() > scaled(tol.structure, K) * std::max(1.0, A_plus.norm()))
    throw StructureViolation("fbi_map: plus manifold does not map to {xi = 0}");

  return FbiMap{std::move(B), std::move(K)};
}

double WeightForm::evaluate(const Vec& x) const {
  if (x.size() != n) throw DimensionMismatch("WeightForm::evaluate: wrong dimension");
  RealVec X(2 * n);
  X.head(n) = x.real();
  X.tail(n) = x.imag();
  return 0.5 * X.dot(G * X);
}

bool WeightForm::is_radial(double tol) const {
  const double c = G.trace() / (2.0 * n);
  return (G - c * RealMat::Identity(2 * n, 2 * n)).norm() <= tol * std::max(1.0, std::abs(c));
}

WeightForm WeightForm::flat(int n) { return WeightForm{n, RealMat::Identity(2 * n, 2 * n)}; }

WeightForm WeightForm::radial(int n, double c) {
  return WeightForm{n, 2.0 * c * RealMat::Identity(2 * n, 2 * n)};
}

WeightForm phi0(const Mat& B, const Tolerances& tol) {
  const int n = static_cast<int>(B.rows());
  if (B.cols() != n) throw DimensionMismatch("phi0: B must be square");
  if ((B - B.transpose()).norm() > scaled(tol.definiteness, B))
    throw StructureViolation("phi0: B must be symmetric");

  const RealMat Br = ((B + B.transpose()) / 2.0).real();
  const RealMat Bi = ((B + B.transpose()) / 2.0).imag();
  // Phi0(x) = (1/2)[(Im x)^2 + Im(x^T B x)] as a form in (Re x, Im x).
  RealMat G(2 * n, 2 * n);
  G.topLeftCorner(n, n) = Bi;
  G.topRightCorner(n, n) = Br;
  G.bottomLeftCorner(n, n) = Br;
  G.bottomRightCorner(n, n) = RealMat::Identity(n, n) - Bi;

  Eigen::SelfAdjointEigenSolver<RealMat> es(G, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= tol.definiteness * std::max(1.0, G.norm()))
    throw NotConvex("phi0: weight is not strictly convex");
  return WeightForm{n, std::move(G)};
}

Mat transported_form(const QuadraticForm& q, const Mat& K, const Tolerances& tol) {
  const int n = q.n();
  if (K.rows() != 2 * n || K.cols() != 2 * n)
    throw DimensionMismatch("transported_form: K must be 2n x 2n");

  const Mat Kinv = K.partialPivLu().solve(Mat::Identity(2 * n, 2 * n));
  const Mat Qraw = Kinv.transpose() * q.matrix() * Kinv;
  const Mat Qt = (Qraw + Qraw.transpose()) / 2.0;

  const double scale = std::max(1.0, Qt.norm());
  if (Qt.topLeftCorner(n, n).norm() > tol.structure * scale ||
      Qt.bottomRightCorner(n, n).norm() > tol.structure * scale)
    throw NotNormalForm("transported_form: xx or xi-xi block does not vanish");

  // q_t(x, xi) = (M x) . xi means Qt = (1/2) [[0, M^T], [M, 0]].
  return 2.0 * Qt.bottomLeftCorner(n, n);
}

JordanizeResult jordanize(const Mat& M, const WeightForm& phi0_weight, JordanMode mode,
                          const std::optional<Mat>& C_user, const Tolerances& tol) {
  const int n = static_cast<int>(M.rows());
  if (M.cols() != n) throw DimensionMismatch("jordanize: M must be square");
  if (phi0_weight.n != n) throw DimensionMismatch("jordanize: weight dimension mismatch");

  Mat C = Mat::Identity(n, n);
  Mat M_out = M;

  switch (mode) {
    case JordanMode::raw:
      break;
    case JordanMode::exact: {
      if (!C_user) throw ConfigError("jordanize: exact mode requires a user-supplied C");
      C = *C_user;
      if (C.rows() != n || C.cols() != n)
        throw DimensionMismatch("jordanize: supplied C has wrong size");
      M_out = C.partialPivLu().solve(M * C);
      break;
    }
    case JordanMode::diagonalized: {
      Eigen::ComplexEigenSolver<Mat> es(M, /*computeEigenvectors=*/true);
      if (es.info() != Eigen::Success)
        throw NumericalError("jordanize: eigenvalue iteration failed");
      C = es.eigenvectors();
      Eigen::JacobiSVD<Mat> svd(C);
      const double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
      if (!(cond < tol.cond_cap))
        throw DefectiveNotSupplied(
            "jordanize: eigenvector basis too ill-conditioned; M may be defective, supply C "
            "explicitly or use raw mode");
      Mat D = C.partialPivLu().solve(M * C);
      Mat offdiag = D;
      offdiag.diagonal().setZero();
      if (offdiag.norm() > scaled(tol.structure, M) * cond)
        throw DefectiveNotSupplied("jordanize: diagonalization residual too large");
      M_out = Mat::Zero(n, n);
      M_out.diagonal() = es.eigenvalues();
      break;
    }
  }

  // Phi1(x) = Phi0(C x); on real coordinates C acts as [[Re C, -Im C], [Im C, Re C]].
  RealMat RC(2 * n, 2 * n);
  RC.topLeftCorner(n, n) = C.real();
  RC.topRightCorner(n, n) = -C.imag();
  RC.bottomLeftCorner(n, n) = C.imag();
  RC.bottomRightCorner(n, n) = C.real();
  WeightForm phi1{n, RealMat(RC.transpose() * phi0_weight.G * RC)};

  return JordanizeResult{std::move(C), std::move(M_out), std::move(phi1), mode};
}

EllipticityConstants ellipticity_constants(const Mat& M, const WeightForm& phi1) {
  const int n = static_cast<int>(M.rows());
  if (M.cols() != n || phi1.n != n)
    throw DimensionMismatch("ellipticity_constants: dimension mismatch");

  Eigen::SelfAdjointEigenSolver<RealMat> esg(phi1.G, Eigen::EigenvaluesOnly);
  const double gmin = esg.eigenvalues().minCoeff();
  const double gmax = esg.eigenvalues().maxCoeff();
  if (gmin <= 0.0) throw EllipticityViolated("ellipticity_constants: weight not strictly convex");
  // (1/C1)|x|^2 <= Phi1 <= C1 |x|^2 with Phi1 = (1/2) X^T G X.
  const double C1 = std::max({1.0, gmax / 2.0, 2.0 / gmin});

  // Re q_t(x, xi(x)) with xi(x) = (2/i) dPhi1/dx = -(G X)_v - i (G X)_u,
  // assembled as a real quadratic form in X = (Re x, Im x).
  const RealMat Mr = M.real(), Mi = M.imag();
  RealMat L1(n, 2 * n), L2(n, 2 * n);
  L1 << Mr, -Mi;  // Re(M x)
  L2 << Mi, Mr;   // Im(M x)
  const RealMat Ba = phi1.G.topRows(n);     // (G X)_u
  const RealMat Bb = phi1.G.bottomRows(n);  // (G X)_v
  RealMat P = -L1.transpose() * Bb - Bb.transpose() * L1 + L2.transpose() * Ba +
              Ba.transpose() * L2;
  P /= 2.0;

  Eigen::SelfAdjointEigenSolver<RealMat> esp(P, Eigen::EigenvaluesOnly);
  const double mu = esp.eigenvalues().minCoeff();
  if (mu <= 0.0)
    throw EllipticityViolated("ellipticity_constants: reduced symbol loses ellipticity");
  const double C0 = std::max(1.0, 1.0 / mu);
  return EllipticityConstants{C0, C1};
}

NormalFormResult reduce(const QuadraticForm& q, const ReduceOptions& opts) {
  const auto rep = check_elliptic(q, opts.tol.definiteness);
  if (!rep.is_normalized)
    throw NotNormalized("reduce: form must satisfy Re q > 0 (apply normalize_rotation first)");

  const int n = q.n();
  const HamiltonMap fm = hamilton_map(q);
  SpectralData data = eigen_pairs(fm, opts.tol);

  auto [Lp, Lm] = stable_manifolds(fm, data, opts.tol);
  check_lagrangian(Lp, q, opts.tol);
  check_lagrangian(Lm, q, opts.tol);
  if (positivity(Lp) <= 0.0)
    throw StructureViolation("reduce: plus manifold is not strictly positive");
  if (positivity(Lm) >= 0.0)
    throw StructureViolation("reduce: minus manifold is not strictly negative");

  const Mat A_minus = graph_matrix(Lm, opts.tol);
  const RealMat KR = real_reduction(A_minus, opts.tol);
  const Mat KRc = KR.cast<Complex>();

  LagrangianFrame Lp2{KRc * Lp.basis, LagrangianFrame::Label::plus};
  const Mat A_plus = graph_matrix(Lp2, opts.tol);
  const FbiMap fbi = fbi_map(A_plus, opts.tol);
  const WeightForm w0 = phi0(fbi.B, opts.tol);

  const Mat K_TR = fbi.K_T * KRc;
  const Mat M_mid = transported_form(q, K_TR, opts.tol);

  JordanizeResult jr = jordanize(M_mid, w0, opts.mode, opts.C_user, opts.tol);

  Mat K_C = Mat::Zero(2 * n, 2 * n);
  K_C.topLeftCorner(n, n) = jr.C.partialPivLu().solve(Mat::Identity(n, n));
  K_C.bottomRightCorner(n, n) = jr.C.transpose();
  const Mat K_total = K_C * K_TR;

  // Internal consistency: transporting by the composite map must reproduce
  // the jordanized matrix.
  const Mat M_check = transported_form(q, K_total, opts.tol);
  if ((M_check - jr.M_out).norm() > scaled(opts.tol.structure, jr.M_out) * 100.0)
    throw StructureViolation("reduce: composite map does not reproduce the reduced matrix");

  NormalFormResult out;
  out.n = n;
  out.K_total = K_total;
  out.M = jr.M_out;
  out.B = fbi.B;
  out.C = jr.C;
  out.phi0_weight = w0;
  out.phi1 = jr.phi1;
  out.jordan_mode = jr.mode;
  out.spectral = data;

  const EllipticityConstants ec = ellipticity_constants(out.M, out.phi1);
  out.C0 = ec.C0;
  out.C1 = ec.C1;

  const Mat J = symplectic_matrix(n);
  out.residuals.symplectic = (K_total.transpose() * J * K_total - J).norm();
  const Mat Kinv = K_total.partialPivLu().solve(Mat::Identity(2 * n, 2 * n));
  Mat Qt = Kinv.transpose() * q.matrix() * Kinv;
  out.residuals.block_xx = Qt.topLeftCorner(n, n).norm();
  out.residuals.block_xixi = Qt.bottomRightCorner(n, n).norm();
  out.residuals.pairing = data.pairing_residual;

  // Spec(M) must be the upper-half-plane spectrum of 2F.
  Eigen::ComplexEigenSolver<Mat> esm(out.M, /*computeEigenvectors=*/false);
  std::vector<Complex> em(esm.eigenvalues().data(), esm.eigenvalues().data() + n);
  std::vector<Complex> target;
  target.reserve(n);
  for (const Complex& l : data.lambdas) target.push_back(2.0 * l);
  auto lex = [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  };
  std::sort(em.begin(), em.end(), lex);
  std::sort(target.begin(), target.end(), lex);
  double mismatch = 0.0;
  for (int j = 0; j < n; ++j) mismatch = std::max(mismatch, std::abs(em[j] - target[j]));
  out.residuals.spec_match = mismatch;
  if (mismatch > 1e-5 * std::max(1.0, fm.F.norm()))
    throw StructureViolation("reduce: Spec(M) does not match the Hamilton spectrum");

  return out;
}

}  // namespace quadspec
