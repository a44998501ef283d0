#include "dmn/mandel.hpp"

#include <cmath>
#include <stdexcept>

namespace dmn {

Vec6 to_mandel(const Mat3& sym) {
  Vec6 v;
  for (int m = 0; m < 6; ++m) {
    auto [a, b] = kMandelPairs[m];
    v(m) = (m < 3) ? sym(a, b) : kSqrt2 * sym(a, b);
  }
  return v;
}

Mat3 from_mandel(const Vec6& v) {
  Mat3 s;
  for (int m = 0; m < 6; ++m) {
    auto [a, b] = kMandelPairs[m];
    double val = (m < 3) ? v(m) : v(m) / kSqrt2;
    s(a, b) = val;
    s(b, a) = val;
  }
  return s;
}

namespace {

Mat3 rot_x(double t) {
  double c = std::cos(t), s = std::sin(t);
  Mat3 r;
  r << 1, 0, 0, 0, c, -s, 0, s, c;
  return r;
}

Mat3 rot_y(double t) {
  double c = std::cos(t), s = std::sin(t);
  Mat3 r;
  r << c, 0, s, 0, 1, 0, -s, 0, c;
  return r;
}

Mat3 rot_z(double t) {
  double c = std::cos(t), s = std::sin(t);
  Mat3 r;
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

Mat3 drot_x(double t) {
  double c = std::cos(t), s = std::sin(t);
  Mat3 r;
  r << 0, 0, 0, 0, -s, -c, 0, c, -s;
  return r;
}

Mat3 drot_y(double t) {
  double c = std::cos(t), s = std::sin(t);
  Mat3 r;
  r << -s, 0, c, 0, 0, 0, -c, 0, -s;
  return r;
}

Mat3 drot_z(double t) {
  double c = std::cos(t), s = std::sin(t);
  Mat3 r;
  r << -s, -c, 0, c, -s, 0, 0, 0, 0;
  return r;
}

}  // namespace

Mat3 euler_rotation(double alpha, double beta, double gamma) {
  return rot_y(alpha) * rot_x(beta) * rot_z(gamma);
}

std::array<Mat3, 3> euler_rotation_derivs(double alpha, double beta,
                                          double gamma) {
  Mat3 ya = rot_y(alpha), xb = rot_x(beta), zg = rot_z(gamma);
  return {drot_y(alpha) * xb * zg, ya * drot_x(beta) * zg,
          ya * xb * drot_z(gamma)};
}

Mat6 mandel_rotation(const Mat3& R) {
  Mat6 Q;
  for (int m = 0; m < 6; ++m) {
    auto [a, b] = kMandelPairs[m];
    for (int n = 0; n < 6; ++n) {
      auto [i, j] = kMandelPairs[n];
      if (m < 3 && n < 3) {
        Q(m, n) = R(a, i) * R(a, i);
      } else if (m < 3) {
        Q(m, n) = kSqrt2 * R(a, i) * R(a, j);
      } else if (n < 3) {
        Q(m, n) = kSqrt2 * R(a, i) * R(b, i);
      } else {
        Q(m, n) = R(a, i) * R(b, j) + R(a, j) * R(b, i);
      }
    }
  }
  return Q;
}

Mat6 mandel_rotation_deriv(const Mat3& R, const Mat3& dR) {
  Mat6 dQ;
  for (int m = 0; m < 6; ++m) {
    auto [a, b] = kMandelPairs[m];
    for (int n = 0; n < 6; ++n) {
      auto [i, j] = kMandelPairs[n];
      if (m < 3 && n < 3) {
        dQ(m, n) = 2.0 * R(a, i) * dR(a, i);
      } else if (m < 3) {
        dQ(m, n) = kSqrt2 * (dR(a, i) * R(a, j) + R(a, i) * dR(a, j));
      } else if (n < 3) {
        dQ(m, n) = kSqrt2 * (dR(a, i) * R(b, i) + R(a, i) * dR(b, i));
      } else {
        dQ(m, n) = dR(a, i) * R(b, j) + R(a, i) * dR(b, j) +
                   dR(a, j) * R(b, i) + R(a, j) * dR(b, i);
      }
    }
  }
  return dQ;
}

Mat6 rotation6(double alpha, double beta, double gamma) {
  return mandel_rotation(euler_rotation(alpha, beta, gamma));
}

EigSym3 eig_sym3(const Mat3& M, double sym_tol) {
  double scale = M.cwiseAbs().maxCoeff();
  if ((M - M.transpose()).cwiseAbs().maxCoeff() >
      sym_tol * std::max(1.0, scale)) {
    throw std::invalid_argument("eig_sym3: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (M + M.transpose()));
  EigSym3 out;
  // SelfAdjointEigenSolver sorts ascending; flip to descending.
  for (int i = 0; i < 3; ++i) {
    out.values(i) = es.eigenvalues()(2 - i);
    out.vectors.col(i) = es.eigenvectors().col(2 - i);
  }
  for (int i = 0; i < 3; ++i) {
    Vec3 v = out.vectors.col(i);
    int imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) out.vectors.col(i) = -v;
  }
  return out;
}

}  // namespace dmn
