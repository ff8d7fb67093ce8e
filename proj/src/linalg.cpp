#include "ncmetric/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ncmetric/error.hpp"

namespace ncm {

namespace {

void require_square(const CMatrix& a, const char* where) {
  if (!a.is_square()) throw NcError(ErrorKind::NotSquare, where);
}

}  // namespace

bool is_hermitian(const CMatrix& a, double rel_tol) {
  if (!a.is_square()) return false;
  const double scale = std::max(1.0, a.frobenius_norm());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j)
      if (std::abs(a(i, j) - std::conj(a(j, i))) > rel_tol * scale) return false;
  return true;
}

HermEig herm_eig(const CMatrix& input) {
  require_square(input, "herm_eig");
  if (!is_hermitian(input)) throw NcError(ErrorKind::NonHermitianInput, "herm_eig");

  const std::size_t n = input.rows();
  CMatrix a = real_part(input);
  CMatrix v = CMatrix::identity(n);
  const double fro = a.frobenius_norm();
  const double target = 1e-13 * fro;

  auto off_mass = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  int sweeps = 0;
  constexpr int kMaxSweeps = 80;
  while (fro > 0.0 && off_mass() > target && sweeps < kMaxSweeps) {
    ++sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double beta = std::abs(apq);
        if (beta <= std::numeric_limits<double>::min() * 4 || beta < 1e-18 * fro) continue;
        const cplx phase = apq / beta;  // e^{iφ}
        const double alpha = a(p, p).real();
        const double gamma = a(q, q).real();
        const double tau = (gamma - alpha) / (2.0 * beta);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // J = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
        const cplx jpp = c;
        const cplx jpq = s;
        const cplx jqp = -s * std::conj(phase);
        const cplx jqq = c * std::conj(phase);

        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
  HermEig out;
  out.values.resize(n);
  out.vectors = CMatrix(n, n);
  out.sweeps = sweeps;
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

double min_eigenvalue(const CMatrix& hermitian) {
  if (hermitian.empty()) return 0.0;
  return herm_eig(hermitian).values.front();
}

double max_eigenvalue(const CMatrix& hermitian) {
  if (hermitian.empty()) return 0.0;
  return herm_eig(hermitian).values.back();
}

bool is_strictly_positive(const CMatrix& hermitian, double margin) {
  const auto eig = herm_eig(hermitian);
  if (eig.values.empty()) return true;
  const double norm = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
  return eig.values.front() > margin * std::max(1.0, norm);
}

double operator_norm(const CMatrix& a) {
  if (a.empty()) return 0.0;
  const CMatrix gram = a.rows() <= a.cols() ? a * a.adjoint() : a.adjoint() * a;
  return std::sqrt(std::max(0.0, max_eigenvalue(real_part(gram))));
}

CMatrix inverse(const CMatrix& a) {
  require_square(a, "inverse");
  const std::size_t n = a.rows();
  const double scale = a.frobenius_norm();
  if (n > 0 && scale == 0.0) throw NcError(ErrorKind::SingularMatrix, "zero matrix");
  CMatrix lu = a;
  CMatrix inv = CMatrix::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > best) best = std::abs(lu(i, k)), piv = i;
    if (best < kSingularPivot * scale)
      throw NcError(ErrorKind::SingularMatrix, "pivot below threshold");
    if (piv != k)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(lu(k, j), lu(piv, j));
        std::swap(inv(k, j), inv(piv, j));
      }
    const cplx d = 1.0 / lu(k, k);
    for (std::size_t j = 0; j < n; ++j) {
      lu(k, j) *= d;
      inv(k, j) *= d;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      const cplx f = lu(i, k);
      if (f == cplx{}) continue;
      for (std::size_t j = 0; j < n; ++j) {
        lu(i, j) -= f * lu(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  return inv;
}

CMatrix right_divide(const CMatrix& b, const CMatrix& a) { return b * inverse(a); }

namespace {

CMatrix spectral_apply(const HermEig& eig, double (*fn)(double)) {
  const std::size_t n = eig.values.size();
  CMatrix scaled = eig.vectors;
  for (std::size_t j = 0; j < n; ++j) {
    const double f = fn(eig.values[j]);
    for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= f;
  }
  return real_part(scaled * eig.vectors.adjoint());
}

}  // namespace

CMatrix psd_inv_sqrt(const CMatrix& a) {
  const auto eig = herm_eig(a);
  if (!eig.values.empty() && !(eig.values.front() > 0.0))
    throw NcError(ErrorKind::NotPositiveDefinite, "psd_inv_sqrt");
  return spectral_apply(eig, [](double x) { return 1.0 / std::sqrt(x); });
}

CMatrix psd_sqrt(const CMatrix& a) {
  const auto eig = herm_eig(a);
  if (!eig.values.empty() && eig.values.front() < -1e-12 * std::max(1.0, std::abs(eig.values.back())))
    throw NcError(ErrorKind::NotPositiveDefinite, "psd_sqrt");
  return spectral_apply(eig, [](double x) { return std::sqrt(std::max(0.0, x)); });
}

std::vector<cplx> eigenvalues(const CMatrix& input) {
  require_square(input, "eigenvalues");
  const std::size_t n = input.rows();
  std::vector<cplx> eig(n);
  if (n == 0) return eig;
  CMatrix h = input;

  // Householder reduction to upper Hessenberg form.
  for (std::size_t k = 0; k + 2 < n; ++k) {
    std::vector<cplx> v(n - k - 1);
    double xnorm = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = h(k + 1 + i, k);
      xnorm += std::norm(v[i]);
    }
    xnorm = std::sqrt(xnorm);
    if (xnorm == 0.0) continue;
    const cplx x0 = v[0];
    const cplx phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx(1.0);
    v[0] += phase * xnorm;
    double vnorm = 0.0;
    for (const auto& z : v) vnorm += std::norm(z);
    vnorm = std::sqrt(vnorm);
    for (auto& z : v) z /= vnorm;
    // H <- (I - 2vv*) H
    for (std::size_t j = 0; j < n; ++j) {
      cplx dot = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) dot += std::conj(v[i]) * h(k + 1 + i, j);
      for (std::size_t i = 0; i < v.size(); ++i) h(k + 1 + i, j) -= 2.0 * v[i] * dot;
    }
    // H <- H (I - 2vv*)
    for (std::size_t i = 0; i < n; ++i) {
      cplx dot = 0.0;
      for (std::size_t j = 0; j < v.size(); ++j) dot += h(i, k + 1 + j) * v[j];
      for (std::size_t j = 0; j < v.size(); ++j) h(i, k + 1 + j) -= 2.0 * dot * std::conj(v[j]);
    }
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }

  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double hnorm = std::max(h.frobenius_norm(), std::numeric_limits<double>::min());
  std::size_t hi = n - 1;
  int iter = 0;
  int total = 0;
  struct Rot {
    cplx x, y;
    double r;
  };
  std::vector<Rot> rots;
  while (hi > 0) {
    std::size_t lo = hi;
    while (lo > 0) {
      const double s = std::abs(h(lo - 1, lo - 1)) + std::abs(h(lo, lo));
      if (std::abs(h(lo, lo - 1)) <= eps * (s > 0.0 ? s : hnorm)) {
        h(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      eig[hi] = h(hi, hi);
      --hi;
      iter = 0;
      continue;
    }
    if (++total > 200 * static_cast<int>(n) + 1000)
      throw NcError(ErrorKind::EvaluationFailure, "QR eigenvalue iteration did not converge");
    ++iter;

    const cplx a = h(hi - 1, hi - 1), b = h(hi - 1, hi), c = h(hi, hi - 1), d = h(hi, hi);
    cplx mu;
    if (iter % 11 == 10) {
      mu = d + 0.75 * std::abs(c);  // exceptional shift
    } else {
      const cplx half_tr = 0.5 * (a + d);
      const cplx disc = std::sqrt(half_tr * half_tr - (a * d - b * c));
      const cplx m1 = half_tr + disc, m2 = half_tr - disc;
      mu = std::abs(m1 - d) < std::abs(m2 - d) ? m1 : m2;
    }

    for (std::size_t k = lo; k <= hi; ++k) h(k, k) -= mu;
    rots.clear();
    for (std::size_t k = lo; k < hi; ++k) {
      const cplx x = h(k, k), y = h(k + 1, k);
      const double r = std::hypot(std::abs(x), std::abs(y));
      rots.push_back({x, y, r});
      if (r == 0.0) continue;
      for (std::size_t j = k; j <= hi; ++j) {
        const cplx hk = h(k, j), hk1 = h(k + 1, j);
        h(k, j) = (std::conj(x) * hk + std::conj(y) * hk1) / r;
        h(k + 1, j) = (-y * hk + x * hk1) / r;
      }
    }
    for (std::size_t k = lo; k < hi; ++k) {
      const auto& g = rots[k - lo];
      if (g.r == 0.0) continue;
      const std::size_t last = std::min(k + 2, hi);
      for (std::size_t i = lo; i <= last; ++i) {
        const cplx hk = h(i, k), hk1 = h(i, k + 1);
        h(i, k) = (hk * g.x + hk1 * g.y) / g.r;
        h(i, k + 1) = (-hk * std::conj(g.y) + hk1 * std::conj(g.x)) / g.r;
      }
    }
    for (std::size_t k = lo; k <= hi; ++k) h(k, k) += mu;
  }
  eig[0] = h(0, 0);
  return eig;
}

}  // namespace ncm
