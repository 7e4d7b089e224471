#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

namespace {

struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  double n;
};

Moments moments(const Rows& rows) {
  const std::size_t n = rows.size();
  const std::size_t p = rows.front().size();
  Moments m{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p)),
            Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)), static_cast<double>(n)};
  for (std::size_t a = 0; a < p; ++a) {
    long double s = 0;
    for (const auto& r : rows) s += r[a];
    m.mean(static_cast<Eigen::Index>(a)) = static_cast<double>(s / n);
  }
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b < p; ++b) {
      long double s = 0;
      for (const auto& r : rows) {
        s += (r[a] - m.mean(static_cast<Eigen::Index>(a))) * static_cast<long double>(r[b] - m.mean(static_cast<Eigen::Index>(b)));
      }
      m.cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = static_cast<double>(s / n);
    }
  }
  return m;
}

Eigen::MatrixXd inverse(const Eigen::MatrixXd& a) { return a.fullPivLu().inverse(); }

Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  return es.operatorInverseSqrt();
}

}  // namespace

double flrt(const std::vector<Rows>& groups) {
  std::vector<Moments> ms;
  for (const auto& g : groups) ms.push_back(moments(g));
  const auto p = ms.front().mean.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
  std::vector<Eigen::MatrixXd> inv;
  for (const auto& m : ms) {
    inv.push_back(inverse(m.cov));
    a += m.n * inv.back();
    b += m.n * inv.back() * m.mean;
  }
  const Eigen::VectorXd mu = inverse(a) * b;
  double t = 0;
  for (std::size_t j = 0; j < ms.size(); ++j) {
    const Eigen::VectorXd r = ms[j].mean - mu;
    t += ms[j].n * (r.transpose() * inv[j] * r)(0, 0);
  }
  return t;
}

double noncentrality(const std::vector<Eigen::VectorXd>& means, const std::vector<Eigen::MatrixXd>& covs,
                     const std::vector<double>& sizes) {
  const auto p = means.front().size();
  const auto k = static_cast<Eigen::Index>(means.size());
  Eigen::MatrixXd s(p * k, p);
  Eigen::VectorXd v(p * k);
  Eigen::MatrixXd precision = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const Eigen::MatrixXd root = inverse_sqrt(covs[ju]);
    s.middleRows(j * p, p) = std::sqrt(sizes[ju]) * root;
    v.segment(j * p, p) = root * (means.front() - means[ju]);
    precision += sizes[ju] * inverse(covs[ju]);
  }
  const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(p * k, p * k) - s * inverse(precision) * s.transpose();
  return (v.transpose() * q * v)(0, 0);
}

double noncentrality(const std::vector<Rows>& groups) {
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covs;
  std::vector<double> sizes;
  for (const auto& g : groups) {
    auto m = moments(g);
    means.push_back(m.mean);
    covs.push_back(m.cov);
    sizes.push_back(m.n);
  }
  return noncentrality(means, covs, sizes);
}

funkmean::GroupedScores to_scores(const std::vector<Rows>& groups) {
  funkmean::GroupedScores out;
  for (const auto& g : groups) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.front().size()));
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t a = 0; a < g[i].size(); ++a) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) = g[i][a];
    }
    out.groups.push_back(m);
  }
  return out;
}

Eigen::MatrixXd random_spd(int p, funkmean::RngStream& rng, double cond) {
  Eigen::MatrixXd g(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) g(i, j) = rng.normal();
  }
  const Eigen::MatrixXd q = g.householderQr().householderQ();
  Eigen::VectorXd lambda(p);
  for (int i = 0; i < p; ++i) lambda(i) = std::pow(cond, rng.uniform());
  return q * lambda.asDiagonal() * q.transpose();
}

Eigen::MatrixXd gaussian_rows(int n, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, funkmean::RngStream& rng) {
  const Eigen::MatrixXd l = cov.llt().matrixL();
  Eigen::MatrixXd out(n, mean.size());
  Eigen::VectorXd z(mean.size());
  for (int i = 0; i < n; ++i) {
    for (Eigen::Index a = 0; a < z.size(); ++a) z(a) = rng.normal();
    out.row(i) = (mean + l * z).transpose();
  }
  return out;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double kolmogorov_p_value(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double trapezoid(const std::function<double(double)>& f, const std::vector<double>& grid) {
  double s = 0;
  for (std::size_t l = 0; l + 1 < grid.size(); ++l) s += 0.5 * (grid[l + 1] - grid[l]) * (f(grid[l]) + f(grid[l + 1]));
  return s;
}

std::vector<double> uniform_grid(int m) {
  std::vector<double> g(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) g[static_cast<std::size_t>(i)] = static_cast<double>(i) / (m - 1);
  return g;
}

}  // namespace oracle
