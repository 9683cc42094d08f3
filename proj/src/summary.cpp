#include "slim/summary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slim {

double quantile(std::vector<double> v, double p) {
  if (v.empty()) throw std::invalid_argument("quantile: empty sample");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile: p outside [0, 1]");
  std::sort(v.begin(), v.end());
  double h = p * (v.size() - 1);
  size_t lo = static_cast<size_t>(std::floor(h));
  size_t hi = static_cast<size_t>(std::ceil(h));
  return v[lo] + (h - lo) * (v[hi] - v[lo]);
}

Quantiles summarize_samples(const std::vector<double>& samples) {
  return {quantile(samples, 0.025), quantile(samples, 0.5), quantile(samples, 0.975)};
}

MatrixQuantiles summarize_samples(const std::vector<Eigen::MatrixXd>& samples) {
  if (samples.empty()) throw std::invalid_argument("summarize_samples: empty sample");
  const auto rows = samples[0].rows(), cols = samples[0].cols();
  MatrixQuantiles q;
  q.q025.resize(rows, cols);
  q.median.resize(rows, cols);
  q.q975.resize(rows, cols);
  std::vector<double> buf(samples.size());
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (size_t s = 0; s < samples.size(); ++s) buf[s] = samples[s](i, j);
      std::vector<double> tmp = buf;
      q.q025(i, j) = quantile(tmp, 0.025);
      q.median(i, j) = quantile(buf, 0.5);
      q.q975(i, j) = quantile(buf, 0.975);
    }
  return q;
}

FactorSummary summarize_factor_chain(const std::vector<FactorSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("summarize_factor_chain: no samples");
  FactorSummary out;
  std::vector<Eigen::MatrixXd> cs, etas;
  for (const auto& s : samples) {
    cs.push_back(s.C);
    etas.push_back(s.eta);
  }
  out.C = summarize_samples(cs);
  out.eta = summarize_samples(etas);
  const int d = static_cast<int>(samples[0].psi.size());
  const int K = static_cast<int>(samples[0].nu.size());
  std::vector<double> buf(samples.size());
  for (int i = 0; i < d; ++i) {
    for (size_t s = 0; s < samples.size(); ++s) buf[s] = samples[s].psi[i];
    out.psi.push_back(summarize_samples(buf));
  }
  for (int j = 0; j < K; ++j) {
    for (size_t s = 0; s < samples.size(); ++s) buf[s] = samples[s].nu[j];
    out.nu.push_back(summarize_samples(buf));
  }
  return out;
}

DagSummary summarize_dag_chain(const DagChainResult& chain, const Hyperparameters& hp,
                               bool half_threshold) {
  if (chain.samples.empty())
    throw std::invalid_argument("summarize_dag_chain: no samples");
  const int d = static_cast<int>(chain.samples[0].B.rows());
  const int m = static_cast<int>(chain.samples[0].C_l.cols());
  const size_t S = chain.samples.size();
  const Permutation& p = chain.order;

  DagSummary out;
  out.order = p;
  out.b_median = Eigen::MatrixXd::Zero(d, d);
  out.eta_median = Eigen::MatrixXd::Zero(d, d);
  out.adjacency = Eigen::MatrixXi::Zero(d, d);
  out.eta_latent_median = Eigen::MatrixXd::Zero(d, std::max(m, 0));
  out.latent_adjacency = Eigen::MatrixXi::Zero(d, std::max(m, 0));

  // column rejection bounds from the posterior mean rates
  Eigen::VectorXd nu_bar_b = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd nu_bar_l = Eigen::VectorXd::Zero(std::max(m, 1));
  for (const auto& s : chain.samples) {
    nu_bar_b += s.nu_b / static_cast<double>(S);
    if (m > 0) nu_bar_l += s.nu_l / static_cast<double>(S);
  }

  std::vector<double> wbuf(S), ebuf(S);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < i; ++j) {
      for (size_t s = 0; s < S; ++s) {
        wbuf[s] = chain.samples[s].B(i, j);
        ebuf[s] = chain.samples[s].eta_b(i, j);
      }
      // edge p[j] -> p[i] in variable space
      int from = p.order[j], to = p.order[i];
      Quantiles w = summarize_samples(wbuf);
      double eta_med = quantile(ebuf, 0.5);
      out.b_median(to, from) = w.median;
      out.eta_median(to, from) = eta_med;
      double bound = half_threshold ? 0.5 : hp.alpha_m * (1.0 - nu_bar_b[j]);
      if (eta_med > bound) {
        out.adjacency(to, from) = 1;
        out.edges.push_back({from, to, w.q025, w.median, w.q975, eta_med, true});
      }
    }
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < m; ++k) {
      for (size_t s = 0; s < S; ++s) {
        wbuf[s] = chain.samples[s].C_l(i, k);
        ebuf[s] = chain.samples[s].eta_l(i, k);
      }
      int to = p.order[i];
      Quantiles w = summarize_samples(wbuf);
      double eta_med = quantile(ebuf, 0.5);
      out.eta_latent_median(to, k) = eta_med;
      double bound = half_threshold ? 0.5 : hp.alpha_m * (1.0 - nu_bar_l[k]);
      if (eta_med > bound) {
        out.latent_adjacency(to, k) = 1;
        out.edges.push_back({d + k, to, w.q025, w.median, w.q975, eta_med, true});
      }
    }

  // psi reported in position order alongside `order`
  std::vector<double> buf(S), lls(S);
  for (int i = 0; i < d; ++i) {
    for (size_t s = 0; s < S; ++s) buf[s] = chain.samples[s].psi[i];
    out.psi.push_back(summarize_samples(buf));
  }
  for (size_t s = 0; s < S; ++s) lls[s] = chain.samples[s].train_ll;
  out.median_train_ll = quantile(lls, 0.5);
  return out;
}

}  // namespace slim
