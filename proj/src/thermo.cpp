#include "thermocap/thermo.hpp"

#include <cmath>
#include <sstream>

namespace thermocap {

GammaSpec GammaSpec::from_hamiltonian(const Matrix& h, double beta) {
  GammaSpec g;
  g.hamiltonian = 0.5 * (h + h.adjoint());
  g.beta = beta;
  g.gamma = matrix_function(*g.hamiltonian, [beta](double x) { return std::exp(-beta * x); });
  return g;
}

GammaSpec GammaSpec::abstract(const Matrix& g) {
  GammaSpec out;
  out.gamma = 0.5 * (g + g.adjoint());
  EigResult e = eig_hermitian(out.gamma);
  if (e.values.minCoeff() < -1e-10 * std::max(1.0, e.values.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("GammaSpec: operator must be positive semi-definite");
  return out;
}

Matrix gibbs(const GammaSpec& g) {
  const double tr = std::real(g.gamma.trace());
  if (tr <= 0) throw std::invalid_argument("gibbs: Gamma has zero trace");
  return g.gamma / tr;
}

double BatteryState::charge() const { return std::log(double(dim)) - std::log(double(rank)); }

Matrix BatteryState::state() const {
  Matrix m = Matrix::Zero(dim, dim);
  for (int i = 0; i < rank; ++i) m(i, i) = 1.0 / rank;
  return m;
}

Matrix BatteryState::support() const {
  Matrix m = Matrix::Zero(dim, dim);
  for (int i = 0; i < rank; ++i) m(i, i) = 1.0;
  return m;
}

void WorkLedger::record(const std::string& label, double w_before, double w_after) {
  entries.push_back({label, w_before, w_after});
}

double WorkLedger::total() const {
  double t = 0;
  for (const auto& e : entries) t += e.w_before - e.w_after;
  return t;
}

std::string WorkLedger::to_json_lines() const {
  std::ostringstream os;
  os.precision(17);
  for (const auto& e : entries)
    os << "{\"label\":\"" << e.label << "\",\"w_before\":" << e.w_before
       << ",\"w_after\":" << e.w_after << "}\n";
  return os.str();
}

QuantumChannel effective_work_process(const QuantumChannel& phi, int dim_x,
                                      const BatteryState& tau_in, const BatteryState& tau_out) {
  const int dw = tau_in.dim;
  if (phi.dim_in() != dim_x * dw || phi.dim_out() != dim_x * dw || tau_out.dim != dw)
    throw std::invalid_argument("effective_work_process: dims mismatch");
  // Kraus of T: (I (x) <w'|) Phi_kraus (I (x) |w>) sqrt(tau eigenvalue),
  // for w in the support of tau_in and w' in the support of tau_out.
  std::vector<Matrix> ks;
  const double p_in = 1.0 / tau_in.rank;
  for (const auto& k : phi.kraus())
    for (int w = 0; w < tau_in.rank; ++w)
      for (int wp = 0; wp < tau_out.rank; ++wp) {
        Matrix m(dim_x, dim_x);
        for (int a = 0; a < dim_x; ++a)
          for (int b = 0; b < dim_x; ++b) m(a, b) = k(a * dw + wp, b * dw + w);
        m *= std::sqrt(p_in);
        if (inf_norm(m) > 0) ks.push_back(m);
      }
  if (ks.empty()) ks.push_back(Matrix::Zero(dim_x, dim_x));
  return QuantumChannel(dim_x, dim_x, std::move(ks), TpClass::TraceNonIncreasing);
}

double gibbs_sub_preservation_margin(const Matrix& t_of_gamma, const Matrix& gamma_out) {
  if (!support_contained(t_of_gamma, gamma_out))
    return std::numeric_limits<double>::infinity();
  const Matrix gi = inv_sqrt_support(gamma_out);
  return std::log(op_norm_hermitian(gi * t_of_gamma * gi));
}

double gibbs_sub_preservation_margin(const QuantumChannel& t, const GammaSpec& gamma_in,
                                     const GammaSpec& gamma_out) {
  return gibbs_sub_preservation_margin(t.apply(gamma_in.gamma), gamma_out.gamma);
}

QuantumChannel lift_to_gpm(const QuantumChannel& t, const GammaSpec& gamma_in,
                           const GammaSpec& gamma_out, const BatteryState& tau_in,
                           const BatteryState& tau_out) {
  if (tau_in.dim != tau_out.dim)
    throw std::invalid_argument("lift_to_gpm: battery dims differ");
  const double margin = gibbs_sub_preservation_margin(t, gamma_in, gamma_out);
  const double budget = tau_in.charge() - tau_out.charge();
  if (budget < margin - 1e-9)
    throw std::invalid_argument("lift_to_gpm: battery budget below the Gibbs margin");
  const int dx = t.dim_in();
  const int dw = tau_in.dim;
  // Phi(.) = T( tr_W[ P^m (.) ] ) (x) tau^{m'}
  std::vector<Matrix> ks;
  const double p_out = 1.0 / tau_out.rank;
  for (const auto& k : t.kraus())
    for (int w = 0; w < tau_in.rank; ++w)
      for (int wp = 0; wp < tau_out.rank; ++wp) {
        Matrix m = Matrix::Zero(dx * dw, dx * dw);
        for (int a = 0; a < t.dim_out(); ++a)
          for (int b = 0; b < dx; ++b) m(a * dw + wp, b * dw + w) = std::sqrt(p_out) * k(a, b);
        ks.push_back(m);
      }
  // complete with the battery-failure branch so the lift is trace
  // non-increasing wherever T is
  return QuantumChannel(dx * dw, dx * dw, std::move(ks), TpClass::TraceNonIncreasing);
}

double thermal_to_pure_cost(const Matrix& h, double energy, double beta) {
  EigResult e = eig_hermitian(h);
  bool found = false;
  for (int i = 0; i < e.values.size(); ++i)
    if (std::abs(e.values(i) - energy) <= 1e-9 * std::max(1.0, inf_norm(h))) found = true;
  if (!found) throw std::invalid_argument("thermal_to_pure_cost: E is not an eigenvalue of H");
  double z = 0;
  for (int i = 0; i < e.values.size(); ++i) z += std::exp(-beta * e.values(i));
  return beta * energy + std::log(z);
}

}  // namespace thermocap
