#include "qpfe/statevector.hpp"

#include <sstream>

#include "qpfe/errors.hpp"
#include "qpfe/format.hpp"

namespace qpfe {

StateVector make_basis_state(const RegisterLayout& layout, std::uint64_t basis,
                             int cap) {
  const int total = layout.total_qubits();
  if (total > cap)
    throw CapacityError("state vector: " + std::to_string(total) +
                        " qubits exceed capacity " + std::to_string(cap));
  StateVector state;
  state.layout = layout;
  state.amps = Eigen::VectorXcd::Zero(std::int64_t{1} << total);
  if (basis >> total)
    throw std::invalid_argument("make_basis_state: basis index out of range");
  state.amps[static_cast<std::int64_t>(basis)] = Complex{1.0, 0.0};
  return state;
}

std::string dump_nonzero(const StateVector& state, double tol) {
  std::ostringstream os;
  for (std::int64_t i = 0; i < state.amps.size(); ++i) {
    const Complex a = state.amps[i];
    if (std::abs(a) <= tol) continue;
    os << i << ' ' << format_double(a.real()) << ' '
       << format_double(a.imag()) << '\n';
  }
  return os.str();
}

}  // namespace qpfe
