#pragma once

// Eigenpairs of a real symmetric arrowhead matrix
//
//     [ eps  g^T ]
//     [ g    diag(omega) ]
//
// from the secular equation f(E) = eps - E + sum_k g_k^2 / (E - omega_k) = 0.
// f is strictly decreasing between consecutive poles, so every gap holds exactly
// one root; one more lies below the lowest pole and one above the highest.
//
// Each root is located relative to its nearer pole (E = omega_o + tau) so that the
// differences E - omega_k keep full relative accuracy, then refined by bisection
// followed by safeguarded Newton. Eigenvectors follow from u_k = g_k a / (E - omega_k).

#include "doubletscope/eigen_pair.hpp"
#include "doubletscope/sector_hamiltonian.hpp"

#include <cstddef>
#include <vector>

namespace doubletscope {

// f(E). Throws PoleHit if E equals a pole.
double secular_value(const ArrowheadSector& sector, double energy);

// All dimension() eigenpairs, ascending. Throws ConvergenceError naming the interval on failure.
std::vector<EigenPair> solve_all(const ArrowheadSector& sector);

// The eigenpairs of solve_all with energy in [e_min, e_max], computed only for the
// intervals that can contain such a root. Identical to filtering solve_all.
std::vector<EigenPair> solve_window(const ArrowheadSector& sector, double e_min, double e_max);

// Largest matrix dimension dense_oracle accepts.
inline constexpr std::size_t dense_oracle_max_dimension = 5000;

// The root_index-th eigenpair alone (root_index < dimension()).
EigenPair solve_one(const ArrowheadSector& sector, std::size_t root_index);

// Independent check: forms the dense matrix and diagonalizes it with cyclic Jacobi
// rotations. Same ordering and sign convention as solve_all.
std::vector<EigenPair> dense_oracle(const ArrowheadSector& sector);

// Sector-matrix residual ||M v - E v||_2 of an eigenpair, M applied in arrowhead form.
double sector_residual(const ArrowheadSector& sector, const EigenPair& pair);

} // namespace doubletscope
