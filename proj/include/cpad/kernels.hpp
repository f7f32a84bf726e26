#pragma once

// Per-row inner loops of encryption and decryption. Each has a serial
// reference version and an OpenMP version; both execute the same group
// operations in the same per-row order and produce identical results.

#include <span>
#include <vector>

#include "cpad/group.hpp"

namespace cpad {

enum class Exec { Serial, Parallel };

struct CipherRow {
  GroupElem C;  // g_a^lambda * h^(-r)
  GroupElem D;  // g^r

  friend bool operator==(const CipherRow&, const CipherRow&) = default;
};

struct RowInput {
  const GroupElem* attr_base;
  Scalar lambda;
  Scalar r;
};

/// One factor of the decryption product: (e(C, L) e(D, K_attr))^omega.
struct PairingTerm {
  const GroupElem* C;
  const GroupElem* D;
  const GroupElem* key_elem;
  Scalar omega;
};

namespace kernels {

std::vector<CipherRow> encrypt_rows_serial(const GroupElem& g, const GroupElem& g_a,
                                           std::span<const RowInput> rows);
std::vector<CipherRow> encrypt_rows_parallel(const GroupElem& g, const GroupElem& g_a,
                                             std::span<const RowInput> rows);

std::vector<TargetElem> pairing_terms_serial(const GroupElem& L, std::span<const PairingTerm> terms);
std::vector<TargetElem> pairing_terms_parallel(const GroupElem& L, std::span<const PairingTerm> terms);

inline std::vector<CipherRow> encrypt_rows(Exec exec, const GroupElem& g, const GroupElem& g_a,
                                           std::span<const RowInput> rows) {
  return exec == Exec::Parallel ? encrypt_rows_parallel(g, g_a, rows)
                                : encrypt_rows_serial(g, g_a, rows);
}

inline std::vector<TargetElem> pairing_terms(Exec exec, const GroupElem& L,
                                             std::span<const PairingTerm> terms) {
  return exec == Exec::Parallel ? pairing_terms_parallel(L, terms) : pairing_terms_serial(L, terms);
}

/// Worker threads the parallel kernels will use.
int parallel_threads();

}  // namespace kernels
}  // namespace cpad
