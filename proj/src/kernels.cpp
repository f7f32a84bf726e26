#include "cpad/kernels.hpp"

#include <exception>

#include <omp.h>

namespace cpad::kernels {

namespace {

CipherRow encrypt_row(const GroupElem& g, const GroupElem& g_a, const RowInput& in) {
  return CipherRow{g_a.pow(in.lambda) * in.attr_base->pow(-in.r), g.pow(in.r)};
}

TargetElem pairing_term(const GroupElem& L, const PairingTerm& t) {
  return (pair(*t.C, L) * pair(*t.D, *t.key_elem)).pow(t.omega);
}

// Runs body(i) for i in [0, n) across OpenMP workers. Every worker reports
// group operations to the caller's counter scope; the first exception thrown
// by any iteration is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  detail::CounterSink* sink = detail::active_sink();
  std::exception_ptr failure;
#pragma omp parallel
  {
    detail::SinkBinding bind(sink);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical(cpad_kernel_failure)
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<CipherRow> encrypt_rows_serial(const GroupElem& g, const GroupElem& g_a,
                                           std::span<const RowInput> rows) {
  std::vector<CipherRow> out;
  out.reserve(rows.size());
  for (const auto& in : rows) out.push_back(encrypt_row(g, g_a, in));
  return out;
}

std::vector<CipherRow> encrypt_rows_parallel(const GroupElem& g, const GroupElem& g_a,
                                             std::span<const RowInput> rows) {
  std::vector<CipherRow> out(rows.size());
  parallel_for(rows.size(), [&](std::size_t i) { out[i] = encrypt_row(g, g_a, rows[i]); });
  return out;
}

std::vector<TargetElem> pairing_terms_serial(const GroupElem& L, std::span<const PairingTerm> terms) {
  std::vector<TargetElem> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(pairing_term(L, t));
  return out;
}

std::vector<TargetElem> pairing_terms_parallel(const GroupElem& L, std::span<const PairingTerm> terms) {
  std::vector<TargetElem> out(terms.size());
  parallel_for(terms.size(), [&](std::size_t i) { out[i] = pairing_term(L, terms[i]); });
  return out;
}

int parallel_threads() { return omp_get_max_threads(); }

}  // namespace cpad::kernels
