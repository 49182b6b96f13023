#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmoney/banknote.hpp"
#include "qmoney/cloner.hpp"
#include "qmoney/distribution.hpp"
#include "qmoney/verification.hpp"

namespace qmoney {

enum class AttackKind { Universal, Pcc, Mpcc, Optimized, Classical, Hybrid };

AttackKind parse_attack_kind(std::string_view name);
std::string to_string(AttackKind k);

struct AttackStrategy {
  AttackKind kind = AttackKind::Optimized;
  double epsilon = 0.0;               // classical fraction
  double quantum_success_prob = 1.0;  // in (0, 1]
  std::uint64_t seed = 0;
  std::optional<CloningMap> chi;      // required for Optimized, optional for Hybrid
};

// Per-photon clone output, aligned with the PhotonSequence it came from.
struct CloneCell {
  size_t cell = 0;
  std::optional<Matrix2c> rho;  // nullopt = LOST
  friend bool operator==(const CloneCell&, const CloneCell&) = default;
};

struct CloneRecord {
  std::vector<CloneCell> cells;
  friend bool operator==(const CloneRecord&, const CloneRecord&) = default;
};

enum class CellStrategy : std::uint8_t { Classical, Quantum, Lost };
std::string to_string(CellStrategy s);

struct CellLog {
  size_t cell = 0;
  CellStrategy used = CellStrategy::Lost;
  bool success = false;
};

struct AttackOutcome {
  CloneRecord clone_a;
  CloneRecord clone_b;
  double copied_fraction = 0.0;  // successes / delivered inputs
  std::vector<CellLog> per_cell_log;
};

/// Quantum map used by a strategy: the analytic family map, the supplied χ,
/// or the optimizer's result for g_public. nullopt for Classical.
std::optional<CloningMap> resolve_cloning_map(const AttackStrategy& strat,
                                              const QubitDistribution& g_public);

/// Every draw is keyed by (seed, cell), so `threads` never changes the result.
/// threads = 0 uses the hardware concurrency.
AttackOutcome run_attack(const PhotonSequence& seq, const QubitDistribution& g_public,
                         const AttackStrategy& strat, unsigned threads = 1);

/// Smallest quantum success probability giving more than one clone on
/// average per input: clamp((1/2 - ε)/(1 - ε), 0, 1).
double min_cloning_efficiency(double epsilon);

struct CloneVerification {
  VerificationReport report;
  std::vector<CellResult> results;  // full grid, for rendering
};

/// Bernoulli check of every delivered clone cell against the secret.
/// Throws GridMismatch when a cell is outside the note or on a blank cell.
CloneVerification verify_clone(const CloneRecord& clone, const Banknote& secret,
                               const VerificationModel& model, std::uint64_t seed,
                               unsigned threads = 1);

/// Exact mean of ⟨ψ|ρ|ψ⟩ over delivered cells (no sampling).
double mean_clone_fidelity(const CloneRecord& clone, const Banknote& secret);

/// key=value report, then optionally a `cell,used,success,correct` table.
std::string write_attack_report(const AttackStrategy& strat, const AttackOutcome& outcome,
                                const CloneVerification& verification, bool per_cell);

// qclone v1 text format
std::string write_clone(const CloneRecord& clone);
CloneRecord read_clone(std::string_view text);

}  // namespace qmoney
