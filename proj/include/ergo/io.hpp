#pragma once

// JSON descriptions of spaces, functions, operators and weights; CSV report
// writers; atomic file output.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>

#include "json.hpp"

#include "ergo/averaging.hpp"
#include "ergo/counterexample.hpp"
#include "ergo/measure_space.hpp"
#include "ergo/operators.hpp"
#include "ergo/random.hpp"
#include "ergo/return_times.hpp"
#include "ergo/weights.hpp"

namespace ergo::io {

using json = nlohmann::json;

/// `{"weights": [...], "truncated": bool}` or `{"uniform": n, "weight": w, "truncated": bool}`.
[[nodiscard]] SpacePtr parse_space(const json& j);

/// `{"re": [...], "im": [...]}` (im optional), `{"constant": x}` or
/// `{"constant": {"re": x, "im": y}}`, `{"character": m}`,
/// `{"random": {"low": a, "high": b, "complex": bool}}` (drawn from `rng`).
[[nodiscard]] MeasurableFunction parse_function(const json& j, const SpacePtr& space, Rng& rng);

/// kinds: kernel, composition, counterexample, cyclic_shift, identity, random_ds_kernel.
/// A counterexample operator carries its own space.
[[nodiscard]] Operator parse_operator(const json& j, const SpacePtr& space, Rng& rng);

/// kinds: constant, periodic, trig_poly, lambda_power, explicit.
[[nodiscard]] WeightSequence parse_weight(const json& j);

/// `[n1, n2, ...]` or `{"geometric": max_n}`.
[[nodiscard]] Checkpoints parse_checkpoints(const json& j);

/// `{"rotation": {"atoms": N, "step": a}}` or `{"weights": [...], "map": [...]}`.
[[nodiscard]] PointSystem parse_system(const json& j);

/// `{"breakpoints": [0, t1, ...], "values": [s1, ...]}`.
[[nodiscard]] Rearrangement parse_rearrangement(const json& j);

[[nodiscard]] json to_json(const DSReport& r);
[[nodiscard]] json to_json(const CounterexampleCertificate& c);
[[nodiscard]] json to_json(const CertificateVerification& v);

/// First line of every CSV output: `# ergo schema=1 command=<cmd> seed=<seed>`.
[[nodiscard]] std::string provenance_line(std::string_view command, std::uint64_t seed);

/// Columns n,probe_id,re,im,l1_norm,linf_norm,majorized; one row per checkpoint and probe.
void write_report_csv(std::ostream& out, const AveragingReport& report);

/// Columns lambda_index,lambda_re,lambda_im,probe,n,avg_re,avg_im[,oracle_re,oracle_im,abs_err].
/// The oracle columns are written when `oracle` is set; it receives
/// (lambda_index, probe_slot, checkpoint_slot).
using SweepOracle = std::function<Complex(std::size_t, std::size_t, std::size_t)>;
void write_sweep_csv(std::ostream& out, const SweepResult& sweep, const SweepOracle& oracle = {});

/// Columns n,probe_id,omega,y,re,im.
void write_product_csv(std::ostream& out, const ProductAverageReport& report);

/// Writes through a temporary sibling file and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// 1-based line and column of a byte offset in `text`.
[[nodiscard]] std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset);

}  // namespace ergo::io
