// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "polarbench/cli/config.hpp"
#include "polarbench/io/artifacts.hpp"

namespace polarbench::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitOther = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumerical = 4;

/// Runs `body`, mapping exceptions to exit codes and printing "error: ..." to `err`.
int run_guarded(const std::function<void()>& body, std::ostream& err);

/// Each command writes below cfg.out_dir() and logs one line per scene to `log`.
void cmd_render(const ExperimentConfig& cfg, std::ostream& log);
void cmd_capture(const ExperimentConfig& cfg, std::ostream& log);
void cmd_reconstruct(const ExperimentConfig& cfg, std::ostream& log);
void cmd_evaluate(const ExperimentConfig& cfg, std::ostream& log);
void cmd_ablate(const ExperimentConfig& cfg, std::ostream& log);
void cmd_compare(const ExperimentConfig& cfg, std::ostream& log);

/// Prediction of one paradigm from in-memory captures.
io::Prediction predict_easypolar(const CaptureSet& capture, const SceneBundle* bundle, const ExperimentConfig& cfg);
io::Prediction predict_dofp(const DoFPRaw& raw);
io::Prediction predict_dot(const DoTCapture& dot);

/// Capture with the configured noise (seeded per scene), mismatch and,
/// when enabled, chart-based correction.
CaptureSet simulate_easypolar(const SceneBundle& b, const ExperimentConfig& cfg, std::uint64_t seed);

}  // namespace polarbench::cli
