// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "polarbench/capture_sim.hpp"
#include "polarbench/eval.hpp"
#include "polarbench/reconstruct.hpp"
#include "polarbench/scene_synth.hpp"

namespace polarbench::cli {

enum class Paradigm { easypolar, dofp, dot };

std::string paradigm_name(Paradigm p);
/// Throws ConfigError for an unknown name.
Paradigm parse_paradigm(const std::string& name);

struct CalibrationSettings {
  bool enabled = false;
  CalibrationModel model = CalibrationModel::gain_offset;
  int patches = 24;
};

struct ExperimentConfig {
  std::vector<std::string> scenes;  // library names; empty with no files = whole library
  std::vector<std::string> scene_files;
  int size = 256;
  std::uint64_t seed = 0;
  std::optional<double> focal_px;    // rig override
  std::optional<double> baseline_m;  // rig override
  NoiseModel noise;
  RadiometricMismatch mismatch;
  CalibrationSettings calibration;
  std::vector<Paradigm> paradigms{Paradigm::easypolar, Paradigm::dofp, Paradigm::dot};
  Eigen::Vector2d dot_drift = Eigen::Vector2d::Zero();
  DisparityMode disparity = DisparityMode::ground_truth;
  BlockMatchConfig block;
  GatingConfig gating;
  LossConfig loss;
  std::vector<double> ablation_baselines{0.036, 0.040, 0.044};
  int ablation_seeds = 3;
  int compare_seeds = 5;
  std::string out;  // empty: $POLARBENCH_OUT or ./polarbench_out
  int jobs = 1;

  /// Throws ConfigError on any out-of-range value.
  void validate() const;
  std::filesystem::path out_dir() const;
  ReconstructConfig reconstruct_config() const;
};

/// Parses a config document; unknown keys and type errors throw ConfigError
/// with "<source>:<line>:" anchors. Missing keys keep their defaults.
ExperimentConfig config_from_json_text(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON (every key, defaults filled in).
std::string config_to_json(const ExperimentConfig& cfg);

/// sha256 of the canonical JSON with `out` and `jobs` removed, so the hash
/// only covers settings that influence results.
std::string config_hash(const ExperimentConfig& cfg);

/// Scenes selected by the config, rig overrides applied.
std::vector<SceneSpec> resolve_scenes(const ExperimentConfig& cfg);

/// Independent per-scene noise seed.
std::uint64_t scene_seed(const ExperimentConfig& cfg, std::size_t scene_index, std::uint64_t repeat = 0);

}  // namespace polarbench::cli
