// SPDX-License-Identifier: Apache-2.0
#pragma once

// On-disk layout of bundles, captures and reconstructions: one PFM per
// channel plane plus a manifest naming each role.

#include <filesystem>
#include <string>

#include "polarbench/capture_sim.hpp"
#include "polarbench/io/manifest.hpp"
#include "polarbench/scene_synth.hpp"

namespace polarbench::io {

/// Writes every plane of `m` as <role>.pfm (or <role>_c<k>.pfm) and records them.
void write_map(const std::filesystem::path& dir, RunManifest& man, const std::string& role, const Map& m);
void write_mask(const std::filesystem::path& dir, RunManifest& man, const std::string& role, const Mask& m);
Map read_map(const std::filesystem::path& dir, const RunManifest& man, const std::string& role);
Mask read_mask(const std::filesystem::path& dir, const RunManifest& man, const std::string& role);

void write_bundle(const std::filesystem::path& dir, const SceneBundle& b, RunManifest& man);
SceneBundle read_bundle(const std::filesystem::path& dir);

void write_capture_easypolar(const std::filesystem::path& dir, const CaptureSet& c, RunManifest& man);
CaptureSet read_capture_easypolar(const std::filesystem::path& dir);

void write_capture_dofp(const std::filesystem::path& dir, const DoFPRaw& raw, RunManifest& man);
DoFPRaw read_capture_dofp(const std::filesystem::path& dir);

void write_capture_dot(const std::filesystem::path& dir, const DoTCapture& dot, RunManifest& man);
DoTCapture read_capture_dot(const std::filesystem::path& dir);

/// Predicted parameters, S0 and (optionally) confidence, plus PNG previews.
struct Prediction {
  PolarParams params;
  IntensityImage s0;
  Map confidence;  // empty when the paradigm has none
};

void write_prediction(const std::filesystem::path& dir, const Prediction& p, RunManifest& man);
Prediction read_prediction(const std::filesystem::path& dir);

}  // namespace polarbench::io
