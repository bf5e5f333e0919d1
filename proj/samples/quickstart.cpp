/* Copyright 2026 The drivenet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License. */

// Trains a small model on in-memory synthetic clips and prints the horizon
// table. Runs in well under a minute on one core.
#include <iostream>

#include "drivenet/drivenet.hpp"

using namespace drivenet;

int main() {
  config::ExperimentConfig cfg(config::Profile::desk);
  cfg.set("train.epochs", "15");

  SyntheticConfig synth = cfg.synthetic();
  synth.n_clips = 50;
  std::vector<Clip> fit, test;
  for (int i = 0; i < synth.n_clips; ++i) (i < 40 ? fit : test).push_back(synth::make_clip(synth, i));

  train::Trainer trainer(cfg.train(), fit);
  const auto result = trainer.run([](const train::EpochRecord& r) {
    std::cout << "epoch " << r.epoch << " loss " << r.loss << " train_acc " << r.train_accuracy << '\n';
  });

  for (const auto& row : eval::horizon_eval(result.final_model, test, cfg.eval_options()))
    std::cout << "T=" << row.metrics.horizon << " accuracy " << eval::percent2(row.metrics.accuracy) << "%\n";
  return 0;
}
