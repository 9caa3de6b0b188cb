// Copyright 2026 The rydstat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Stores a heralded single photon and a weak coherent pulse with the same
// multiphoton strength and prints g2 before and after the blockaded medium.

#include <cstdio>

#include "rydstat/rydstat.hpp"

int main() {
  using namespace rydstat;
  PipelineConfig cfg;
  cfg.blockade.n_max = 40;
  cfg.blockade.trials_per_fock = 20000;
  const Pipeline pipe(cfg);

  std::printf("%-6s %8s %10s %10s %10s %8s\n", "kind", "zeta", "param", "g2_in", "g2_out",
              "eta");
  for (double z : {0.01, 0.05, 0.2}) {
    for (InputKind kind : {InputKind::kDlcz, InputKind::kWcs}) {
      const SweepPoint pt = evaluate_at_zeta(pipe, kind, z);
      std::printf("%-6s %8.3f %10.5f %10.4f %10.4f %8.4f\n", to_string(kind).c_str(), z,
                  pt.param, pt.g2_in, pt.g2_out, pt.eta);
    }
  }
  return 0;
}
