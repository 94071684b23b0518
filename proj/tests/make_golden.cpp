// Copyright 2026 The wlc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Regenerates tests/data/golden.wllc and tests/data/golden_latent.i8.
// Only needed when the container version changes.

#include <cstdio>
#include <string>

#include "fuzz.hpp"

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : WLC_TEST_DATA_DIR;
  wlc::Container c;
  c.header.kind = wlc::Kind::k2D;
  c.header.levels = 3;
  c.header.channels = 3;
  c.header.original = {30, 27};
  c.header.padded = {32, 32};
  for (int k = 0; k < 12; ++k) c.header.sigma.push_back(0.25f * static_cast<float>(k + 1));
  c.latent = wlc::Tensor<std::int8_t>(c.header.latent_shape());
  wlc::Rng rng(2026);
  for (std::size_t k = 0; k < 12; ++k) wlc::fuzz::fill_channel(c.latent.data() + k * 16, 16, rng);
  const wlc::Bytes raw(reinterpret_cast<const std::uint8_t*>(c.latent.data()),
                       reinterpret_cast<const std::uint8_t*>(c.latent.data()) + c.latent.size());
  wlc::write_file(dir + "/golden.wllc", wlc::write_container(c));
  wlc::write_file(dir + "/golden_latent.i8", raw);
  std::printf("wrote %s/golden.wllc\n", dir.c_str());
}
