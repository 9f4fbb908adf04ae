// Copyright 2026 The cpspdc Authors
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

// Purity of the counter-propagating device against a co-propagating
// first-order device poled for the same degenerate pump.

#include <cstdio>

#include "cpspdc.hpp"

int main() {
    using namespace cpspdc;
    PumpSpec pump;  // 774 nm, 1.1 nm FWHM
    DeviceSpec counter = bundled_device();
    DeviceSpec co = counter;
    co.geometry = Geometry::CoPropagating;
    co.qpm_order = 1;
    co.poling_period_um = poling_period_for_degeneracy(co, 775.0);

    auto pc = purity(schmidt_decompose(build_jsa(counter, pump, {1536, 1556}, {1548, 1552}, 256)));
    auto pco = purity(schmidt_decompose(build_jsa(co, pump, {1528, 1568}, {1528, 1568}, 256)));
    std::printf("geometry=counter period_um=%.4f purity=%.4f schmidt_number=%.3f\n", counter.poling_period_um, pc, 1.0 / pc);
    std::printf("geometry=co period_um=%.4f purity=%.4f schmidt_number=%.3f\n", co.poling_period_um, pco, 1.0 / pco);
    return 0;
}
