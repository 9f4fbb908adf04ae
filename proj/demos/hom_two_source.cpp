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

// Two nominally identical sources, the second with a fabrication offset that
// moves its degenerate pump up by 0.15 nm. The idler photons, which barely
// follow the pump, become distinguishable first.

#include <cstdio>

#include "cpspdc.hpp"

int main() {
    using namespace cpspdc;
    PumpSpec pump;
    DeviceSpec a = bundled_device();
    DeviceSpec b = a;
    b.index_offset = index_offset_for_degenerate_pump(b, find_degenerate_pump(a) + 0.15);

    WavelengthRange sig{1536, 1556}, idl{1547, 1553};
    auto fa = build_jsa(a, pump, sig, idl, 256);
    auto fb = build_jsa(b, pump, sig, idl, 256);
    std::vector<double> delays = UniformAxis::from_range(-40, 40, 161).values();
    for (Arm photon : {Arm::Signal, Arm::Idler}) {
        Arm herald = photon == Arm::Signal ? Arm::Idler : Arm::Signal;
        auto ra = heralded_density_matrix(fa, herald);
        auto rb = heralded_density_matrix(fb, herald);
        auto v = visibility(heralded_two_source_hom(ra, rb, delays));
        std::printf("pair=%s visibility=%.4f purity_a=%.4f purity_b=%.4f\n", to_string(photon).c_str(), v.value,
                    ra.purity(), rb.purity());
    }
    return 0;
}
