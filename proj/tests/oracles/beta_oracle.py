# Copyright 2026 The nmcollide Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates beta_table.hpp: beta_1, beta_2 by 40-digit Talbot inversion of
their Laplace transforms (mpmath), independent of the C++ closed forms."""

import mpmath as mp

mp.mp.dps = 40


def c1(u):
    return u / (u * u + 1)


def c2(u):
    return (u * u + 2) / (u * (u * u + 4))


def beta(c, tau, g):
    return mp.invertlaplace(lambda s: c(s + g) / (1 - g * c(s + g)), tau, method="talbot")


def main():
    rows = []
    for g in (0.5, 1, 2, 5):
        for tau in (0.5, 1, 3, 7.5):
            rows.append((g, tau, beta(c1, tau, g), beta(c2, tau, g)))
    print("inline constexpr BetaOracle kBetaTable[] = {")
    for g, tau, b1, b2 in rows:
        print(f"    {{{g}, {tau}, {mp.nstr(b1, 20)}, {mp.nstr(b2, 20)}}},")
    print("};")


if __name__ == "__main__":
    main()
