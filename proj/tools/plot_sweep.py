# Copyright 2026 The L2P Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Plots mean regret against epsilon from the sweep.csv written by `l2p sweep`.

Usage: python3 tools/plot_sweep.py out/sweep.csv regret.png
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv")
    parser.add_argument("png")
    args = parser.parse_args()

    df = pd.read_csv(args.csv).sort_values("epsilon")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.errorbar(df["epsilon"], df["mean_regret"], yerr=df["stddev_regret"],
                marker="o", capsize=3, label="measured")
    ax.plot(df["epsilon"], df["theory"], linestyle="--", label="reference curve")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("epsilon")
    ax.set_ylabel("mean regret")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.png, dpi=150)


if __name__ == "__main__":
    main()
