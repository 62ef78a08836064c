#!/usr/bin/env python3
"""Frequency-scale study over all open convention combinations.

The contact-mode map's absolute scale depends on three choices that a
measurement description can leave open: the exchange prefactor (Rydberg
vs Hartree), the sample spin magnitude (1/2 vs 1), and which frequency
the map reports (upper branch f_plus, the f_plus - f_minus pair
splitting, or the m=+1 <-> m=-1 level splitting 2(f_plus - D/h)).

This script rasters the 5x5 ferromagnet at 4 A under every combination
and prints the resulting signal ranges in THz, making the scale
ambiguity explicit.  Two observations worth knowing before comparing
against any published color bar:

- The pair splitting f_plus - f_minus saturates at 2D/h (about 7 GHz)
  as soon as the exchange field dwarfs the zero-field splitting, so it
  can never reach THz scales in the contact regime.
- The m=+1 <-> m=-1 level splitting under the Hartree prefactor with
  spin magnitude 1 spans roughly 0.69 to 1.08 THz over this window.

Usage: python3 scripts/convention_study.py
"""

from spinscan import CONSTANTS, ScanConfig, apply_pattern, build_lattice, scan_constant_height

F0 = 14.4 / CONSTANTS.h_planck


def main():
    lat = build_lattice("square", 3.0, 5, 5)
    textures = {
        "1/2": apply_pattern(lat, "FM", (0, 0, 1), spin_mag=0.5, g=2.0),
        "1": apply_pattern(lat, "FM", (0, 0, 1), spin_mag=1.0, g=2.0),
    }
    header = f"{'prefactor':>9}  {'spin':>4}  {'signal':>16}  {'min THz':>9}  {'max THz':>9}"
    print(header)
    print("-" * len(header))
    for pref in ("rydberg", "hartree"):
        for smag, tex in textures.items():
            cfg = ScanConfig(height=4.0, x_range=(0.0, 12.0), y_range=(0.0, 12.0),
                             step=0.25, mode="exchange", exchange_prefactor=pref)
            rmap = scan_constant_height(cfg, tex, workers=4)
            signals = {
                "transition": rmap.signal("transition"),
                "splitting": rmap.signal("splitting"),
                "level-splitting": 2.0 * (rmap.f_plus - F0),
            }
            for name, s in signals.items():
                print(
                    f"{pref:>9}  {smag:>4}  {name:>16}  "
                    f"{s.min() / 1000:9.4f}  {s.max() / 1000:9.4f}"
                )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
