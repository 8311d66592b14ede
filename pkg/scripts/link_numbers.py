"""Print the headline propagation, resonance and link-scaling numbers."""

import numpy as np

from melink.antenna import REFERENCE_LAMINATE, resonance_frequency
from melink.link_budget import radiation_resistance_ratio_air_to, radiation_resistance_ratio_between, total_link_budget
from melink.medium import FRESHWATER, SALTWATER, attenuation_db_per_m, field_regions, wavelength


def main():
    band = np.array([31e3, 36e3, 41e3])
    for m in (FRESHWATER, SALTWATER):
        print(f"{m.label}: sigma = {m.conductivity} S/m")
        for f, lam, a in zip(band, wavelength(m, band), attenuation_db_per_m(m, band)):
            print(f"  {f / 1e3:.0f} kHz  wavelength {lam:9.3f} m  attenuation {a:7.3f} dB/m")
        r = field_regions(m, 36e3)
        print(f"  regions at 36 kHz: {r.reactive_near_limit:.3f} / {r.radiative_near_limit:.3f} / "
              f"{r.transition_limit:.3f} m")

    print(f"laminate resonance: {resonance_frequency(REFERENCE_LAMINATE):.1f} Hz")
    ratio = radiation_resistance_ratio_air_to(FRESHWATER, 36e3)
    print(f"R_rad ratio air -> freshwater at 36 kHz: {ratio:.1f}")
    print(f"R_rad ratio freshwater -> saltwater: {radiation_resistance_ratio_between(FRESHWATER, SALTWATER, 36e3):.1f}")
    for r in (267.0, ratio):
        s = total_link_budget(r, 15, 15)
        print(f"15 x 15 link with ratio {r:.1f}: factor {s.total_link_factor:.6g}, "
              f"{s.total_link_db:.2f} dB (field), {s.total_link_db_power:.2f} dB (power)")


if __name__ == "__main__":
    main()
