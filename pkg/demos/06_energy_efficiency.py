"""Energy efficiency across the operating-point sweep (the CLI's
`mphp sweep-snr`): the partially-connected scheme spends one phase shifter
per antenna, the fully-connected baselines one per antenna-chain pair.
"""

from dataclasses import replace

from mphp import SchemeId, SystemConfig, run_experiment, write_csv

config = replace(
    SystemConfig(n_slots=200, seed=33, schemes=(SchemeId.MPHP, SchemeId.FRPS_STATISTICAL, SchemeId.ADAPTIVE_INSTANT)),
    sweep_parameter="snr_db",
    sweep_values=(-10.0, -5.0, 0.0, 5.0, 10.0),
)
rows = run_experiment(config)
write_csv(rows, "energy_efficiency.csv")
print("wrote energy_efficiency.csv")

print(f"\n{'SNR dB':>7} {'scheme':<18} {'sum rate':>9} {'EE':>8}")
for row in rows:
    print(f"{row.sweep_value:>7.0f} {row.scheme.value:<18} {row.sum_rate:>9.3f} {row.energy_efficiency:>8.3f}")
print("\nShifter counts behind the EE denominators: M = 64 for the partially-")
print("connected schemes, M * L = 512 for the fully-connected ones; the gap")
print("narrows as the transmit power term starts to dominate at high SNR.")
