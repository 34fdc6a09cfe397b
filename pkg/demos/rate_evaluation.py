"""Score one candidate solution: per-user SINRs, beam masks, phase tuning."""

import numpy as np

from beamswarm import make_config, realize_channels, derive_stream
from beamswarm.channel import cascaded_spatial, to_beamspace
from beamswarm.linkrate import sum_rate
from beamswarm.pso import top_beam_indices

cfg = make_config(rng_seed=3)
channels = realize_channels(cfg, derive_stream(cfg.rng_seed, 0))
rng = derive_stream(cfg.rng_seed, 1)

n, k = cfg.n_antennas, cfg.n_users
powers = np.full(k, cfg.total_power / k)  # equal split

phases = 2.0 * np.pi * rng.random(cfg.total_uc)
h_beam = to_beamspace(cascaded_spatial(channels, phases), channels.dft_matrix)

# pick the strongest beams for this realization instead of a fixed set
beam_energy = (np.abs(h_beam) ** 2).sum(axis=1)
selected = top_beam_indices(beam_energy, cfg.n_selected_beams)
report = sum_rate(h_beam, selected, powers, cfg.noise_variance)

print(f"selected beams: {selected.tolist()}")
print("per-user SINR (dB) and rate (bit/s/Hz):")
for i, (s, r) in enumerate(zip(report.per_ue_sinr, report.per_ue_rate)):
    print(f"  user {i}: {10*np.log10(s):6.1f} dB   {r:6.3f}")
print(f"sum rate: {report.sum_rate:.3f} bit/s/Hz")

# full selection makes the beamspace and spatial descriptions interchangeable
h_bar = cascaded_spatial(channels, phases)
full = np.arange(n)
spatial = sum_rate(h_bar, full, powers, cfg.noise_variance).sum_rate
beamspace = sum_rate(h_beam, full, powers, cfg.noise_variance).sum_rate
print(f"\nfull-selection check: spatial {spatial:.9f} vs "
      f"beamspace {beamspace:.9f} bit/s/Hz")

# even naive phase tuning (best of 200 random draws) moves the sum rate
best = report.sum_rate
for _ in range(200):
    trial = 2.0 * np.pi * rng.random(cfg.total_uc)
    h_try = to_beamspace(cascaded_spatial(channels, trial), channels.dft_matrix)
    sel = top_beam_indices((np.abs(h_try) ** 2).sum(axis=1), cfg.n_selected_beams)
    best = max(best, sum_rate(h_try, sel, powers, cfg.noise_variance).sum_rate)
print(f"best of 200 random phase profiles: {best:.3f} bit/s/Hz "
      "(the swarm does far better; see swarm_convergence.py)")
