"""Quick end-to-end check of the Python bindings.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`.
"""

import cmath
import math
import tempfile
from pathlib import Path

import mdofdm_py as m


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


qpsk = m.QamConstellation(4)
bits = [0, 0, 0, 1, 1, 0, 1, 1]
symbols = qpsk.modulate(bits)
assert close(symbols[0], complex(1, 1) / math.sqrt(2))
assert qpsk.demodulate(symbols) == bits

x = m.RandomStream(7).complex_gaussian(64)
y = m.unitary_dft(m.unitary_idft(x))
assert max(abs(a - b) for a, b in zip(x, y)) < 1e-12

r = [[4, 1 + 1j], [1 - 1j, 3]]
l = m.cholesky_lower(r)
assert close(l[0][0], 2) and close(l[0][1], 0)

stream = m.RandomStream(1, [2])
h = m.generate_channel(4, 1, 16, stream)
assert len(h) == 16 and len(h[0]) == 1 and len(h[0][0]) == 4
sel = [m.select_antenna(hk) for hk in h]
assert all(0 <= s < 4 for s in sel)
grid = m.md_build_tx(qpsk.modulate([0, 1] * 16), sel, 4)
assert all(sum(abs(grid[a][k]) > 0 for a in range(4)) == 1 for k in range(16))

h4 = m.generate_channel(4, 4, 1, stream)[0]
s = [1 + 0j, -1j, 1j, -1 + 0j]
rx = [sum(h4[i][j] * s[j] for j in range(4)) for i in range(4)]
assert max(abs(a - b) for a, b in zip(m.mmse_equalize(h4, rx, 1e-12), s)) < 1e-6
assert m.md_equalize(2j, 4j) == 2

ones = m.synthesize_waveform([[1] * 64], 4)[0]
linear, db = m.compute_papr(ones)
assert close(linear, 64) and abs(db - 18.062) < 1e-3
tone = m.synthesize_waveform([[cmath.exp(0.3j)] + [0] * 63], 4)[0]
assert close(m.compute_papr(tone)[1], 0)
assert m.estimate_ccdf([1.0, 2.0, 3.0], [0.0, 2.0]) == [1.0, 1 / 3]

assert m.total_power("mmse", 4, 4, 64) == 864.0
assert m.total_power("md", 4, 1, 64) == 404.0
assert close(m.q_function(0), 0.5)

siso = m.run_ber_point("md", 10.0, 4000, seed=3, n_tx=1)
oracle = m.analytic_rayleigh_qpsk_ber(10.0)
sigma = math.sqrt(oracle * (1 - oracle) / siso["bits_sent"])
assert abs(siso["ber"] - oracle) < 4 * sigma, (siso, oracle)

cfg = m.SimConfig.from_toml('n_sc = 16\nsnr_grid_db = "0:10:20"\n')
cfg.n_symbols_per_point = 64
cfg.papr_n_symbols = 1000
ber = m.run_ber_sweep(cfg, workers=2)
assert ber == m.run_ber_sweep(cfg, workers=1)
ee = m.run_ee_sweep(cfg)
assert {r["scheme"] for r in ee} == {"mmse", "md"}
papr = m.run_papr(cfg)
assert set(papr) == {"mmse", "md"}

with tempfile.TemporaryDirectory() as d:
    written = dict(m.run_all(cfg, d))
    assert set(written) == {"ber.csv", "ee.csv", "papr_ccdf.csv"}
    assert (Path(d) / "manifest.toml").exists()

try:
    m.SimConfig.from_toml("n_rx = 2\n").validate()
except ValueError as e:
    assert "n_rx" in str(e)
else:
    raise AssertionError("expected ValueError")

print("smoke test passed")
