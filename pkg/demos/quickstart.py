"""Evaluate a few prepotentials and run the four checks on each."""

import numpy as np

from wdvv_lab import prepotential_zoo as zoo
from wdvv_lab import wdvv_verifier as wv

rng = np.random.default_rng(0)

for fid in ["G0_Phi0(2)", "G1_Holo(1)", "G1_3D_Phi1", "G1_3D_Phi3", "G1_3D_Phi3(printed)"]:
    t, seed = zoo.sample_point(fid, rng)
    value = zoo.eval_prepotential(fid, t, seed)
    res = wv.run_checks(fid, t, tau_seed=seed)
    cells = "  ".join(f"{k}={v:.1e}" for k, v in res.residuals().items() if v is not None)
    print(f"{fid:22s} F={value:.6g}  {cells}  {'ok' if res.ok else 'FAILS'}")
