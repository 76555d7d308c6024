"""A config-driven sweep, as the command line runs it.

Equivalent to:  zygmund verify configs/acceptance.cfg --out out/
This script runs a trimmed copy so it finishes in a few seconds.

Run:  python3 demos/05_sweep.py [output-dir]
"""

import sys
from pathlib import Path

from zygmund.experiment import emit_outputs, parse_config, summary_table, verify

CONFIG = """
tol = 0.001
n_start = 8
n_factor = 2
n_count = 8

[spec]
name = r09_p2
family = power:r=0.9
p = 2
beta = 0.5
s = 1

[spec]
name = r15_p1_sin
family = power:r=1.5
p = 1
beta = 1
s = 1

[spec]
name = half_p2
family = power:r=0.5
p = 2
beta = 0
"""

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo-out")
ok, reports = verify(parse_config(CONFIG, "demo"))
print(summary_table(reports))
files = emit_outputs(reports, out / "csv", out / "plot")
print(f"\n{len(files)} files under {out}/; verification {'passed' if ok else 'failed'}")
print((out / "csv" / "r09_p2.csv").read_text())
