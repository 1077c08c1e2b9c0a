"""The command-line workflow: write a synthetic dataset, then benchmark methods on it.

The same steps from a shell:

    wlsh-krr synth --d 4 --cov matern52 --n 2000 --train 1600 --noise 0.1 --out task.csv
    wlsh-krr bench --data task.csv --has-header --method wlsh --m 100 --seeds 0-2
"""

import io
import tempfile
from pathlib import Path

from wlsh_krr.bench import parse_report
from wlsh_krr.cli import main

with tempfile.TemporaryDirectory() as tmp:
    csv = Path(tmp) / "task.csv"
    main(["synth", "--d", "4", "--cov", "matern52", "--n", "2000", "--train", "1600", "--noise", "0.1",
          "--out", str(csv)])
    for method, extra in [("exact:laplace", []), ("wlsh", ["--m", "100"]), ("rff", ["--rff-features", "300"])]:
        out = io.StringIO()
        main(["bench", "--data", str(csv), "--has-header", "--method", method, "--seeds", "0-2", *extra], out=out)
        agg = parse_report(out.getvalue())[-1]
        print(f"{agg['method']:22s} rmse {agg['rmse_mean']} +- {agg['rmse_sd']}  fit {agg['fit_time_mean']}s")
    print("\nfull report of the last run:\n" + out.getvalue())
