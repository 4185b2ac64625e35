"""End-to-end checks of the jackson executable: exit codes and report schema."""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

cli, source = sys.argv[1], Path(sys.argv[2])
nets = source / "networks"
schema = json.loads((source / "schema" / "report.schema.json").read_text())
failures = 0


def run(args, expect, out=None):
    global failures
    cmd = [cli, *args] + (["--out", str(out)] if out else [])
    proc = subprocess.run(cmd, capture_output=True, text=True)
    ok = proc.returncode == expect
    if ok and out is not None and out.exists():
        try:
            jsonschema.validate(json.loads(out.read_text()), schema)
        except jsonschema.ValidationError as e:
            ok = False
            print(e.message)
    print(f"{'ok  ' if ok else 'FAIL'} exit {proc.returncode} (want {expect}): {' '.join(args)}")
    if not ok:
        print(proc.stdout, proc.stderr)
        failures += 1
    return proc


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    for name in ["net_a", "net_b", "net_c", "net_d"]:
        run(["analyze", str(nets / f"{name}.json")], 0, tmp / f"{name}.json")
    run(["analyze", str(nets / "net_e.json")], 2, tmp / "e.json")
    run(["lyapunov", str(nets / "net_a.json"), "--gamma", "2,1", "--theta", "0.1", "--box", "40"], 0, tmp / "l1.json")
    run(["lyapunov", str(nets / "net_a.json"), "--gamma", "1,2"], 2, tmp / "l2.json")
    run(["lyapunov", str(nets / "net_a.json"), "--rho", "1,2", "--eps", "1", "--theta", "0.1"], 0, tmp / "l3.json")
    run(["lyapunov", str(nets / "net_a.json"), "--gamma", "2,1", "--theta", "0.9"], 2)
    run(["simulate", str(nets / "net_a.json"), "--horizon", "1e3", "--seed", "7"], 0, tmp / "s1.json")
    run(["simulate", str(nets / "net_a.json"), "--mode", "tail", "--gamma", "2,1", "--theta", "0.1",
         "--t", "1,2,5,10", "--reps", "1e3"], 0, tmp / "s2.json")
    run(["simulate", str(nets / "net_e.json")], 2)
    run(["lyapunov", str(nets / "net_e.json"), "--gamma", "1,1"], 0, tmp / "l4.json")
    run(["lyapunov", str(nets / "net_e.json"), "--gamma", "1,1", "--theta", "0.1"], 2)
    run(["reverse", str(nets / "net_a.json")], 0)
    run(["reverse", str(nets / "net_e.json")], 2)
    run(["--help"], 0)
    run(["analyze"], 1)
    run(["analyze", str(tmp / "does_not_exist.json")], 1)
    bad = tmp / "bad.json"
    bad.write_text('{"lambda": [1], "P": [[0]]}')
    proc = run(["analyze", str(bad)], 1)
    if "missing key \"mu\"" not in proc.stderr + proc.stdout:
        print("FAIL missing-key message")
        failures += 1
    a = run(["analyze", str(nets / "net_a.json")], 0, tmp / "a1.json")
    b = run(["analyze", str(nets / "net_a.json")], 0, tmp / "a2.json")
    if a.stdout != b.stdout or (tmp / "a1.json").read_bytes() != (tmp / "a2.json").read_bytes():
        print("FAIL repeated runs differ")
        failures += 1

sys.exit(1 if failures else 0)
