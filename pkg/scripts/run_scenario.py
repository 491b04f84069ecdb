"""
End-to-end scenario for the ERBM toolkit.
Runs every command on the bundled domains through the CLI entry point.
"""

import os
import sys
import tempfile
from pathlib import Path

# Add the repository root to the path to import modules
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

# Force UTF-8 for Windows consoles
if sys.platform == "win32":
    sys.stdout.reconfigure(encoding="utf-8")
    sys.stderr.reconfigure(encoding="utf-8")

try:
    from src.modules.cli.service import run
    from src.modules.cli.validation import BUNDLED_DIR
except ImportError as e:
    print(f"Error importing modules: {e}")
    sys.exit(1)

PATHS = "2000"

SCENARIO = [
    ("Poisson kernel on the disk", ["pk", "--domain", "disk.dom", "--z", "0.5,0"]),
    ("ER Poisson kernel, two holes", ["er-pk", "--domain", "two_holes.dom", "--w", "1.5708", "--z", "0,-0.5"]),
    ("Green's function on the annulus", ["green", "--domain", "annulus.dom", "--z", "0,0.5"]),
    ("ER Green's function of hole 1", ["er-green", "--domain", "two_holes.dom", "--hole", "1"]),
    ("Boundary chain", ["chain", "--domain", "two_holes.dom"]),
    ("Chordal slit map", ["map-chordal", "--domain", "two_holes.dom", "--w", "1.5708"]),
    ("Bilateral slit map", ["map-bilateral", "--domain", "two_holes.dom", "--hole", "1"]),
    ("Radial slit map", ["map-radial", "--domain", "two_holes.dom", "--z", "0,0.5"]),
    ("Level curve", ["trace", "--domain", "two_holes.dom", "--z", "0,0.5", "--level", "0.3"]),
    ("Monte Carlo sampling", ["sample", "--domain", "two_holes.dom", "--hole", "1", "--paths", PATHS]),
]


def print_section(title):
    print(f"\n{'='*50}\n{title}\n{'='*50}")


def run_scenario(output: Path) -> int:
    print_section("ERBM toolkit end-to-end scenario")
    print(f"Bundled domains: {BUNDLED_DIR}")
    print(f"Output: {output}")

    failures = []
    for index, (title, argv) in enumerate(SCENARIO, start=1):
        print_section(f"{index}. {title}")
        argv = [argv[0], "--domain", str(BUNDLED_DIR / argv[2])] + argv[3:] + ["--output", str(output)]
        code = run(argv)
        status = "✅ OK" if code == 0 else f"❌ exit {code}"
        print(status)
        if code != 0:
            failures.append((title, code))

    print_section(f"{len(SCENARIO) + 1}. Validation on every bundled domain")
    code = run(["validate", "--paths", PATHS, "--output", str(output)])
    if code != 0:
        failures.append(("validate", code))

    print_section("Summary")
    if failures:
        for title, code in failures:
            print(f"❌ {title}: exit {code}")
        return 1
    print("✅ Every step finished with exit code 0.")
    return 0


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="erbm-scenario-"))
    sys.exit(run_scenario(target))
