"""
Solver diagnostic for the boundary integral discretization.
Reports condition numbers and period-matrix health across node counts.
"""

import os
import sys

# Force UTF-8 for Windows consoles
if sys.platform == "win32":
    sys.stdout.reconfigure(encoding="utf-8")
    sys.stderr.reconfigure(encoding="utf-8")

# Add the repository root to the path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

try:
    from src.core.errors import ErbmError
    from src.modules.bm_kernels import service as bm
    from src.modules.cli.validation import BUNDLED, BUNDLED_DIR
    from src.modules.erbm import service as erbm
    from src.modules.geometry import service as geometry
except ImportError:
    print("❌ Could not import the toolkit.")
    sys.exit(1)

NODE_COUNTS = (64, 128, 256, 512)


def check_domain(name, nodes):
    print(f"{name:<10} N={nodes:<4}", end=" ")
    try:
        domain, _ = geometry.load_domain(BUNDLED_DIR / f"{name}.dom", nodes)
        condition = bm.condition_number(domain)
        line = f"cond={condition:.3e}"
        if domain.n:
            pm = erbm.period_matrix(domain)
            line += f"  asym={pm.asymmetry:.1e}  max_eig={pm.eigenvalues.max():.4f}"
        print(f"✅ {line}")
        return True
    except ErbmError as e:
        print(f"❌ {e.code}: {str(e)[:100]}")
        return False


def main():
    print("Boundary integral solver diagnostic")
    print(f"Domains: {', '.join(BUNDLED)}")
    print(f"Node counts: {', '.join(str(n) for n in NODE_COUNTS)}\n")

    results = [check_domain(name, nodes) for name in BUNDLED for nodes in NODE_COUNTS]

    print(f"\n{sum(results)}/{len(results)} configurations healthy.")
    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
