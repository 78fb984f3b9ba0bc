"""The file-level workflow: gen -> reduce -> solve -> verify.

Drives the command-line entry point programmatically on a temporary
directory, the same way a shell session would:

    permcsp gen sat --num-vars 4 --num-clauses 3 --out f.cnf
    permcsp reduce grid.grid --steps clique2perm6 --out-dir out/
    permcsp solve out/step1-clique2perm6.pcsp --source grid.grid
    permcsp verify out/step1-clique2perm6.pcsp grid.grid

Run:  python3 demos/certificate_workflow.py
"""

import os
import tempfile

from permcsp import cli


def run(argv):
    print("$ permcsp " + " ".join(argv))
    code = cli.main(argv)
    print("(exit %d)\n" % code)
    return code


def main():
    with tempfile.TemporaryDirectory() as tmp:
        cnf = os.path.join(tmp, "formula.cnf")
        run(["gen", "sat", "--num-vars", "4", "--num-clauses", "3",
             "--freq", "3", "--seed", "5", "--out", cnf])
        run(["solve", cnf])

        grid = os.path.join(tmp, "grid.grid")
        with open(grid, "w") as fh:
            fh.write("p grid 2\nc kind clique\ne 1 1 2 2\n")
        out = os.path.join(tmp, "artifacts")
        run(["reduce", grid, "--steps", "clique2perm6", "--out-dir", out])

        cert = os.path.join(out, "step1-clique2perm6.pcsp")
        run(["solve", cert, "--source", grid])
        run(["verify", cert, grid])

        # Tamper with the target and watch verify catch it (exit 1).
        with open(cert) as fh:
            text = fh.read()
        with open(cert, "w") as fh:
            fh.write(text.replace("c target 48", "c target 49"))
        run(["verify", cert, grid])


if __name__ == "__main__":
    main()
