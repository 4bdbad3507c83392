"""
The flsmodel command
====================

The same pipeline from a shell: ingest frames, compile, validate, query.
Here the commands are driven through ``main`` so the script is self-contained.
"""

import shutil
import tempfile
from pathlib import Path

from flsmodel.cli import main

data = Path(__file__).resolve().parent.parent / "tests" / "data"
work = Path(tempfile.mkdtemp())
for name in ("petal.frames", "petal_tip.frames", "petal_vein.frames"):
    shutil.copy(data / name, work / name)
model = str(work / "petal.flsm")


def run(*argv):
    print("$ flsmodel", " ".join(argv))
    code = main(list(argv))
    print("exit", code)
    return code


run("ingest", "frames", str(work / "petal.frames"), "--model", model, "--object", "petal")
run("ingest", "frames", str(work / "petal_tip.frames"), "--model", model,
    "--object", "tip", "--part-of", "obj:1")
run("validate", model)
run("compile", model, "--fps", "24", "--nu", "1", "--beta", "4", "--omega", "1",
    "--force", "0.5", "-o", str(work / "petal.flsp"))
run("validate", model)
run("query", model, "parts-of obj:1")
run("inspect", str(work / "petal.flsp"))
