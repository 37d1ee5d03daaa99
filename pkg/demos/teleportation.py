"""Teleportation and entanglement swapping, checked two ways.

Each protocol is normalized by the rewrite engine and also contracted as a
tensor network. A misrouted correction is shown failing both checks.

    python demos/teleportation.py
"""
from __future__ import annotations

from importlib.resources import files

from wirelogic.io import model_from_json
from wirelogic.protocols import swapping_demo, teleportation_demo

DATA = files("wirelogic") / "data"


def main() -> None:
    for model_file, gates in (("qubit_model.json", "I X H S"), ("qutrit_model.json", "I X Z F")):
        model = model_from_json(DATA / model_file)
        print(f"== {model.name} ==")
        for f in gates.split():
            for demo in (teleportation_demo, swapping_demo):
                print(demo(model, f).text())
        print()

    qubit = model_from_json(DATA / "qubit_model.json")
    print("== misrouted correction (should fail) ==")
    print(swapping_demo(qubit, "H", misroute=True).text())


if __name__ == "__main__":
    main()
