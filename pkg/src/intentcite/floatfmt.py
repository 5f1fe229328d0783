"""Fixed float formatting so emitted files are byte-stable across runs."""


def fmt_float(x: float) -> str:
    """Render a float with 17 significant digits (round-trip exact)."""
    return format(float(x), ".17g")
