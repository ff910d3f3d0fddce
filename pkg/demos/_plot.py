"""Optional matplotlib output shared by the demo scripts."""

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:  # the demos still print their numbers
    plt = None


def save(fig, name):
    if fig is None:
        return
    fig.tight_layout()
    fig.savefig(name, dpi=130)
    print(f"saved {name}")


def figure(*args, **kw):
    return None if plt is None else plt.subplots(*args, **kw)
