import os

ENV_VAR = "RIDGEPATH_THREADS"


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit argument, else ``RIDGEPATH_THREADS``; 0 means auto."""
    if threads is None:
        raw = os.environ.get(ENV_VAR, "0").strip() or "0"
        try:
            threads = int(raw)
        except ValueError:
            raise ValueError(f"{ENV_VAR} must be an integer, got {raw!r}") from None
    if threads < 0:
        raise ValueError("thread count must be >= 0")
    if threads == 0:
        threads = os.cpu_count() or 1
    return threads
