from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, List, Optional, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def format_percentage(value: float, decimals: int = 2) -> str:
    """
    Format float as percentage string.

    Args:
        value: Float value (0 to 1)
        decimals: Number of decimal places

    Returns:
        Formatted percentage string

    Example:
        format_percentage(0.0921) -> "9.21%"
    """
    return f"{value * 100:.{decimals}f}%"


def utc_timestamp(moment: Optional[datetime] = None) -> str:
    """
    Sortable UTC timestamp used in saved classifier and log file names.

    Example:
        utc_timestamp(datetime(2024, 3, 1, 9, 5, 7, tzinfo=timezone.utc)) -> "20240301T090507Z"
    """
    moment = moment or datetime.now(timezone.utc)
    return moment.astimezone(timezone.utc).strftime("%Y%m%dT%H%M%SZ")


def unique_path(directory: Path, stem: str, suffix: str) -> Path:
    """
    Return directory/stem+suffix, adding "-1", "-2", ... if the name is taken.
    """
    directory.mkdir(parents=True, exist_ok=True)
    candidate = directory / f"{stem}{suffix}"
    counter = 1
    while candidate.exists():
        candidate = directory / f"{stem}-{counter}{suffix}"
        counter += 1
    return candidate


def map_ordered(fn: Callable[[T], R], items: Sequence[T], workers: int) -> List[R]:
    """map() that may fan out to threads; results come back in input order."""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
