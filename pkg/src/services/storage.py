"""
Switching Options - Document Storage
====================================
Async JSON and CSV I/O for problem instances and command output:
- JSON decode/encode offloaded to the default executor
- files written with aiofiles; no path means stdout
"""

import asyncio
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import aiofiles

from src.utils.errors import InvalidProblem
from src.utils.helpers import format_number

logger = logging.getLogger(__name__)


class _Encoder(json.JSONEncoder):
    """numpy scalars and enums as plain JSON values"""

    def default(self, o):
        if hasattr(o, "item"):
            return o.item()
        if hasattr(o, "value"):
            return o.value
        return super().default(o)


def dumps(doc: Any) -> str:
    """JSON text; floats use the shortest repr that reads back to the same double"""
    return json.dumps(doc, indent=2, cls=_Encoder, allow_nan=False)


async def read_json(path: str) -> Any:
    """Read a JSON document asynchronously; unreadable or malformed input raises InvalidProblem"""
    try:
        async with aiofiles.open(Path(path), "r", encoding="utf-8") as f:
            content = await f.read()
    except OSError as e:
        raise InvalidProblem(f"cannot read {path}: {e}") from e
    loop = asyncio.get_running_loop()
    try:
        doc = await loop.run_in_executor(None, json.loads, content)
    except json.JSONDecodeError as e:
        raise InvalidProblem(f"{path} is not valid JSON: {e}") from e
    logger.debug(f"[IO] Read {path}")
    return doc


async def _write_text(path: Optional[str], text: str):
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    async with aiofiles.open(Path(path), "w", encoding="utf-8", newline="") as f:
        await f.write(text)
    logger.info(f"[IO] Wrote {path}")


async def write_json(path: Optional[str], doc: Any):
    loop = asyncio.get_running_loop()
    text = await loop.run_in_executor(None, dumps, doc)
    await _write_text(path, text + "\n")


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(v) if isinstance(v, float) else v for v in row])
    return buffer.getvalue()


async def write_csv(path: Optional[str], header: Sequence[str], rows: Iterable[Sequence[Any]]):
    await _write_text(path, csv_text(header, rows))

