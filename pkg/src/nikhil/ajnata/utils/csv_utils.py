import csv
from pathlib import Path
from typing import Any, Iterable, Sequence


def format_cell(value: Any) -> str:
    """Shortest round-trip repr for floats, str() for everything else."""
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


class CsvUtils:

    @staticmethod
    def write_rows(file_path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        """Writes a comma-separated UTF-8 file with LF line endings."""
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, 'w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_cell(v) for v in row])
        return file_path

    @staticmethod
    def read_rows(file_path: Path) -> list:
        with open(file_path, 'r', encoding='utf-8', newline='') as f:
            return list(csv.DictReader(f))
