import json
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, Tuple, Union

from nikhil.ajnata.domain.exceptions import StreamFormatError


class JsonUtils:

    @staticmethod
    def dumps_record(record: Dict[str, Any]) -> str:
        """One compact JSON line. Floats use Python's shortest round-trip repr."""
        return json.dumps(record, separators=(',', ':'), ensure_ascii=False, allow_nan=True)

    @staticmethod
    def save_json_to_file(data: Union[Dict, list], file_path: Path) -> Path:
        """Saves a dictionary or list to a pretty-printed JSON file."""
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, 'w', encoding='utf-8', newline='\n') as f:
            json.dump(data, f, indent=2, ensure_ascii=False)
            f.write('\n')
        return file_path

    @staticmethod
    def load_json_from_file(file_path: Path) -> Any:
        """Loads and parses a JSON file."""
        try:
            with open(file_path, 'r', encoding='utf-8') as f:
                return json.load(f)
        except json.JSONDecodeError as e:
            raise StreamFormatError(f"invalid JSON ({e.msg})", str(file_path), e.lineno)

    @staticmethod
    def save_jsonl(records: Iterable[Dict[str, Any]], file_path: Path) -> Path:
        """Writes one JSON record per line."""
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, 'w', encoding='utf-8', newline='\n') as f:
            for record in records:
                f.write(JsonUtils.dumps_record(record))
                f.write('\n')
        return file_path

    @staticmethod
    def iter_jsonl(file_path: Path) -> Iterator[Tuple[int, Dict[str, Any]]]:
        """Yields (line_number, record) for every non-blank line."""
        with open(file_path, 'r', encoding='utf-8') as f:
            for line_number, line in enumerate(f, 1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as e:
                    raise StreamFormatError(f"invalid JSON ({e.msg})", str(file_path), line_number)
                if not isinstance(record, dict):
                    raise StreamFormatError("record must be a JSON object", str(file_path), line_number)
                yield line_number, record
