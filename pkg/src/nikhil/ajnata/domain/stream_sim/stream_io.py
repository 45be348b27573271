"""
Line-delimited record files for proposal streams

One JSON record per proposal:
    {"video_id", "frame_index", "proposal_index", "track_id", "box",
     "objectness", "truth", "label", "feature"}
Floats are written with the shortest repr that round-trips exactly.
"""

from pathlib import Path
from typing import Any, Dict, Iterator, List, Sequence

from nikhil.ajnata.domain.exceptions import StreamFormatError
from nikhil.ajnata.domain.stream_sim.generator import FrameProposals, ObjectProposal, Truth, Video
from nikhil.ajnata.utils.json_utils import JsonUtils

_REQUIRED = ("video_id", "frame_index", "box", "objectness", "truth", "feature")


def _records(videos: Sequence[Video]) -> Iterator[Dict[str, Any]]:
    for video in videos:
        for frame in video.frames:
            for index, proposal in enumerate(frame.proposals):
                yield {
                    "video_id": video.video_id,
                    "frame_index": frame.frame_index,
                    "proposal_index": index,
                    "track_id": proposal.track_id,
                    "box": list(proposal.box),
                    "objectness": float(proposal.objectness),
                    "truth": "ID" if proposal.truth.is_id else "OOD",
                    "label": proposal.truth.label,
                    "feature": proposal.feature.tolist(),
                }


def dump_stream(videos: Sequence[Video], file_path: Path) -> Path:
    """Write every proposal of every video, in stream order"""
    return JsonUtils.save_jsonl(_records(videos), Path(file_path))


def load_stream(file_path: Path) -> List[Video]:
    """
    Read a stream written by dump_stream

    Records are grouped by video_id then frame_index in file order. Frames
    with no proposals are not representable and do not reappear.

    Raises:
        StreamFormatError: missing fields, bad truth tags, invalid proposals,
            or frame indices that do not increase within a video
    """
    file_path = Path(file_path)
    videos: Dict[int, Dict[int, List[ObjectProposal]]] = {}
    for line_number, record in JsonUtils.iter_jsonl(file_path):
        missing = [key for key in _REQUIRED if key not in record]
        if missing:
            raise StreamFormatError(f"missing field(s) {', '.join(missing)}", str(file_path), line_number)

        tag = record["truth"]
        if tag == "ID":
            if record.get("label") is None:
                raise StreamFormatError("ID record without label", str(file_path), line_number)
            truth = Truth.id(record["label"])
        elif tag == "OOD":
            truth = Truth.ood()
        else:
            raise StreamFormatError(f"unknown truth tag {tag!r}", str(file_path), line_number)

        try:
            proposal = ObjectProposal(
                feature=record["feature"],
                box=tuple(record["box"]),
                objectness=float(record["objectness"]),
                truth=truth,
                track_id=record.get("track_id"),
            )
        except (TypeError, ValueError) as e:
            raise StreamFormatError(str(e), str(file_path), line_number)

        frames = videos.setdefault(int(record["video_id"]), {})
        frame_index = int(record["frame_index"])
        if frame_index not in frames and frames and frame_index < max(frames):
            raise StreamFormatError(
                f"frame_index {frame_index} is not increasing within video {record['video_id']}",
                str(file_path), line_number,
            )
        frames.setdefault(frame_index, []).append(proposal)

    return [
        Video(video_id=video_id, frames=tuple(
            FrameProposals(frame_index=t, proposals=tuple(proposals)) for t, proposals in frames.items()
        ))
        for video_id, frames in videos.items()
    ]
